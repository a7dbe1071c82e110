// SPDX-License-Identifier: Apache-2.0
// Canonical text syntax for type expressions.
#include <cctype>
#include <sstream>

#include "remodel/type.hpp"

namespace remodel {

namespace {

std::string joinNames(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += v[i];
    }
    return out;
}

std::string tupleText(const std::vector<std::string>& v) {
    return v.size() == 1 ? v.front() : "(" + joinNames(v) + ")";
}

std::string lengthText(const Length& l) {
    switch (l.kind) {
        case Length::Kind::Nat:
            return std::to_string(l.n);
        case Length::Kind::Star:
            return "*";
        case Length::Kind::Var:
            return l.var;
    }
    return {};
}

void print(std::ostream& os, const TypeExpr& t);

// A constrained type inside another type is braced so its predicate ends unambiguously.
void printPart(std::ostream& os, const TypeExpr& t) {
    if (t.kind() != TypeExpr::Kind::Constrained) return print(os, t);
    os << '{';
    print(os, t);
    os << '}';
}

void print(std::ostream& os, const TypeExpr& t) {
    using K = TypeExpr::Kind;
    switch (t.kind()) {
        case K::Concrete:
        case K::Variable:
            os << t.name();
            break;
        case K::Void:
            os << "Void";
            break;
        case K::Sequence:
        case K::Product: {
            bool seq = t.kind() == K::Sequence;
            os << (seq ? '<' : '(');
            for (std::size_t i = 0; i < t.items().size(); ++i) {
                if (i) os << ", ";
                printPart(os, t.items()[i]);
            }
            os << (seq ? '>' : ')');
            break;
        }
        case K::Coroutine:
            os << '[';
            printPart(os, t.receive());
            os << "; ";
            printPart(os, t.yield());
            os << ']';
            break;
        case K::Constrained:
            printPart(os, t.base());
            os << " / " << toString(t.predicate());
            break;
        case K::List:
            printPart(os, t.element());
            os << '^' << lengthText(t.length());
            break;
    }
}

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    TypeExpr parseAll() {
        TypeExpr t = parseType();
        skipWs();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return t;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw TypeParseError(msg + " at offset " + std::to_string(pos_), pos_);
    }

    void skipWs() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool peek(char c) {
        skipWs();
        return pos_ < s_.size() && s_[pos_] == c;
    }

    bool consume(char c) {
        if (!peek(c)) return false;
        ++pos_;
        return true;
    }

    void expect(char c) {
        if (!consume(c)) fail(std::string("expected '") + c + "'");
    }

    bool consumeWord(const std::string& w) {
        skipWs();
        if (s_.compare(pos_, w.size(), w) != 0) return false;
        std::size_t end = pos_ + w.size();
        if (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_'))
            return false;
        pos_ = end;
        return true;
    }

    std::string ident() {
        skipWs();
        std::size_t start = pos_;
        if (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
            ++pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
        }
        if (start == pos_) fail("expected identifier");
        return s_.substr(start, pos_ - start);
    }

    static bool isVarName(const std::string& n) {
        return std::islower(static_cast<unsigned char>(n[0])) != 0;
    }

    TypeExpr parseType() {
        TypeExpr base = parsePostfix();
        if (consume('/')) return TypeExpr::constrained(base, parsePredicate());
        return base;
    }

    TypeExpr parsePostfix() {
        TypeExpr t = parsePrimary();
        while (consume('^')) {
            skipWs();
            if (consume('*')) {
                t = TypeExpr::listOf(t, Length::star());
            } else if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                std::size_t start = pos_;
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
                t = TypeExpr::listOf(t, Length::nat(std::stoul(s_.substr(start, pos_ - start))));
            } else {
                std::string v = ident();
                if (!isVarName(v)) fail("list length variable must start lowercase");
                t = TypeExpr::listOf(t, Length::variable(v));
            }
        }
        return t;
    }

    std::vector<TypeExpr> parseList(char close) {
        std::vector<TypeExpr> items;
        if (consume(close)) return items;
        do {
            items.push_back(parseType());
        } while (consume(','));
        expect(close);
        return items;
    }

    TypeExpr parsePrimary() {
        skipWs();
        if (pos_ >= s_.size()) fail("unexpected end of type");
        if (consume('<')) return TypeExpr::sequence(parseList('>'));
        if (consume('(')) {
            auto items = parseList(')');
            if (items.empty()) fail("empty product");
            return TypeExpr::product(std::move(items));
        }
        if (consume('{')) {
            TypeExpr inner = parseType();
            expect('}');
            return inner;
        }
        if (consume('[')) {
            TypeExpr r = parseType();
            expect(';');
            TypeExpr y = parseType();
            expect(']');
            return TypeExpr::coroutine(r, y);
        }
        if (s_.compare(pos_, 3, "\xE2\x88\x85") == 0) {  // U+2205
            pos_ += 3;
            return TypeExpr::voidType();
        }
        std::string n = ident();
        if (n == "Void") return TypeExpr::voidType();
        return isVarName(n) ? TypeExpr::variable(n) : TypeExpr::concrete(n);
    }

    std::vector<std::string> parseNameTuple() {
        std::vector<std::string> names;
        if (consume('(')) {
            do {
                names.push_back(ident());
            } while (consume(','));
            expect(')');
        } else {
            names.push_back(ident());
        }
        return names;
    }

    Predicate parsePredicate() {
        Predicate p;
        do {
            std::vector<std::string> vars = parseNameTuple();
            skipWs();
            if (s_.compare(pos_, 2, "<:") == 0) {
                pos_ += 2;
                if (vars.size() != 1) fail("subtype bound takes one variable");
                p.atoms.push_back(SubtypeOf{vars.front(), ident()});
            } else if (consumeWord("notin")) {
                NotInSet nis{vars, {}};
                expect('{');
                if (!consume('}')) {
                    do {
                        auto tup = parseNameTuple();
                        if (tup.size() != vars.size()) fail("excluded tuple arity mismatch");
                        nis.excluded.push_back(std::move(tup));
                    } while (consume(','));
                    expect('}');
                }
                p.atoms.push_back(std::move(nis));
            } else {
                fail("expected '<:' or 'notin'");
            }
        } while (consumeWord("and"));
        return p;
    }
};

}  // namespace

std::string toString(const TypeExpr& t) {
    std::ostringstream os;
    print(os, t);
    return os.str();
}

std::string toString(const Predicate& p) {
    std::string out;
    for (std::size_t i = 0; i < p.atoms.size(); ++i) {
        if (i) out += " and ";
        if (auto s = std::get_if<SubtypeOf>(&p.atoms[i])) {
            out += s->var + " <: " + s->upper;
        } else {
            const auto& n = std::get<NotInSet>(p.atoms[i]);
            out += tupleText(n.vars) + " notin {";
            for (std::size_t j = 0; j < n.excluded.size(); ++j) {
                if (j) out += ", ";
                out += tupleText(n.excluded[j]);
            }
            out += "}";
        }
    }
    return out;
}

std::string toString(const BindingValue& v) {
    if (auto t = std::get_if<TypeExpr>(&v)) return toString(*t);
    return lengthText(std::get<Length>(v));
}

TypeExpr parseType(const std::string& text) { return Parser(text).parseAll(); }

}  // namespace remodel
