// SPDX-License-Identifier: Apache-2.0
// Recursive-descent parser for the REModel subset.
#include <set>

#include "lexer.hpp"
#include "remodel/model.hpp"

namespace remodel {

using detail::Token;
using TK = Token::Kind;

namespace {

struct SyntaxError {
    std::string message;
    SourceSpan span;
};

const std::set<std::string> kCollections = {"Set", "Bag", "Sequence", "OrderedSet"};
const std::set<std::string> kReserved = {"and", "or",   "xor",   "not", "implies", "if",
                                         "then", "else", "endif", "let", "in"};
const std::set<std::string> kLiteralWords = {"true", "false", "null", "invalid"};
const std::set<std::string> kSectionWords = {"definition", "definitions", "precondition",
                                             "postcondition"};

SourceSpan spanOf(const Token& t) { return {t.line, t.col}; }

std::string unquote(const std::string& lexeme) {
    if (lexeme.size() < 2) return lexeme;
    std::string out;
    for (std::size_t i = 1; i + 1 < lexeme.size(); ++i) {
        if (lexeme[i] == '\\' && i + 2 < lexeme.size()) ++i;
        out += lexeme[i];
    }
    return out;
}

class Parser {
public:
    Parser(std::vector<Token> toks, std::vector<Diagnostic>& diags)
        : toks_(std::move(toks)), limit_(toks_.size() - 1), diags_(diags) {}

    ModelAst parseModel() {
        ModelAst ast;
        while (!atEnd()) {
            const Token& t = peek();
            if (t.kind == TK::Punct && t.text == "}") {
                error("unmatched '}'", spanOf(t));
                ++pos_;
                continue;
            }
            std::size_t start = pos_;
            std::optional<std::size_t> close = blockEnd(start);
            if (!close) return ast;  // unbalanced braces; already reported
            std::size_t savedLimit = limit_;
            limit_ = *close;
            try {
                if (isWord("Service")) {
                    ast.services.push_back(parseService());
                } else if (isWord("Actor")) {
                    ast.actors.push_back(parseActor());
                } else if (isWord("Contract")) {
                    ast.contracts.push_back(parseContract());
                } else {
                    ast.ignored.push_back(ignoredRegion(start, *close));
                }
                if (!atEnd()) throw SyntaxError{"unexpected '" + peek().text + "'", spanOf(peek())};
            } catch (const SyntaxError& e) {
                error(e.message, e.span);
            }
            limit_ = savedLimit;
            bool braced = toks_[*close].kind == TK::Punct && toks_[*close].text == "}";
            pos_ = braced ? *close + 1 : *close;
        }
        return ast;
    }

    ExprPtr parseStandaloneExpr() {
        return sectionExpr();
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::size_t limit_;
    std::vector<Diagnostic>& diags_;

    // ---- token access ----

    const Token& peek(std::size_t k = 0) const {
        std::size_t i = pos_ + k;
        return i < limit_ ? toks_[i] : toks_.back();
    }
    bool atEnd() const { return peek().kind == TK::End; }
    Token next() {
        Token t = peek();
        if (pos_ < limit_) ++pos_;
        return t;
    }
    bool isPunct(const char* p, std::size_t k = 0) const {
        return peek(k).kind == TK::Punct && peek(k).text == p;
    }
    bool isWord(const char* w, std::size_t k = 0) const {
        return peek(k).kind == TK::Ident && peek(k).text == w;
    }
    bool acceptPunct(const char* p) {
        if (!isPunct(p)) return false;
        ++pos_;
        return true;
    }
    bool acceptWord(const char* w) {
        if (!isWord(w)) return false;
        ++pos_;
        return true;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        const Token& t = peek();
        std::string found = t.kind == TK::End ? "end of block" : "'" + t.text + "'";
        throw SyntaxError{msg + ", found " + found, spanOf(t)};
    }
    void expectPunct(const char* p) {
        if (!acceptPunct(p)) fail(std::string("expected '") + p + "'");
    }
    void expectWord(const char* w) {
        if (!acceptWord(w)) fail(std::string("expected '") + w + "'");
    }
    std::string ident(const char* what = "identifier") {
        if (peek().kind != TK::Ident) fail(std::string("expected ") + what);
        return next().text;
    }
    void error(const std::string& msg, SourceSpan sp) {
        diags_.push_back({Severity::Error, sp, msg});
    }
    void warning(const std::string& msg, SourceSpan sp) {
        diags_.push_back({Severity::Warning, sp, msg});
    }

    std::string joined(std::size_t from, std::size_t to) const {
        std::string out;
        for (std::size_t i = from; i < to && i < toks_.size() - 1; ++i) {
            if (!out.empty()) out += ' ';
            out += toks_[i].text;
        }
        return out;
    }

    bool isTopKeyword(std::size_t i) const {
        const Token& t = toks_[i];
        return t.kind == TK::Ident && t.firstOnLine &&
               (t.text == "Service" || t.text == "Actor" || t.text == "Contract");
    }

    // Index one past the last token of the top-level item starting at `start`:
    // the matching '}' of its first '{', or the next top-level keyword when no
    // brace opens first.
    std::optional<std::size_t> blockEnd(std::size_t start) {
        std::size_t i = start;
        for (; i < toks_.size() - 1; ++i) {
            if (i > start && isTopKeyword(i)) return i;
            if (toks_[i].kind == TK::Punct && toks_[i].text == "{") break;
        }
        if (i >= toks_.size() - 1) return toks_.size() - 1;
        std::size_t open = i;
        int depth = 0;
        for (; i < toks_.size() - 1; ++i) {
            if (toks_[i].kind != TK::Punct) continue;
            if (toks_[i].text == "{") ++depth;
            if (toks_[i].text == "}" && --depth == 0) return i;
        }
        error("unbalanced braces: '{' is never closed", spanOf(toks_[open]));
        return std::nullopt;
    }

    IgnoredRegion ignoredRegion(std::size_t start, std::size_t close) {
        IgnoredRegion r;
        r.keyword = toks_[start].text;
        bool braced = close < toks_.size() - 1 && toks_[close].text == "}";
        std::size_t stop = braced ? close + 1 : close;
        r.text = joined(start, stop);
        r.begin = spanOf(toks_[start]);
        r.end = spanOf(toks_[stop > start ? stop - 1 : start]);
        pos_ = limit_;
        return r;
    }

    // The block body ends at limit_, which points at its closing brace.
    void openBody() { expectPunct("{"); }

    // ---- types ----

    TypeRef typeRef() {
        TypeRef t;
        Token nameTok = peek();
        t.name = ident("type name");
        if (kCollections.count(t.name) && isPunct("(")) {
            ++pos_;
            t.collection = t.name;
            t.name = ident("element type");
            expectPunct(")");
        } else if (isPunct("[") && peek().line == nameTok.line) {
            ++pos_;
            if (isPunct("]")) fail("bad enum syntax: empty literal list");
            for (;;) {
                if (peek().kind != TK::Ident) fail("bad enum syntax: expected literal");
                t.enumLiterals.push_back(next().text);
                if (acceptPunct("|") || acceptPunct(",")) continue;
                if (acceptPunct("]")) break;
                fail("bad enum syntax: expected '|' or ']'");
            }
        }
        return t;
    }

    std::vector<TypedName> paramList(bool typesRequired) {
        std::vector<TypedName> ps;
        expectPunct("(");
        if (acceptPunct(")")) return ps;
        do {
            TypedName p;
            p.name = ident("parameter name");
            if (acceptPunct(":")) p.type = typeRef();
            else if (typesRequired) fail("expected ':' after parameter name");
            ps.push_back(std::move(p));
        } while (acceptPunct(","));
        expectPunct(")");
        return ps;
    }

    // ---- services and actors ----

    bool atServiceSection() const {
        return isPunct("[") && peek().firstOnLine && peek(1).kind == TK::Ident && isPunct("]", 2);
    }

    ServiceDecl parseService() {
        ServiceDecl s;
        s.span = spanOf(peek());
        expectWord("Service");
        s.name = ident("service name");
        openBody();
        while (!atEnd() && !atServiceSection()) {
            warning("content outside a service section is ignored", spanOf(peek()));
            while (!atEnd() && !atServiceSection()) ++pos_;
        }
        std::set<std::string> props;
        while (atServiceSection()) {
            ++pos_;
            std::string section = next().text;
            ++pos_;
            if (section == "Operation") {
                while (!atEnd() && !atServiceSection()) {
                    OperationSig op;
                    op.name = ident("operation name");
                    op.params = paramList(false);
                    if (acceptPunct(":")) typeRef();
                    s.operations.push_back(std::move(op));
                    while (acceptPunct(",") || acceptPunct(";")) {
                    }
                }
            } else if (section == "TempProperty") {
                while (!atEnd() && !atServiceSection()) {
                    PropertyDecl p;
                    p.span = spanOf(peek());
                    p.name = ident("property name");
                    expectPunct(":");
                    p.type = typeRef();
                    if (!props.insert(p.name).second)
                        throw SyntaxError{"duplicate property '" + p.name + "' in service " + s.name,
                                          p.span};
                    s.tempProperties.push_back(std::move(p));
                    while (acceptPunct(",") || acceptPunct(";")) {
                    }
                }
            } else {
                while (!atEnd() && !atServiceSection()) ++pos_;
            }
        }
        return s;
    }

    ActorDecl parseActor() {
        ActorDecl a;
        a.span = spanOf(peek());
        expectWord("Actor");
        a.name = ident("actor name");
        if (acceptWord("extends")) a.parent = ident("parent actor");
        openBody();
        while (!atEnd()) {
            if (acceptPunct("@")) {
                std::string tag = ident("annotation name");
                if (acceptPunct("(")) {
                    if (tag == "Description" && peek().kind == TK::String) {
                        a.description = unquote(next().text);
                    } else {
                        int depth = 1;
                        while (!atEnd() && depth > 0) {
                            if (isPunct("(")) ++depth;
                            if (isPunct(")")) --depth;
                            if (depth > 0) ++pos_;
                        }
                    }
                    expectPunct(")");
                }
            } else if (peek().kind == TK::Ident) {
                a.useCases.push_back(next().text);
            } else if (!acceptPunct(",") && !acceptPunct(";")) {
                fail("expected use case name");
            }
        }
        return a;
    }

    // ---- contracts ----

    bool atSectionKeyword() const {
        return peek().kind == TK::Ident && kSectionWords.count(peek().text) && isPunct(":", 1);
    }

    ContractAst parseContract() {
        ContractAst c;
        c.span = spanOf(peek());
        expectWord("Contract");
        try {
            c.serviceName = ident("service name");
            expectPunct("::");
            c.operationName = ident("operation name");
            c.parameters = paramList(false);
            if (acceptPunct(":")) c.returnType = typeRef();
            openBody();
        } catch (const SyntaxError& e) {
            throw SyntaxError{"malformed contract header: " + e.message, e.span};
        }
        bool seenDef = false, seenPre = false, seenPost = false;
        while (!atEnd()) {
            if (!atSectionKeyword())
                fail("expected 'definition:', 'precondition:' or 'postcondition:'");
            Token kw = next();
            ++pos_;  // ':'
            auto once = [&](bool& seen) {
                if (seen) throw SyntaxError{"duplicate '" + kw.text + ":' section", spanOf(kw)};
                seen = true;
            };
            if (kw.text == "precondition") {
                once(seenPre);
                c.precondition = sectionExpr();
            } else if (kw.text == "postcondition") {
                once(seenPost);
                c.postcondition = sectionExpr();
            } else {
                once(seenDef);
                c.definitions = definitions();
            }
        }
        return c;
    }

    std::vector<Definition> definitions() {
        std::vector<Definition> defs;
        while (!atEnd() && !atSectionKeyword()) {
            Definition d;
            try {
                d.name = ident("definition name");
                expectPunct(":");
                d.type = typeRef();
                expectPunct("=");
            } catch (const SyntaxError& e) {
                warning("malformed definition: " + e.message, e.span);
                skipToSectionEnd();
                return defs;
            }
            std::size_t exprStart = pos_;
            try {
                d.value = expr();
            } catch (const SyntaxError& e) {
                warning("unparsed definition expression: " + e.message, e.span);
                pos_ = exprStart;
                skipToSectionEnd();
                d.value = opaque(exprStart, pos_);
                defs.push_back(std::move(d));
                return defs;
            }
            defs.push_back(std::move(d));
            while (acceptPunct(",") || acceptPunct(";")) {
            }
        }
        return defs;
    }

    void skipToSectionEnd() {
        while (!atEnd() && !atSectionKeyword()) ++pos_;
    }

    ExprPtr opaque(std::size_t from, std::size_t to) {
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::Opaque;
        e->text = joined(from, to);
        e->span = spanOf(toks_[std::min(from, toks_.size() - 1)]);
        return e;
    }

    ExprPtr sectionExpr() {
        std::size_t start = pos_;
        try {
            ExprPtr e = expr();
            if (!atEnd() && !atSectionKeyword()) fail("unexpected token after expression");
            return e;
        } catch (const SyntaxError& e) {
            warning("unparsed expression kept opaque: " + e.message, e.span);
            pos_ = start;
            skipToSectionEnd();
            return opaque(start, pos_);
        }
    }

    // ---- expressions ----

    bool atTerminator() const {
        if (atEnd() || atSectionKeyword()) return true;
        const Token& t = peek();
        if (t.kind == TK::Punct) return t.text == ")" || t.text == "}" || t.text == "," || t.text == "|";
        return t.kind == TK::Ident &&
               (t.text == "then" || t.text == "else" || t.text == "endif" || t.text == "in");
    }

    static ExprPtr node(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

    ExprPtr binary(std::string op, ExprPtr l, ExprPtr r, SourceSpan sp) {
        Expr e;
        e.kind = Expr::Kind::Binary;
        e.text = std::move(op);
        e.args = {std::move(l), std::move(r)};
        e.span = sp;
        return node(std::move(e));
    }

    ExprPtr expr() { return implies(); }

    // Logical operators tolerate a dangling operator before a terminator
    // (`a and` followed by `else`, `endif`, `)` or a section keyword).
    template <typename Next>
    ExprPtr logical(std::initializer_list<const char*> ops, Next nextLevel) {
        ExprPtr l = nextLevel();
        for (;;) {
            const char* hit = nullptr;
            for (const char* op : ops)
                if (isWord(op)) hit = op;
            if (!hit) return l;
            SourceSpan sp = spanOf(next());
            if (atTerminator()) return l;
            l = binary(hit, l, nextLevel(), sp);
        }
    }

    ExprPtr implies() { return logical({"implies"}, [this] { return orExpr(); }); }
    ExprPtr orExpr() { return logical({"or", "xor"}, [this] { return andExpr(); }); }
    ExprPtr andExpr() { return logical({"and"}, [this] { return comparison(); }); }

    ExprPtr comparison() {
        ExprPtr l = additive();
        for (;;) {
            const Token& t = peek();
            if (t.kind != TK::Punct) return l;
            const std::string& p = t.text;
            if (p != "=" && p != "<>" && p != "<" && p != ">" && p != "<=" && p != ">=") return l;
            Token op = next();
            l = binary(op.text, l, additive(), spanOf(op));
        }
    }

    ExprPtr additive() {
        ExprPtr l = multiplicative();
        while (isPunct("+") || isPunct("-")) {
            Token op = next();
            l = binary(op.text, l, multiplicative(), spanOf(op));
        }
        return l;
    }

    ExprPtr multiplicative() {
        ExprPtr l = unary();
        while (isPunct("*") || isPunct("/") || isWord("div") || isWord("mod")) {
            Token op = next();
            l = binary(op.text, l, unary(), spanOf(op));
        }
        return l;
    }

    ExprPtr unary() {
        if (isWord("not") || isPunct("-")) {
            Token op = next();
            Expr e;
            e.kind = Expr::Kind::Unary;
            e.text = op.text;
            e.args = {unary()};
            e.span = spanOf(op);
            return node(std::move(e));
        }
        return postfix();
    }

    ExprPtr postfix() {
        ExprPtr cur = primary();
        for (;;) {
            if (isPunct(".")) {
                Token dot = next();
                Expr e;
                e.target = cur;
                e.text = ident("member name");
                e.span = spanOf(dot);
                if (isPunct("(")) {
                    e.kind = Expr::Kind::Call;
                    e.args = callArgs();
                } else {
                    e.kind = Expr::Kind::Member;
                }
                if (isPunct("@") && isWord("pre", 1)) {
                    pos_ += 2;
                    e.atPre = true;
                }
                cur = node(std::move(e));
            } else if (isPunct("->")) {
                Token arrow = next();
                Expr e;
                e.kind = Expr::Kind::Arrow;
                e.target = cur;
                e.text = ident("collection operation");
                e.span = spanOf(arrow);
                expectPunct("(");
                bool typedIter = peek().kind == TK::Ident && isPunct(":", 1);
                bool plainIter = peek().kind == TK::Ident && isPunct("|", 1);
                if (typedIter || plainIter) {
                    TypedName v;
                    v.name = next().text;
                    if (acceptPunct(":")) v.type = typeRef();
                    expectPunct("|");
                    e.vars.push_back(std::move(v));
                    e.body = expr();
                    expectPunct(")");
                } else {
                    if (!acceptPunct(")")) {
                        do {
                            e.args.push_back(expr());
                        } while (acceptPunct(","));
                        expectPunct(")");
                    }
                }
                cur = node(std::move(e));
            } else if (isPunct("@")) {
                fail("'@pre' must follow a dotted expression");
            } else {
                return cur;
            }
        }
    }

    std::vector<ExprPtr> callArgs() {
        std::vector<ExprPtr> args;
        expectPunct("(");
        if (acceptPunct(")")) return args;
        do {
            args.push_back(expr());
        } while (acceptPunct(","));
        expectPunct(")");
        return args;
    }

    ExprPtr primary() {
        if (atSectionKeyword()) fail("expected expression before section '" + peek().text + ":'");
        const Token& t = peek();
        SourceSpan sp = spanOf(t);
        if (t.kind == TK::Number || t.kind == TK::String) {
            Expr e;
            e.kind = Expr::Kind::Literal;
            e.text = next().text;
            e.span = sp;
            return node(std::move(e));
        }
        if (acceptPunct("(")) {
            ExprPtr inner = expr();
            expectPunct(")");
            return inner;
        }
        if (t.kind != TK::Ident) fail("expected expression");
        if (acceptWord("if")) {
            Expr e;
            e.kind = Expr::Kind::If;
            e.span = sp;
            e.args.push_back(expr());
            expectWord("then");
            e.args.push_back(expr());
            if (acceptWord("else")) {
                if (isWord("endif")) {
                    e.args.push_back(nullptr);
                } else {
                    e.args.push_back(expr());
                }
            }
            expectWord("endif");
            return node(std::move(e));
        }
        if (acceptWord("let")) {
            Expr e;
            e.kind = Expr::Kind::Let;
            e.span = sp;
            do {
                TypedName v;
                v.name = ident("let variable");
                expectPunct(":");
                v.type = typeRef();
                e.vars.push_back(std::move(v));
            } while (acceptPunct(","));
            expectWord("in");
            e.body = expr();
            return node(std::move(e));
        }
        if (kReserved.count(t.text)) fail("unexpected keyword");
        Expr e;
        e.span = sp;
        e.text = next().text;
        if (kLiteralWords.count(e.text)) {
            e.kind = Expr::Kind::Literal;
            return node(std::move(e));
        }
        while (isPunct("::") && peek(1).kind == TK::Ident) {
            ++pos_;
            e.text += "::" + next().text;
        }
        if (isPunct("(")) {
            e.kind = Expr::Kind::Call;
            e.args = callArgs();
        } else {
            e.kind = Expr::Kind::Ident;
        }
        return node(std::move(e));
    }
};

std::vector<Token> lexInto(const std::string& text, std::vector<Diagnostic>& diags) {
    std::vector<detail::LexError> errs;
    auto toks = detail::lex(text, errs);
    for (const auto& e : errs) diags.push_back({Severity::Error, {e.line, e.col}, e.message});
    return toks;
}

}  // namespace

ParseResult parseModel(const std::string& text) {
    ParseResult r;
    auto toks = lexInto(text, r.diagnostics);
    Parser p(std::move(toks), r.diagnostics);
    ModelAst ast = p.parseModel();
    if (!hasErrors(r.diagnostics)) r.ast = std::move(ast);
    return r;
}

ExprPtr parseExpression(const std::string& text, std::vector<Diagnostic>* diags) {
    std::vector<Diagnostic> local;
    std::vector<Diagnostic>& out = diags ? *diags : local;
    Parser p(lexInto(text, out), out);
    return p.parseStandaloneExpr();
}

}  // namespace remodel
