// SPDX-License-Identifier: Apache-2.0
// Pretty-printer; output re-parses to a structurally equal tree.
#include <sstream>

#include "remodel/model.hpp"

namespace remodel {

namespace {

using K = Expr::Kind;

bool needsParens(const Expr& e) {
    return e.kind == K::Binary || e.kind == K::Unary || e.kind == K::Let || e.kind == K::Opaque;
}

std::string wrapped(const ExprPtr& e) {
    std::string s = printExpr(*e);
    return needsParens(*e) ? "(" + s + ")" : s;
}

std::string typedName(const TypedName& v) {
    return v.type ? v.name + " : " + printType(*v.type) : v.name;
}

std::string joinExprs(const std::vector<ExprPtr>& es) {
    std::string out;
    for (std::size_t i = 0; i < es.size(); ++i) {
        if (i) out += ", ";
        out += printExpr(*es[i]);
    }
    return out;
}

std::string params(const std::vector<TypedName>& ps) {
    std::string out = "(";
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (i) out += ", ";
        out += typedName(ps[i]);
    }
    return out + ")";
}

}  // namespace

std::string printType(const TypeRef& t) {
    if (!t.collection.empty()) return t.collection + "(" + t.name + ")";
    if (t.enumLiterals.empty()) return t.name;
    std::string out = t.name + "[";
    for (std::size_t i = 0; i < t.enumLiterals.size(); ++i) {
        if (i) out += "|";
        out += t.enumLiterals[i];
    }
    return out + "]";
}

std::string printExpr(const Expr& e) {
    switch (e.kind) {
        case K::Literal:
        case K::Ident:
        case K::Opaque:
            return e.text;
        case K::Member:
            return wrapped(e.target) + "." + e.text + (e.atPre ? "@pre" : "");
        case K::Call: {
            std::string prefix = e.target ? wrapped(e.target) + "." : "";
            return prefix + e.text + "(" + joinExprs(e.args) + ")" + (e.atPre ? "@pre" : "");
        }
        case K::Arrow: {
            std::string inner = e.vars.empty()
                                    ? joinExprs(e.args)
                                    : typedName(e.vars.front()) + " | " + printExpr(*e.body);
            return wrapped(e.target) + "->" + e.text + "(" + inner + ")";
        }
        case K::Unary:
            return e.text == "not" ? "not " + wrapped(e.args[0]) : e.text + wrapped(e.args[0]);
        case K::Binary:
            return wrapped(e.args[0]) + " " + e.text + " " + wrapped(e.args[1]);
        case K::If: {
            std::string out = "if " + printExpr(*e.args[0]) + " then " + printExpr(*e.args[1]);
            if (e.args.size() > 2) out += " else" + (e.args[2] ? " " + printExpr(*e.args[2]) : "");
            return out + " endif";
        }
        case K::Let: {
            std::string out = "let ";
            for (std::size_t i = 0; i < e.vars.size(); ++i) {
                if (i) out += ", ";
                out += typedName(e.vars[i]);
            }
            return out + " in " + printExpr(*e.body);
        }
    }
    return {};
}

std::string printModel(const ModelAst& ast) {
    std::ostringstream os;
    for (const auto& r : ast.ignored) os << r.text << "\n\n";
    for (const auto& s : ast.services) {
        os << "Service " << s.name << " {\n";
        if (!s.operations.empty()) {
            os << "\t[Operation]\n";
            for (const auto& op : s.operations) os << "\t" << op.name << params(op.params) << "\n";
        }
        if (!s.tempProperties.empty()) {
            os << "\t[TempProperty]\n";
            for (const auto& p : s.tempProperties) os << "\t" << p.name << " : " << printType(p.type) << "\n";
        }
        os << "}\n\n";
    }
    for (const auto& a : ast.actors) {
        os << "Actor " << a.name;
        if (a.parent) os << " extends " << *a.parent;
        os << " {\n";
        if (a.description) {
            std::string d;
            for (char c : *a.description) {
                if (c == '"' || c == '\\') d += '\\';
                d += c;
            }
            os << "\t@Description(\"" << d << "\")\n";
        }
        for (const auto& u : a.useCases) os << "\t" << u << "\n";
        os << "}\n\n";
    }
    for (const auto& c : ast.contracts) {
        os << "Contract " << c.serviceName << "::" << c.operationName << params(c.parameters);
        if (c.returnType) os << " : " << printType(*c.returnType);
        os << " {\n";
        if (!c.definitions.empty()) {
            os << "\tdefinition:\n";
            for (std::size_t i = 0; i < c.definitions.size(); ++i) {
                const auto& d = c.definitions[i];
                os << "\t\t" << d.name << " : " << printType(d.type) << " = " << printExpr(*d.value)
                   << (i + 1 < c.definitions.size() ? ",\n" : "\n");
            }
        }
        if (c.precondition) os << "\tprecondition:\n\t\t" << printExpr(*c.precondition) << "\n";
        if (c.postcondition) os << "\tpostcondition:\n\t\t" << printExpr(*c.postcondition) << "\n";
        os << "}\n\n";
    }
    return os.str();
}

}  // namespace remodel
