// SPDX-License-Identifier: Apache-2.0
#include <json.hpp>

#include "remodel/model.hpp"

namespace remodel {

bool sameExpr(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return !a && !b;
    return *a == *b;
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.kind != b.kind || a.text != b.text || a.atPre != b.atPre || a.vars != b.vars ||
        a.args.size() != b.args.size() || !sameExpr(a.target, b.target) || !sameExpr(a.body, b.body))
        return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!sameExpr(a.args[i], b.args[i])) return false;
    return true;
}

bool ContractAst::operator==(const ContractAst& o) const {
    return serviceName == o.serviceName && operationName == o.operationName &&
           parameters == o.parameters && returnType == o.returnType && definitions == o.definitions &&
           sameExpr(precondition, o.precondition) && sameExpr(postcondition, o.postcondition);
}

ExprPtr makeIdent(std::string name) {
    Expr e;
    e.kind = Expr::Kind::Ident;
    e.text = std::move(name);
    return std::make_shared<const Expr>(std::move(e));
}

ExprPtr makeUnary(std::string op, ExprPtr operand) {
    Expr e;
    e.kind = Expr::Kind::Unary;
    e.text = std::move(op);
    e.span = operand->span;
    e.args = {std::move(operand)};
    return std::make_shared<const Expr>(std::move(e));
}

ExprPtr makeBinary(std::string op, ExprPtr lhs, ExprPtr rhs) {
    Expr e;
    e.kind = Expr::Kind::Binary;
    e.text = std::move(op);
    e.span = lhs->span;
    e.args = {std::move(lhs), std::move(rhs)};
    return std::make_shared<const Expr>(std::move(e));
}

// ---- diagnostics ----

const char* severityName(Severity s) {
    switch (s) {
        case Severity::Error: return "error";
        case Severity::Warning: return "warning";
        case Severity::Note: return "note";
    }
    return "?";
}

std::string formatDiagnostic(const std::string& file, const Diagnostic& d) {
    return file + ":" + std::to_string(d.span.line) + ":" + std::to_string(d.span.col) + ": " +
           severityName(d.severity) + ": " + d.message;
}

std::string diagnosticsToJson(const std::string& file, const std::vector<Diagnostic>& ds) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& d : ds) {
        arr.push_back({{"file", file},
                       {"line", d.span.line},
                       {"column", d.span.col},
                       {"severity", severityName(d.severity)},
                       {"message", d.message}});
    }
    return arr.dump(2);
}

bool hasErrors(const std::vector<Diagnostic>& ds) {
    for (const auto& d : ds)
        if (d.severity == Severity::Error) return true;
    return false;
}

// ---- symbols ----

namespace {

bool endsWith(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

SymbolResult collectSymbols(const ModelAst& ast) {
    SymbolResult res;
    TypeEnv env;
    auto err = [&](SourceSpan sp, std::string msg) {
        res.diagnostics.push_back({Severity::Error, sp, std::move(msg)});
    };

    for (const auto& s : ast.services) {
        if (env.classFields.count(s.name)) {
            err(s.span, "duplicate service '" + s.name + "'");
            continue;
        }
        auto& fields = env.classFields[s.name];
        bool system = endsWith(s.name, "System");
        if (system) env.systemServices.insert(s.name);
        for (const auto& p : s.tempProperties) {
            FieldInfo f{s.name, p.type};
            fields.emplace(p.name, f);
            if (system) env.systemFields.emplace(p.name, f);
        }
    }

    std::map<std::string, const ActorDecl*> actors;
    for (const auto& a : ast.actors) {
        if (!actors.emplace(a.name, &a).second) err(a.span, "duplicate actor '" + a.name + "'");
    }
    for (const auto& a : ast.actors) {
        if (!a.parent) continue;
        if (!actors.count(*a.parent)) {
            err(a.span, "actor '" + a.name + "' extends unknown actor '" + *a.parent + "'");
            continue;
        }
        env.hierarchy[a.name] = *a.parent;
    }
    for (const auto& [child, parent] : env.hierarchy) {
        std::set<std::string> seen{child};
        std::string cur = parent;
        for (;;) {
            if (!seen.insert(cur).second) {
                err(actors[child]->span, "inheritance cycle through actor '" + child + "'");
                break;
            }
            auto it = env.hierarchy.find(cur);
            if (it == env.hierarchy.end()) break;
            cur = it->second;
        }
    }

    for (const auto& c : ast.contracts) {
        if (!env.classFields.count(c.serviceName))
            err(c.span, "contract " + c.qualifiedName() + " names undeclared service '" +
                            c.serviceName + "'");
    }

    if (!hasErrors(res.diagnostics)) res.env = std::move(env);
    return res;
}

// ---- conjuncts ----

namespace {

using K = Expr::Kind;

bool isBoolLiteral(const ExprPtr& e, const char* value) {
    return e && e->kind == K::Literal && e->text == value;
}

ExprPtr negate(const ExprPtr& e) {
    if (e->kind == K::Unary && e->text == "not") return e->args[0];
    return makeUnary("not", e);
}

// Rewrites `X = true`, `X = false`, `X <> true`, `X <> false` (either side) and
// double negation.
ExprPtr simplify(const ExprPtr& e) {
    if (e->kind == K::Unary && e->text == "not") {
        ExprPtr inner = simplify(e->args[0]);
        return negate(inner);
    }
    if (e->kind == K::Binary && (e->text == "=" || e->text == "<>")) {
        const ExprPtr& l = e->args[0];
        const ExprPtr& r = e->args[1];
        ExprPtr subject;
        bool positive = false;
        if (isBoolLiteral(r, "true") || isBoolLiteral(r, "false")) {
            subject = l;
            positive = isBoolLiteral(r, "true");
        } else if (isBoolLiteral(l, "true") || isBoolLiteral(l, "false")) {
            subject = r;
            positive = isBoolLiteral(l, "true");
        }
        if (subject && subject->kind != K::Literal) {
            if (e->text == "<>") positive = !positive;
            ExprPtr s = simplify(subject);
            return positive ? s : negate(s);
        }
    }
    return e;
}

void flatten(const ExprPtr& e, std::vector<ExprPtr>& out) {
    if (!e) return;
    if (e->kind == K::Binary && e->text == "and") {
        flatten(e->args[0], out);
        flatten(e->args[1], out);
        return;
    }
    if (e->kind == K::Let) {
        flatten(e->body, out);
        return;
    }
    out.push_back(simplify(e));
}

void collectLets(const ExprPtr& e, std::vector<TypedName>& out) {
    if (!e) return;
    if (e->kind == K::Binary && e->text == "and") {
        collectLets(e->args[0], out);
        collectLets(e->args[1], out);
    } else if (e->kind == K::Let) {
        out.insert(out.end(), e->vars.begin(), e->vars.end());
        collectLets(e->body, out);
    }
}

}  // namespace

std::vector<ExprPtr> toConjuncts(const ExprPtr& e) {
    std::vector<ExprPtr> out;
    flatten(e, out);
    return out;
}

std::vector<TypedName> letBindings(const ExprPtr& e) {
    std::vector<TypedName> out;
    collectLets(e, out);
    return out;
}

}  // namespace remodel
