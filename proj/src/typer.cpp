// SPDX-License-Identifier: Apache-2.0
#include "remodel/typer.hpp"

#include <algorithm>
#include <set>

namespace remodel {

using K = Expr::Kind;

TypeExpr typeOf(const TypeRef& t) {
    TypeExpr base = TypeExpr::concrete(t.name);
    return t.collection.empty() ? base : TypeExpr::listOf(base, Length::star());
}

void Gamma::bind(const std::string& name, Origin origin, TypeExpr type) {
    auto it = entries_.find(name);
    if (it != entries_.end() && it->second.origin <= origin) return;
    entries_[name] = Entry{origin, std::move(type)};
}

std::optional<Gamma::Entry> Gamma::lookup(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

bool Gamma::isField(const std::string& name) const {
    auto e = lookup(name);
    return e && (e->origin == Origin::ClassField || e->origin == Origin::SystemField);
}

Gamma Gamma::forContract(const ContractAst& c, const TypeEnv& env) {
    Gamma g;
    // Fields are typed by their own name, not by their declared class.
    for (const auto& [name, info] : env.systemFields) g.bind(name, Origin::SystemField, TypeExpr::concrete(name));
    if (auto it = env.classFields.find(c.serviceName); it != env.classFields.end())
        for (const auto& [name, info] : it->second) g.bind(name, Origin::ClassField, TypeExpr::concrete(name));
    for (const auto& p : c.parameters)
        if (p.type) g.bind(p.name, Origin::Parameter, typeOf(*p.type));
    for (const auto& d : c.definitions) g.bind(d.name, Origin::Definition, typeOf(d.type));
    return g;
}

namespace {

void note(std::vector<TypingNote>* notes, NoteKind k, SourceSpan sp, std::string msg) {
    if (notes) notes->push_back({k, Severity::Warning, sp, std::move(msg)});
}

bool isCall(const ExprPtr& e, const char* name) {
    return e && e->kind == K::Call && e->target && e->text == name && e->args.empty();
}

bool isNot(const Expr& e) { return e.kind == K::Unary && e.text == "not"; }

// T.allInstance()->op(x)
const Expr* instanceOp(const Expr& e, const char* op) {
    if (e.kind != K::Arrow || e.text != op || e.args.size() != 1 || !e.vars.empty()) return nullptr;
    if (!isCall(e.target, "allInstance") && !isCall(e.target, "allInstances")) return nullptr;
    return e.args[0].get();
}

TypeExpr lookupExpr(const Expr& e, const Gamma& g, std::vector<TypingNote>* notes) {
    std::string name;
    if (e.kind == K::Ident) {
        name = e.text;
    } else if (e.kind == K::Member && e.target->kind == K::Ident && e.target->text == "self") {
        name = e.text;
    } else {
        note(notes, NoteKind::Unsupported, e.span,
             "only identifiers are typed here; '" + printExpr(e) + "' contributes nothing");
        return TypeExpr::voidType();
    }
    if (auto entry = g.lookup(name)) return entry->type;
    note(notes, NoteKind::UnknownIdentifier, e.span, "unknown identifier '" + name + "'");
    return TypeExpr::voidType();
}

TypeExpr instanceMembership(const Expr& e, const Gamma& g, std::vector<TypingNote>* notes) {
    if (isNot(e)) {
        if (const Expr* x = instanceOp(*e.args[0], "excludes")) return lookupExpr(*x, g, notes);
        return TypeExpr::voidType();
    }
    if (const Expr* x = instanceOp(e, "includes")) return lookupExpr(*x, g, notes);
    return TypeExpr::voidType();
}

std::vector<TypeExpr> itemsOf(const TypeExpr& t) {
    if (t.isVoid()) return {};
    if (t.kind() == TypeExpr::Kind::Sequence) return t.items();
    return {t};
}

void dedupInto(std::vector<TypeExpr>& out, const std::vector<TypeExpr>& in) {
    for (const auto& t : in)
        if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
}

TypeExpr replaceConcrete(const TypeExpr& t, const std::string& name, const TypeExpr& with) {
    using TK = TypeExpr::Kind;
    switch (t.kind()) {
        case TK::Concrete:
            return t.name() == name ? with : t;
        case TK::Sequence:
        case TK::Product: {
            std::vector<TypeExpr> items;
            for (const auto& i : t.items()) items.push_back(replaceConcrete(i, name, with));
            return t.kind() == TK::Sequence ? TypeExpr::sequence(items) : TypeExpr::product(items);
        }
        case TK::Coroutine:
            return TypeExpr::coroutine(replaceConcrete(t.receive(), name, with),
                                       replaceConcrete(t.yield(), name, with));
        case TK::Constrained:
            return TypeExpr::constrained(replaceConcrete(t.base(), name, with), t.predicate());
        case TK::List:
            return TypeExpr::listOf(replaceConcrete(t.element(), name, with), t.length());
        default:
            return t;
    }
}

void collectConcrete(const TypeExpr& t, std::vector<std::string>& out) {
    using TK = TypeExpr::Kind;
    switch (t.kind()) {
        case TK::Concrete:
            if (std::find(out.begin(), out.end(), t.name()) == out.end()) out.push_back(t.name());
            break;
        case TK::Sequence:
        case TK::Product:
            for (const auto& i : t.items()) collectConcrete(i, out);
            break;
        case TK::List:
            collectConcrete(t.element(), out);
            break;
        default:
            break;
    }
}

// Applies the conjunct rewriting (`x = false` to `not x`, double negation) to a
// single conjunct passed in directly.
ExprPtr canonical(const Expr& raw) {
    auto parts = toConjuncts(std::make_shared<const Expr>(raw));
    return parts.size() == 1 ? parts[0] : std::make_shared<const Expr>(raw);
}

}  // namespace

TypeExpr required(const Expr& raw, const Gamma& g, std::vector<TypingNote>* notes) {
    ExprPtr hold = canonical(raw);
    const Expr& e = *hold;
    if (isNot(e) && isCall(e.args[0], "oclIsUndefined")) return lookupExpr(*e.args[0]->target, g, notes);
    return instanceMembership(e, g, notes);
}

TypeExpr added(const Expr& raw, const Gamma& g, std::vector<TypingNote>* notes) {
    ExprPtr hold = canonical(raw);
    const Expr& e = *hold;
    if (e.kind == K::Call && e.target && e.text == "oclIsNew" && e.args.empty())
        return lookupExpr(*e.target, g, notes);
    if (e.kind == K::Binary && e.text == "=") {
        const Expr& lhs = *e.args[0];
        std::string id;
        if (lhs.kind == K::Ident) id = lhs.text;
        if (lhs.kind == K::Member && lhs.target->kind == K::Ident && lhs.target->text == "self" && !lhs.atPre)
            id = lhs.text;
        if (!id.empty() && g.isField(id)) return TypeExpr::concrete(id);
        return TypeExpr::voidType();
    }
    return instanceMembership(e, g, notes);
}

TypeExpr deleted(const Expr& raw, const Gamma& g, std::vector<TypingNote>* notes) {
    ExprPtr hold = canonical(raw);
    const Expr& e = *hold;
    if (e.kind == K::Call && e.target && e.text == "oclIsUndefined" && e.args.empty())
        return lookupExpr(*e.target, g, notes);
    if (const Expr* x = instanceOp(e, "excludes")) return lookupExpr(*x, g, notes);
    return TypeExpr::voidType();
}

TypedContract typeContract(const ContractAst& c, const TypeEnv& env) {
    TypedContract out;
    out.name = c.qualifiedName();
    out.operation = c.operationName;
    const Gamma base = Gamma::forContract(c, env);

    auto withLets = [&](const ExprPtr& e) {
        Gamma g = base;
        for (const auto& v : letBindings(e))
            if (v.type) g.bind(v.name, Gamma::Origin::Local, typeOf(*v.type));
        return g;
    };

    if (!c.precondition && !c.postcondition) {
        out.notes.push_back({NoteKind::EmptyContract, Severity::Warning, c.span,
                             "contract " + out.name + " has no precondition or postcondition"});
    }

    std::vector<TypeExpr> t1;
    if (c.precondition) {
        Gamma g = withLets(c.precondition);
        for (const auto& conj : toConjuncts(c.precondition))
            dedupInto(t1, itemsOf(required(*conj, g, &out.notes)));
    }

    std::vector<TypeExpr> t2, t3;
    if (c.postcondition) {
        Gamma g = withLets(c.postcondition);
        auto conjs = toConjuncts(c.postcondition);
        bool allConditional =
            !conjs.empty() && std::all_of(conjs.begin(), conjs.end(),
                                          [](const ExprPtr& e) { return e->kind == K::If; });
        if (allConditional) {
            out.notes.push_back({NoteKind::ConditionalPostcondition, Severity::Warning, c.postcondition->span,
                                 "postcondition of " + out.name +
                                     " is conditional; contract typed [Void; Void]"});
            out.coroutine = TypeExpr::coroutine(TypeExpr::voidType(), TypeExpr::voidType());
            return out;
        }
        for (const auto& conj : conjs) {
            if (conj->kind == K::If) {
                out.notes.push_back({NoteKind::ConditionalPostcondition, Severity::Warning, conj->span,
                                     "conditional conjunct in " + out.name + " is not typed"});
                continue;
            }
            auto a = itemsOf(added(*conj, g, &out.notes));
            t2.insert(t2.end(), a.begin(), a.end());
            auto d = itemsOf(deleted(*conj, g, &out.notes));
            t3.insert(t3.end(), d.begin(), d.end());
        }
    }

    // yield = t1 - t3 + t2, first occurrence kept
    std::vector<TypeExpr> kept = t1;
    for (const auto& d : t3) {
        auto it = std::find(kept.begin(), kept.end(), d);
        if (it != kept.end()) kept.erase(it);
    }
    std::vector<TypeExpr> yield;
    dedupInto(yield, kept);
    dedupInto(yield, t2);

    out.coroutine = normalize(TypeExpr::coroutine(TypeExpr::sequence(t1), TypeExpr::sequence(yield)));
    return out;
}

TypedContract liftSupertypes(TypedContract t, const Hierarchy& h) {
    std::set<std::string> parents;
    for (const auto& [child, parent] : h) parents.insert(parent);

    TypeExpr body = t.coroutine;
    Predicate pred;
    if (body.kind() == TypeExpr::Kind::Constrained) {
        pred = body.predicate();
        body = body.base();
    }
    if (body.kind() != TypeExpr::Kind::Coroutine) return t;

    std::vector<std::string> names;
    collectConcrete(body.receive(), names);
    auto used = variablesOf(t.coroutine);
    std::set<std::string> taken(used.begin(), used.end());
    static const char* kFresh[] = {"x", "y", "z", "u", "v", "w"};
    std::size_t counter = 0;
    auto fresh = [&] {
        for (;;) {
            std::size_t i = counter++;
            std::string n = kFresh[i % 6];
            if (i >= 6) n += std::to_string(i / 6);
            if (taken.insert(n).second) return n;
        }
    };

    bool changed = false;
    for (const auto& n : names) {
        if (!parents.count(n)) continue;
        std::string v = fresh();
        body = replaceConcrete(body, n, TypeExpr::variable(v));
        pred.atoms.push_back(SubtypeOf{v, n});
        changed = true;
    }
    if (!changed) return t;
    t.coroutine = normalize(TypeExpr::constrained(body, pred));
    return t;
}

std::vector<TypedContract> typeModel(const ModelAst& ast, const TypeEnv& env) {
    std::vector<TypedContract> out;
    for (const auto& c : ast.contracts) out.push_back(liftSupertypes(typeContract(c, env), env.hierarchy));
    return out;
}

std::vector<std::string> displayNames(const std::vector<TypedContract>& cs) {
    std::map<std::string, int> count;
    for (const auto& c : cs) ++count[c.operation];
    std::vector<std::string> out;
    for (const auto& c : cs) out.push_back(count[c.operation] > 1 ? c.name : c.operation);
    return out;
}

}  // namespace remodel
