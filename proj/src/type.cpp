// SPDX-License-Identifier: Apache-2.0
#include "remodel/type.hpp"

#include <algorithm>
#include <set>

namespace remodel {

struct Concrete {
    std::string name;
};
struct Variable {
    std::string name;
};
struct VoidT {};
struct Sequence {
    std::vector<TypeExpr> items;
};
struct Product {
    std::vector<TypeExpr> items;
};
struct Coroutine {
    TypeExpr receive;
    TypeExpr yield;
};
struct Constrained {
    TypeExpr base;
    Predicate pred;
};
struct ListOf {
    TypeExpr element;
    Length length;
};

struct TypeNode {
    std::variant<Concrete, Variable, VoidT, Sequence, Product, Coroutine, Constrained, ListOf> v;
};

namespace {

const std::shared_ptr<const TypeNode>& voidNode() {
    static const auto n = std::make_shared<const TypeNode>(TypeNode{VoidT{}});
    return n;
}

template <class T>
const T& as(const std::shared_ptr<const TypeNode>& n, const char* what) {
    if (auto p = std::get_if<T>(&n->v)) return *p;
    throw RuleError(std::string("type is not a ") + what);
}

}  // namespace

TypeExpr::TypeExpr() : node_(voidNode()) {}

TypeExpr TypeExpr::concrete(std::string name) {
    return TypeExpr(std::make_shared<const TypeNode>(TypeNode{Concrete{std::move(name)}}));
}
TypeExpr TypeExpr::variable(std::string name) {
    return TypeExpr(std::make_shared<const TypeNode>(TypeNode{Variable{std::move(name)}}));
}
TypeExpr TypeExpr::voidType() { return TypeExpr(); }
TypeExpr TypeExpr::sequence(std::vector<TypeExpr> items) {
    return TypeExpr(std::make_shared<const TypeNode>(TypeNode{Sequence{std::move(items)}}));
}
TypeExpr TypeExpr::product(std::vector<TypeExpr> items) {
    return TypeExpr(std::make_shared<const TypeNode>(TypeNode{Product{std::move(items)}}));
}
TypeExpr TypeExpr::coroutine(TypeExpr receive, TypeExpr yield) {
    return TypeExpr(std::make_shared<const TypeNode>(
        TypeNode{Coroutine{std::move(receive), std::move(yield)}}));
}
TypeExpr TypeExpr::constrained(TypeExpr base, Predicate pred) {
    return TypeExpr(
        std::make_shared<const TypeNode>(TypeNode{Constrained{std::move(base), std::move(pred)}}));
}
TypeExpr TypeExpr::listOf(TypeExpr element, Length length) {
    return TypeExpr(
        std::make_shared<const TypeNode>(TypeNode{ListOf{std::move(element), std::move(length)}}));
}

TypeExpr::Kind TypeExpr::kind() const { return static_cast<Kind>(node_->v.index()); }

const std::string& TypeExpr::name() const {
    if (auto c = std::get_if<Concrete>(&node_->v)) return c->name;
    return as<Variable>(node_, "named type").name;
}
const std::vector<TypeExpr>& TypeExpr::items() const {
    if (auto s = std::get_if<Sequence>(&node_->v)) return s->items;
    return as<Product>(node_, "sequence or product").items;
}
const TypeExpr& TypeExpr::receive() const { return as<Coroutine>(node_, "coroutine").receive; }
const TypeExpr& TypeExpr::yield() const { return as<Coroutine>(node_, "coroutine").yield; }
const TypeExpr& TypeExpr::base() const { return as<Constrained>(node_, "constrained type").base; }
const Predicate& TypeExpr::predicate() const {
    return as<Constrained>(node_, "constrained type").pred;
}
const TypeExpr& TypeExpr::element() const { return as<ListOf>(node_, "list").element; }
const Length& TypeExpr::length() const { return as<ListOf>(node_, "list").length; }

bool TypeExpr::operator==(const TypeExpr& o) const {
    if (node_ == o.node_) return true;
    if (kind() != o.kind()) return false;
    switch (kind()) {
        case Kind::Concrete:
        case Kind::Variable:
            return name() == o.name();
        case Kind::Void:
            return true;
        case Kind::Sequence:
        case Kind::Product:
            return items() == o.items();
        case Kind::Coroutine:
            return receive() == o.receive() && yield() == o.yield();
        case Kind::Constrained:
            return base() == o.base() && predicate() == o.predicate();
        case Kind::List:
            return element() == o.element() && length() == o.length();
    }
    return false;
}

bool isSubtype(const std::string& sub, const std::string& super, const Hierarchy& h) {
    std::string cur = sub;
    for (std::size_t guard = 0; guard <= h.size(); ++guard) {
        if (cur == super) return true;
        auto it = h.find(cur);
        if (it == h.end()) return false;
        cur = it->second;
    }
    return false;
}

// ---- Bindings ----

Bindings Bindings::failure() {
    Bindings b;
    b.failed_ = true;
    return b;
}

Bindings& Bindings::bind(const std::string& var, const BindingValue& value) {
    if (failed_) return *this;
    auto [it, inserted] = map_.emplace(var, value);
    if (!inserted && !(it->second == value)) {
        failed_ = true;
        map_.clear();
    }
    return *this;
}

Bindings& Bindings::join(const Bindings& other) {
    if (failed_) return *this;
    if (other.failed_) {
        *this = failure();
        return *this;
    }
    for (const auto& [k, v] : other.map_) {
        bind(k, v);
        if (failed_) break;
    }
    return *this;
}

const BindingValue* Bindings::find(const std::string& var) const {
    auto it = map_.find(var);
    return it == map_.end() ? nullptr : &it->second;
}

// ---- normalize ----

namespace {

void flattenInto(const TypeExpr& t, std::vector<TypeExpr>& out) {
    if (t.kind() == TypeExpr::Kind::Void) return;
    if (t.kind() == TypeExpr::Kind::Sequence) {
        for (const auto& i : t.items()) flattenInto(i, out);
        return;
    }
    out.push_back(t);
}

TypeExpr fromItems(std::vector<TypeExpr> items) {
    if (items.empty()) return TypeExpr::voidType();
    if (items.size() == 1) return items.front();
    return TypeExpr::sequence(std::move(items));
}

}  // namespace

TypeExpr normalize(const TypeExpr& t) {
    using K = TypeExpr::Kind;
    switch (t.kind()) {
        case K::Concrete:
        case K::Variable:
        case K::Void:
            return t;
        case K::Sequence: {
            std::vector<TypeExpr> out;
            for (const auto& i : t.items()) flattenInto(normalize(i), out);
            return fromItems(std::move(out));
        }
        case K::Product: {
            std::vector<TypeExpr> out;
            out.reserve(t.items().size());
            for (const auto& i : t.items()) out.push_back(normalize(i));
            return TypeExpr::product(std::move(out));
        }
        case K::Coroutine:
            return TypeExpr::coroutine(normalize(t.receive()), normalize(t.yield()));
        case K::Constrained: {
            TypeExpr b = normalize(t.base());
            Predicate p = t.predicate();
            if (b.kind() == K::Constrained) {
                Predicate merged = b.predicate();
                merged.atoms.insert(merged.atoms.end(), p.atoms.begin(), p.atoms.end());
                p = std::move(merged);
                b = b.base();
            }
            if (p.empty()) return b;
            return TypeExpr::constrained(std::move(b), std::move(p));
        }
        case K::List: {
            TypeExpr e = normalize(t.element());
            const Length& len = t.length();
            if (e.isVoid()) return TypeExpr::voidType();
            if (len.kind == Length::Kind::Nat) {
                if (len.n == 0) return TypeExpr::voidType();
                if (len.n == 1) return e;
            }
            return TypeExpr::listOf(std::move(e), len);
        }
    }
    return t;
}

// ---- head / tail ----

TypeExpr head(const TypeExpr& t) {
    using K = TypeExpr::Kind;
    switch (t.kind()) {
        case K::Void:
            throw RuleError("head of Void");
        case K::Sequence: {
            // Unnormalized input may hold empty or Void-led sequences.
            TypeExpr n = normalize(t);
            if (n.kind() != K::Sequence) return head(n);
            return head(n.items().front());
        }
        case K::List:
            if (t.length().kind == Length::Kind::Nat && t.length().n == 0)
                throw RuleError("head of an empty list");
            return t.element();
        default:
            return t;
    }
}

TypeExpr tail(const TypeExpr& t) {
    using K = TypeExpr::Kind;
    switch (t.kind()) {
        case K::Void:
            throw RuleError("tail of Void");
        case K::Sequence: {
            TypeExpr n = normalize(t);
            if (n.kind() != K::Sequence) return tail(n);
            std::vector<TypeExpr> rest;
            rest.push_back(tail(n.items().front()));
            rest.insert(rest.end(), n.items().begin() + 1, n.items().end());
            return normalize(TypeExpr::sequence(std::move(rest)));
        }
        case K::List: {
            const Length& len = t.length();
            if (len.kind == Length::Kind::Nat) {
                if (len.n == 0) throw RuleError("tail of an empty list");
                return normalize(TypeExpr::listOf(t.element(), Length::nat(len.n - 1)));
            }
            return t;
        }
        default:
            return TypeExpr::voidType();
    }
}

// ---- coroutine helpers ----

bool isCoroutineLike(const TypeExpr& t) {
    if (t.kind() == TypeExpr::Kind::Coroutine) return true;
    return t.kind() == TypeExpr::Kind::Constrained && t.base().isCoroutine();
}

const TypeExpr& coroutineBase(const TypeExpr& t) {
    if (t.kind() == TypeExpr::Kind::Constrained) return t.base();
    if (!t.isCoroutine()) throw RuleError("not a coroutine: " + toString(t));
    return t;
}

TypeExpr withParts(const TypeExpr& t, TypeExpr receive, TypeExpr yield) {
    TypeExpr co = TypeExpr::coroutine(std::move(receive), std::move(yield));
    if (t.kind() == TypeExpr::Kind::Constrained)
        return TypeExpr::constrained(std::move(co), t.predicate());
    return co;
}

std::size_t itemCount(const TypeExpr& t) {
    if (t.isVoid()) return 0;
    if (t.kind() == TypeExpr::Kind::Sequence) return t.items().size();
    return 1;
}

namespace {

void collectVars(const TypeExpr& t, std::vector<std::string>& out) {
    using K = TypeExpr::Kind;
    auto add = [&](const std::string& v) {
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    };
    switch (t.kind()) {
        case K::Variable:
            add(t.name());
            break;
        case K::Sequence:
        case K::Product:
            for (const auto& i : t.items()) collectVars(i, out);
            break;
        case K::Coroutine:
            collectVars(t.receive(), out);
            collectVars(t.yield(), out);
            break;
        case K::Constrained:
            collectVars(t.base(), out);
            break;
        case K::List:
            collectVars(t.element(), out);
            if (t.length().kind == Length::Kind::Var) add(t.length().var);
            break;
        default:
            break;
    }
}

}  // namespace

std::vector<std::string> variablesOf(const TypeExpr& t) {
    std::vector<std::string> out;
    collectVars(t, out);
    return out;
}

// ---- constraints ----

namespace {

// Returns the bound concrete name of var, or nullopt if unbound / not a named type.
std::optional<std::string> boundName(const Bindings& d, const std::string& var) {
    const BindingValue* v = d.find(var);
    if (!v) return std::nullopt;
    if (auto t = std::get_if<TypeExpr>(v)) {
        if (t->kind() == TypeExpr::Kind::Concrete || t->kind() == TypeExpr::Kind::Variable)
            return t->name();
        return toString(*t);
    }
    return toString(*v);
}

std::vector<std::string> atomVars(const ConstraintAtom& a) {
    if (auto s = std::get_if<SubtypeOf>(&a)) return {s->var};
    return std::get<NotInSet>(a).vars;
}

bool atomBound(const ConstraintAtom& a, const Bindings& d) {
    for (const auto& v : atomVars(a))
        if (!d.find(v)) return false;
    return true;
}

bool evalAtom(const ConstraintAtom& a, const Bindings& d, const Hierarchy& h) {
    if (auto s = std::get_if<SubtypeOf>(&a)) {
        auto n = boundName(d, s->var);
        if (!n) throw RuleError("unbound constraint variable " + s->var);
        return isSubtype(*n, s->upper, h);
    }
    const auto& nis = std::get<NotInSet>(a);
    std::vector<std::string> values;
    for (const auto& v : nis.vars) {
        auto n = boundName(d, v);
        if (!n) throw RuleError("unbound constraint variable " + v);
        values.push_back(*n);
    }
    return std::find(nis.excluded.begin(), nis.excluded.end(), values) == nis.excluded.end();
}

}  // namespace

bool evalConstraint(const Predicate& p, const Bindings& d, const Hierarchy& h) {
    if (d.failed()) throw RuleError("constraint evaluated under Failure");
    for (const auto& a : p.atoms)
        if (!evalAtom(a, d, h)) return false;
    return true;
}

bool constraintHoldsSoFar(const Predicate& p, const Bindings& d, const Hierarchy& h) {
    if (d.failed()) return false;
    for (const auto& a : p.atoms)
        if (atomBound(a, d) && !evalAtom(a, d, h)) return false;
    return true;
}

// ---- match ----

namespace {

using K = TypeExpr::Kind;

Bindings matchLength(const Length& cand, const Length& pat) {
    Bindings d;
    switch (pat.kind) {
        case Length::Kind::Star:
            return d;
        case Length::Kind::Var:
            return d.bind(pat.var, cand);
        case Length::Kind::Nat:
            if (cand.kind == Length::Kind::Nat && cand.n == pat.n) return d;
            return Bindings::failure();
    }
    return Bindings::failure();
}

Bindings matchImpl(const TypeExpr& c, const TypeExpr& p, const Hierarchy& h);

Bindings matchItemsAgainstList(const std::vector<TypeExpr>& items, const TypeExpr& pat,
                               const Hierarchy& h) {
    Bindings d;
    for (const auto& i : items) {
        d.join(matchImpl(i, pat.element(), h));
        if (d.failed()) return d;
    }
    return d.join(matchLength(Length::nat(items.size()), pat.length()));
}

Bindings matchImpl(const TypeExpr& c0, const TypeExpr& p, const Hierarchy& h) {
    // Constraints on the candidate carry no obligation for the pattern.
    const TypeExpr& c = (c0.kind() == K::Constrained) ? c0.base() : c0;

    switch (p.kind()) {
        case K::Variable:
            return Bindings().bind(p.name(), c0);
        case K::Constrained: {
            const TypeExpr& b = p.base();
            Bindings d;
            if (b.isCoroutine()) {
                if (!c.isCoroutine()) return Bindings::failure();
                d = matchImpl(c.receive(), b.receive(), h);
                d.join(matchImpl(c.yield(), b.yield(), h));
            } else {
                d = matchImpl(c, b.kind() == K::Sequence ? head(b) : b, h);
            }
            if (d.failed() || !constraintHoldsSoFar(p.predicate(), d, h))
                return Bindings::failure();
            return d;
        }
        case K::Coroutine: {
            if (!c.isCoroutine()) return Bindings::failure();
            Bindings d = matchImpl(c.receive(), p.receive(), h);
            return d.join(matchImpl(c.yield(), p.yield(), h));
        }
        case K::Concrete:
            if (c.kind() == K::Concrete && isSubtype(c.name(), p.name(), h)) return {};
            return Bindings::failure();
        case K::Void:
            return c.isVoid() ? Bindings() : Bindings::failure();
        case K::Sequence:
        case K::Product: {
            if (c.kind() == K::List && p.kind() == K::Sequence &&
                c.length().kind == Length::Kind::Nat && c.length().n == p.items().size()) {
                Bindings d;
                for (const auto& pi : p.items()) {
                    d.join(matchImpl(c.element(), pi, h));
                    if (d.failed()) return d;
                }
                return d;
            }
            if (c.kind() != p.kind() || c.items().size() != p.items().size())
                return Bindings::failure();
            Bindings d;
            for (std::size_t i = 0; i < p.items().size() && !d.failed(); ++i)
                d.join(matchImpl(c.items()[i], p.items()[i], h));
            return d;
        }
        case K::List: {
            if (c.kind() == K::List) {
                if (p.length().kind == Length::Kind::Nat && c.length().kind != Length::Kind::Nat)
                    return Bindings::failure();
                Bindings d = matchImpl(c.element(), p.element(), h);
                return d.join(matchLength(c.length(), p.length()));
            }
            if (c.kind() == K::Sequence) return matchItemsAgainstList(c.items(), p, h);
            if (c.isVoid()) return matchLength(Length::nat(0), p.length());
            return matchItemsAgainstList({c}, p, h);
        }
    }
    return Bindings::failure();
}

}  // namespace

Bindings match(const TypeExpr& candidate, const TypeExpr& pattern, const Hierarchy& h) {
    return matchImpl(candidate, pattern, h);
}

// ---- substitute ----

namespace {

// Projects a NotInSet atom onto its unbound variables. Returns nullopt when the
// atom is fully decided; sets `violated` when a decided atom fails.
std::optional<ConstraintAtom> reduceAtom(const ConstraintAtom& a, const Bindings& d,
                                         const Hierarchy& h, bool& violated) {
    if (atomBound(a, d)) {
        violated = !evalAtom(a, d, h);
        return std::nullopt;
    }
    if (std::holds_alternative<SubtypeOf>(a)) return a;
    const auto& nis = std::get<NotInSet>(a);
    NotInSet out;
    std::vector<std::size_t> freeIdx;
    for (std::size_t i = 0; i < nis.vars.size(); ++i) {
        if (!d.find(nis.vars[i])) {
            out.vars.push_back(nis.vars[i]);
            freeIdx.push_back(i);
        }
    }
    if (out.vars.size() == nis.vars.size()) return a;
    for (const auto& tup : nis.excluded) {
        bool agrees = true;
        for (std::size_t i = 0; i < nis.vars.size() && agrees; ++i) {
            auto n = boundName(d, nis.vars[i]);
            if (n && *n != tup[i]) agrees = false;
        }
        if (!agrees) continue;
        std::vector<std::string> projected;
        for (auto i : freeIdx) projected.push_back(tup[i]);
        if (std::find(out.excluded.begin(), out.excluded.end(), projected) == out.excluded.end())
            out.excluded.push_back(std::move(projected));
    }
    if (out.excluded.empty()) return std::nullopt;
    return out;
}

TypeExpr substImpl(const TypeExpr& t, const Bindings& d, const Hierarchy& h) {
    switch (t.kind()) {
        case K::Variable: {
            if (const BindingValue* v = d.find(t.name()))
                if (auto ty = std::get_if<TypeExpr>(v)) return *ty;
            return t;
        }
        case K::Sequence:
        case K::Product: {
            std::vector<TypeExpr> out;
            for (const auto& i : t.items()) out.push_back(substImpl(i, d, h));
            return t.kind() == K::Sequence ? TypeExpr::sequence(std::move(out))
                                           : TypeExpr::product(std::move(out));
        }
        case K::Coroutine:
            return TypeExpr::coroutine(substImpl(t.receive(), d, h), substImpl(t.yield(), d, h));
        case K::List: {
            Length len = t.length();
            if (len.kind == Length::Kind::Var) {
                if (const BindingValue* v = d.find(len.var))
                    if (auto l = std::get_if<Length>(v)) len = *l;
            }
            return TypeExpr::listOf(substImpl(t.element(), d, h), len);
        }
        case K::Constrained: {
            Predicate kept;
            for (const auto& a : t.predicate().atoms) {
                bool violated = false;
                auto r = reduceAtom(a, d, h, violated);
                if (violated) throw RuleError("substitution violates constraint " +
                                              toString(t.predicate()));
                if (r) kept.atoms.push_back(*r);
            }
            TypeExpr b = substImpl(t.base(), d, h);
            if (kept.empty()) return b;
            return TypeExpr::constrained(std::move(b), std::move(kept));
        }
        default:
            return t;
    }
}

}  // namespace

TypeExpr substitute(const TypeExpr& t, const Bindings& d, const Hierarchy& h) {
    if (d.failed()) throw RuleError("substitute with Failure bindings");
    if (d.size() == 0) return normalize(t);
    return normalize(substImpl(t, d, h));
}

TypeExpr productToSequence(const TypeExpr& p) {
    if (p.kind() != K::Product) throw RuleError("productToSequence on a non-product");
    return normalize(TypeExpr::sequence(p.items()));
}

}  // namespace remodel
