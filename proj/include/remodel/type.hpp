// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <ostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace remodel {

// Raised when a rule or operation is applied outside its domain
// (head of Void, product conversion of a non-product, violated constraint).
class RuleError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class TypeParseError : public std::runtime_error {
public:
    TypeParseError(const std::string& msg, std::size_t offset)
        : std::runtime_error(msg), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// Length of a list type t^n.
struct Length {
    enum class Kind { Nat, Star, Var };
    Kind kind = Kind::Nat;
    std::size_t n = 0;
    std::string var;

    static Length nat(std::size_t v) { return {Kind::Nat, v, {}}; }
    static Length star() { return {Kind::Star, 0, {}}; }
    static Length variable(std::string name) { return {Kind::Var, 0, std::move(name)}; }
    bool operator==(const Length&) const = default;
};

// x <: Upper
struct SubtypeOf {
    std::string var;
    std::string upper;
    bool operator==(const SubtypeOf&) const = default;
};

// (x, y) notin {(A, B), ...}; a single variable uses 1-tuples.
struct NotInSet {
    std::vector<std::string> vars;
    std::vector<std::vector<std::string>> excluded;
    bool operator==(const NotInSet&) const = default;
};

using ConstraintAtom = std::variant<SubtypeOf, NotInSet>;

// Conjunction of atoms.
struct Predicate {
    std::vector<ConstraintAtom> atoms;
    bool empty() const { return atoms.empty(); }
    bool operator==(const Predicate&) const = default;
};

struct TypeNode;

class TypeExpr {
public:
    enum class Kind { Concrete, Variable, Void, Sequence, Product, Coroutine, Constrained, List };

    TypeExpr();  // Void

    static TypeExpr concrete(std::string name);
    static TypeExpr variable(std::string name);
    static TypeExpr voidType();
    static TypeExpr sequence(std::vector<TypeExpr> items);
    static TypeExpr product(std::vector<TypeExpr> items);
    static TypeExpr coroutine(TypeExpr receive, TypeExpr yield);
    static TypeExpr constrained(TypeExpr base, Predicate pred);
    static TypeExpr listOf(TypeExpr element, Length length);

    Kind kind() const;
    bool isVoid() const { return kind() == Kind::Void; }
    bool isCoroutine() const { return kind() == Kind::Coroutine; }

    // Concrete and Variable
    const std::string& name() const;
    // Sequence and Product
    const std::vector<TypeExpr>& items() const;
    // Coroutine
    const TypeExpr& receive() const;
    const TypeExpr& yield() const;
    // Constrained
    const TypeExpr& base() const;
    const Predicate& predicate() const;
    // List
    const TypeExpr& element() const;
    const Length& length() const;

    bool operator==(const TypeExpr& other) const;
    bool operator!=(const TypeExpr& other) const { return !(*this == other); }

private:
    explicit TypeExpr(std::shared_ptr<const TypeNode> n) : node_(std::move(n)) {}
    std::shared_ptr<const TypeNode> node_;
};

// child -> parent
using Hierarchy = std::map<std::string, std::string>;

// Reflexive-transitive subtype test over a hierarchy.
bool isSubtype(const std::string& sub, const std::string& super, const Hierarchy& h);

// A variable binding value: a type or a list length.
using BindingValue = std::variant<TypeExpr, Length>;

class Bindings {
public:
    Bindings() = default;
    static Bindings failure();

    bool failed() const { return failed_; }
    explicit operator bool() const { return !failed_; }

    // Adds var=value; conflicting values turn this into Failure.
    Bindings& bind(const std::string& var, const BindingValue& value);
    // Union of two binding sets; Failure absorbs.
    Bindings& join(const Bindings& other);

    const BindingValue* find(const std::string& var) const;
    const std::map<std::string, BindingValue>& map() const { return map_; }
    std::size_t size() const { return map_.size(); }
    bool operator==(const Bindings&) const = default;

private:
    bool failed_ = false;
    std::map<std::string, BindingValue> map_;
};

TypeExpr normalize(const TypeExpr& t);
TypeExpr head(const TypeExpr& t);
TypeExpr tail(const TypeExpr& t);
Bindings match(const TypeExpr& candidate, const TypeExpr& pattern, const Hierarchy& h = {});
TypeExpr substitute(const TypeExpr& t, const Bindings& d, const Hierarchy& h = {});
TypeExpr productToSequence(const TypeExpr& p);
bool evalConstraint(const Predicate& p, const Bindings& d, const Hierarchy& h = {});

// Evaluates only the atoms whose variables are all bound; false if any of those fails.
bool constraintHoldsSoFar(const Predicate& p, const Bindings& d, const Hierarchy& h = {});

// Coroutine view of a possibly constrained coroutine.
bool isCoroutineLike(const TypeExpr& t);
const TypeExpr& coroutineBase(const TypeExpr& t);
// Rebuilds t with new parts, keeping its constraint.
TypeExpr withParts(const TypeExpr& t, TypeExpr receive, TypeExpr yield);

// Number of top-level items (Void = 0, Sequence = size, otherwise 1).
std::size_t itemCount(const TypeExpr& t);
std::vector<std::string> variablesOf(const TypeExpr& t);

std::string toString(const TypeExpr& t);
std::string toString(const Predicate& p);
std::string toString(const BindingValue& v);
TypeExpr parseType(const std::string& text);

inline std::ostream& operator<<(std::ostream& os, const TypeExpr& t) { return os << toString(t); }

}  // namespace remodel
