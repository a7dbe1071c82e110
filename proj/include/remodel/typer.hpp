// SPDX-License-Identifier: Apache-2.0
// Infers a coroutine type per contract: precondition -> receive, postcondition -> yield.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "remodel/model.hpp"
#include "remodel/type.hpp"

namespace remodel {

enum class NoteKind { UnknownIdentifier, ConditionalPostcondition, Unsupported, EmptyContract };

struct TypingNote {
    NoteKind kind;
    Severity severity = Severity::Warning;
    SourceSpan span;
    std::string message;
};

// Identifier environment for one contract. Earlier origins shadow later ones.
class Gamma {
public:
    enum class Origin { Local, Definition, Parameter, ClassField, SystemField };
    struct Entry {
        Origin origin;
        TypeExpr type;
    };

    static Gamma forContract(const ContractAst& c, const TypeEnv& env);

    void bind(const std::string& name, Origin origin, TypeExpr type);
    std::optional<Entry> lookup(const std::string& name) const;
    bool isField(const std::string& name) const;

private:
    std::map<std::string, Entry> entries_;
};

// Declared type as a type expression; collections become `t^*`.
TypeExpr typeOf(const TypeRef& t);

TypeExpr required(const Expr& e, const Gamma& g, std::vector<TypingNote>* notes = nullptr);
TypeExpr added(const Expr& e, const Gamma& g, std::vector<TypingNote>* notes = nullptr);
TypeExpr deleted(const Expr& e, const Gamma& g, std::vector<TypingNote>* notes = nullptr);

struct TypedContract {
    std::string name;       // Service::operation
    std::string operation;
    TypeExpr coroutine;
    std::vector<TypingNote> notes;
};

TypedContract typeContract(const ContractAst& c, const TypeEnv& env);
TypedContract liftSupertypes(TypedContract t, const Hierarchy& h);

// Types and lifts every contract in declaration order.
std::vector<TypedContract> typeModel(const ModelAst& ast, const TypeEnv& env);

// Operation names, qualified with the service where an operation name repeats.
std::vector<std::string> displayNames(const std::vector<TypedContract>& cs);

}  // namespace remodel
