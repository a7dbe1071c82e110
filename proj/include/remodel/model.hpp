// SPDX-License-Identifier: Apache-2.0
// REModel subset: syntax tree, parser, printer and symbol collection.
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "remodel/type.hpp"

namespace remodel {

// Source position. Spans never take part in structural equality.
struct SourceSpan {
    int line = 0;
    int col = 0;
    bool operator==(const SourceSpan&) const { return true; }
};

struct TypeRef {
    std::string name;                 // element type for collections
    std::string collection;           // "Set", "Bag", "Sequence", "OrderedSet" or empty
    std::vector<std::string> enumLiterals;
    bool operator==(const TypeRef&) const = default;
};

struct TypedName {
    std::string name;
    std::optional<TypeRef> type;
    bool operator==(const TypedName&) const = default;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { Literal, Ident, Member, Call, Arrow, Unary, Binary, If, Let, Opaque };

    Kind kind = Kind::Opaque;
    // Literal: lexeme; Ident: name; Member/Call/Arrow: member name; Unary/Binary: operator;
    // Opaque: source tokens.
    std::string text;
    bool atPre = false;            // Member and Call
    ExprPtr target;                // Member, Call (may be null), Arrow
    std::vector<ExprPtr> args;     // Call/Arrow arguments, operands, If parts
    std::vector<TypedName> vars;   // Let variables, Arrow iterator
    ExprPtr body;                  // Let body, Arrow iterator body
    SourceSpan span;
};

bool operator==(const Expr& a, const Expr& b);
bool sameExpr(const ExprPtr& a, const ExprPtr& b);

ExprPtr makeIdent(std::string name);
ExprPtr makeUnary(std::string op, ExprPtr operand);
ExprPtr makeBinary(std::string op, ExprPtr lhs, ExprPtr rhs);

struct OperationSig {
    std::string name;
    std::vector<TypedName> params;
    bool operator==(const OperationSig&) const = default;
};

struct PropertyDecl {
    std::string name;
    TypeRef type;
    SourceSpan span;
    bool operator==(const PropertyDecl&) const = default;
};

struct ServiceDecl {
    std::string name;
    std::vector<OperationSig> operations;
    std::vector<PropertyDecl> tempProperties;
    SourceSpan span;
    bool operator==(const ServiceDecl&) const = default;
};

struct ActorDecl {
    std::string name;
    std::optional<std::string> parent;
    std::vector<std::string> useCases;
    std::optional<std::string> description;
    SourceSpan span;
    bool operator==(const ActorDecl&) const = default;
};

struct Definition {
    std::string name;
    TypeRef type;
    ExprPtr value;
    bool operator==(const Definition& o) const {
        return name == o.name && type == o.type && sameExpr(value, o.value);
    }
};

struct ContractAst {
    std::string serviceName;
    std::string operationName;
    std::vector<TypedName> parameters;
    std::optional<TypeRef> returnType;
    std::vector<Definition> definitions;
    ExprPtr precondition;   // null when the section is absent
    ExprPtr postcondition;  // null when the section is absent
    SourceSpan span;

    std::string qualifiedName() const { return serviceName + "::" + operationName; }
    bool operator==(const ContractAst& o) const;
};

// A top-level block the checker does not interpret (UseCaseModel, Interaction, ...).
struct IgnoredRegion {
    std::string keyword;
    std::string text;  // tokens separated by single spaces
    SourceSpan begin;
    SourceSpan end;
    bool operator==(const IgnoredRegion&) const = default;
};

struct ModelAst {
    std::vector<ServiceDecl> services;
    std::vector<ActorDecl> actors;
    std::vector<ContractAst> contracts;
    std::vector<IgnoredRegion> ignored;
    bool operator==(const ModelAst&) const = default;
};

enum class Severity { Error, Warning, Note };
const char* severityName(Severity s);

struct Diagnostic {
    Severity severity = Severity::Error;
    SourceSpan span;
    std::string message;
};

// "file:line:col: severity: message"
std::string formatDiagnostic(const std::string& file, const Diagnostic& d);
std::string diagnosticsToJson(const std::string& file, const std::vector<Diagnostic>& ds);
bool hasErrors(const std::vector<Diagnostic>& ds);

struct ParseResult {
    std::optional<ModelAst> ast;  // present iff no error diagnostics
    std::vector<Diagnostic> diagnostics;
};

ParseResult parseModel(const std::string& text);

// Parses a single expression; malformed input yields an Opaque node and a warning.
ExprPtr parseExpression(const std::string& text, std::vector<Diagnostic>* diags = nullptr);

std::string printExpr(const Expr& e);
std::string printType(const TypeRef& t);
std::string printModel(const ModelAst& ast);

struct FieldInfo {
    std::string service;
    TypeRef declared;
};

struct TypeEnv {
    std::map<std::string, std::map<std::string, FieldInfo>> classFields;  // service -> fields
    std::map<std::string, FieldInfo> systemFields;
    std::set<std::string> systemServices;
    Hierarchy hierarchy;
};

struct SymbolResult {
    std::optional<TypeEnv> env;
    std::vector<Diagnostic> diagnostics;
};

SymbolResult collectSymbols(const ModelAst& ast);

// Flattens `and` (through let bodies) into textual order and rewrites comparisons
// with boolean literals into plain or negated terms.
std::vector<ExprPtr> toConjuncts(const ExprPtr& e);

// Variables introduced by let expressions reachable through `and` chains.
std::vector<TypedName> letBindings(const ExprPtr& e);

}  // namespace remodel
