// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "remodel/model.hpp"
#include "support/fixtures.hpp"

using namespace remodel;
using remodel::testing::readFixture;

namespace {

ModelAst parseOk(const std::string& text) {
    ParseResult r = parseModel(text);
    std::string msgs;
    for (const auto& d : r.diagnostics) msgs += formatDiagnostic("<in>", d) + "\n";
    EXPECT_TRUE(r.ast.has_value()) << msgs;
    return r.ast ? *r.ast : ModelAst{};
}

const Diagnostic* firstError(const ParseResult& r) {
    for (const auto& d : r.diagnostics)
        if (d.severity == Severity::Error) return &d;
    return nullptr;
}

ExprPtr E(const std::string& s) {
    std::vector<Diagnostic> diags;
    ExprPtr e = parseExpression(s, &diags);
    EXPECT_TRUE(diags.empty()) << s;
    return e;
}

const ContractAst& contract(const ModelAst& m, const std::string& op) {
    for (const auto& c : m.contracts)
        if (c.operationName == op) return c;
    throw std::runtime_error("no contract " + op);
}

const char* kSmall = R"(
Service ShopSystem {
    [Operation]
    open(id)

    [TempProperty]
    Current : Store
    Mode : PaymentMethod[CASH|CARD]
    Items : Set(Item)
}

Contract ShopSystem::open(id : Integer) : Boolean {
    definition:
        s:Store = Store.allInstance()->any(x:Store | x.Id = id)
    precondition:
        s.oclIsUndefined() = false
    postcondition:
        self.Current = s and result = true
}
)";

}  // namespace

// ---- declarations ----

TEST(Parse, ServiceSectionsAndTypes) {
    ModelAst m = parseOk(kSmall);
    ASSERT_EQ(m.services.size(), 1u);
    const ServiceDecl& s = m.services[0];
    EXPECT_EQ(s.name, "ShopSystem");
    ASSERT_EQ(s.operations.size(), 1u);
    EXPECT_EQ(s.operations[0].name, "open");
    ASSERT_EQ(s.tempProperties.size(), 3u);
    EXPECT_EQ(s.tempProperties[0].type.name, "Store");
    EXPECT_EQ(s.tempProperties[1].type.enumLiterals, (std::vector<std::string>{"CASH", "CARD"}));
    EXPECT_EQ(s.tempProperties[2].type.collection, "Set");
    EXPECT_EQ(s.tempProperties[2].type.name, "Item");
}

TEST(Parse, ContractHeaderAndSections) {
    ModelAst m = parseOk(kSmall);
    ASSERT_EQ(m.contracts.size(), 1u);
    const ContractAst& c = m.contracts[0];
    EXPECT_EQ(c.qualifiedName(), "ShopSystem::open");
    ASSERT_EQ(c.parameters.size(), 1u);
    EXPECT_EQ(c.parameters[0].name, "id");
    EXPECT_EQ(c.parameters[0].type->name, "Integer");
    EXPECT_EQ(c.returnType->name, "Boolean");
    ASSERT_EQ(c.definitions.size(), 1u);
    EXPECT_EQ(c.definitions[0].name, "s");
    EXPECT_EQ(c.definitions[0].type.name, "Store");
    ASSERT_TRUE(c.precondition);
    ASSERT_TRUE(c.postcondition);
}

TEST(Parse, CommentsAreIgnored) {
    ModelAst a = parseOk(kSmall);
    std::string commented = std::string("// leading\n/* block\n comment */") + kSmall;
    ModelAst b = parseOk(commented);
    EXPECT_EQ(a, b);
}

TEST(Parse, ActorsWithDescriptionAndParent) {
    ModelAst m = parseOk(readFixture("library.remodel"));
    ASSERT_EQ(m.actors.size(), 3u);
    EXPECT_EQ(m.actors[0].name, "User");
    EXPECT_FALSE(m.actors[0].parent);
    EXPECT_EQ(m.actors[0].useCases.size(), 5u);
    EXPECT_EQ(m.actors[1].parent.value_or(""), "User");
    EXPECT_EQ(m.actors[1].description.value_or(""), "The faculty user");
}

TEST(Parse, UnknownBlocksBecomeIgnoredRegions) {
    ModelAst m = parseOk(readFixture("cocome.remodel"));
    ASSERT_EQ(m.ignored.size(), 2u);
    EXPECT_EQ(m.ignored[0].keyword, "UseCaseModel");
    EXPECT_EQ(m.ignored[1].keyword, "Interaction");
    EXPECT_EQ(m.contracts.size(), 11u);
    EXPECT_EQ(m.services.size(), 5u);
}

TEST(Parse, ConditionalPostcondition) {
    ModelAst m = parseOk(readFixture("atm.remodel"));
    const ContractAst& c = contract(m, "inputCard");
    ASSERT_TRUE(c.postcondition);
    EXPECT_EQ(c.postcondition->kind, Expr::Kind::If);
}

// ---- diagnostics ----

TEST(Diagnostics, UnclosedBraceReportsPosition) {
    ParseResult r = parseModel(readFixture("broken.remodel"));
    EXPECT_FALSE(r.ast);
    const Diagnostic* d = firstError(r);
    ASSERT_NE(d, nullptr);
    EXPECT_EQ(d->span.line, 6);
    EXPECT_NE(d->message.find("never closed"), std::string::npos);
}

TEST(Diagnostics, BadEnumReportsPosition) {
    ParseResult r = parseModel(readFixture("bad_enum.remodel"));
    EXPECT_FALSE(r.ast);
    const Diagnostic* d = firstError(r);
    ASSERT_NE(d, nullptr);
    EXPECT_EQ(d->span.line, 3);
    EXPECT_NE(d->message.find("enum"), std::string::npos);
}

TEST(Diagnostics, DuplicatePropertyIsAnError) {
    ParseResult r = parseModel("Service S {\n [TempProperty]\n A : X\n A : Y\n}\n");
    const Diagnostic* d = firstError(r);
    ASSERT_NE(d, nullptr);
    EXPECT_EQ(d->span.line, 4);
}

TEST(Diagnostics, DuplicateSectionIsAnError) {
    ParseResult r = parseModel(
        "Service S {\n}\nContract S::f() : Boolean {\n precondition:\n true\n precondition:\n true\n}\n");
    EXPECT_NE(firstError(r), nullptr);
}

TEST(Diagnostics, MalformedHeaderIsAnError) {
    ParseResult r = parseModel("Service S {\n}\nContract S:f() : Boolean {\n}\n");
    const Diagnostic* d = firstError(r);
    ASSERT_NE(d, nullptr);
    EXPECT_NE(d->message.find("malformed contract header"), std::string::npos);
}

TEST(Diagnostics, BadExpressionIsKeptOpaqueWithWarning) {
    ParseResult r = parseModel(
        "Service S {\n}\nContract S::f() : Boolean {\n precondition:\n  x = \n postcondition:\n  true\n}\n");
    ASSERT_TRUE(r.ast);
    ASSERT_EQ(r.diagnostics.size(), 1u);
    EXPECT_EQ(r.diagnostics[0].severity, Severity::Warning);
    const ContractAst& c = r.ast->contracts[0];
    EXPECT_EQ(c.precondition->kind, Expr::Kind::Opaque);
    ASSERT_TRUE(c.postcondition);
    EXPECT_EQ(c.postcondition->kind, Expr::Kind::Literal);
}

TEST(Diagnostics, FormattedAsFileLineColumn) {
    Diagnostic d{Severity::Error, {3, 7}, "boom"};
    EXPECT_EQ(formatDiagnostic("m.remodel", d), "m.remodel:3:7: error: boom");
    std::string json = diagnosticsToJson("m.remodel", {d});
    EXPECT_NE(json.find("\"line\": 3"), std::string::npos);
    EXPECT_NE(json.find("\"column\": 7"), std::string::npos);
}

// ---- expressions ----

TEST(Expression, PrecedenceOfAndOverOr) {
    EXPECT_EQ(printExpr(*E("a or b and c")), printExpr(*E("a or (b and c)")));
    EXPECT_EQ(printExpr(*E("a = b and c")), printExpr(*E("(a = b) and c")));
}

TEST(Expression, AtPreAndArrowCalls) {
    ExprPtr e = E("item.StockNumber = item.StockNumber@pre - quantity");
    ASSERT_EQ(e->kind, Expr::Kind::Binary);
    const ExprPtr& rhs = e->args[1];
    ASSERT_EQ(rhs->kind, Expr::Kind::Binary);
    EXPECT_TRUE(rhs->args[0]->atPre);
    ExprPtr a = E("Store.allInstance()->any(s:Store | s.Id = id)");
    EXPECT_EQ(a->kind, Expr::Kind::Arrow);
    EXPECT_EQ(a->text, "any");
    ASSERT_EQ(a->vars.size(), 1u);
    EXPECT_EQ(a->vars[0].name, "s");
}

TEST(Expression, PrintParseRoundTrip) {
    for (const char* s : {"a and (b or not c)", "x.y@pre + 3 * z", "if a then b else c endif",
                          "let s:Sale in s.oclIsNew() and self.CurrentSale = s",
                          "Item.allInstance()->includes(i)", "-x <= y", "a implies b xor c"}) {
        ExprPtr e = E(s);
        ExprPtr again = E(printExpr(*e));
        EXPECT_TRUE(sameExpr(e, again)) << s << " -> " << printExpr(*e);
    }
}

// ---- printing ----

TEST(Print, FixturesRoundTrip) {
    for (const char* f : {"cocome.remodel", "cocome_missing_sale.remodel", "atm.remodel",
                          "library.remodel"}) {
        ModelAst m = parseOk(readFixture(f));
        std::string printed = printModel(m);
        ModelAst again = parseOk(printed);
        EXPECT_EQ(m, again) << f;
        EXPECT_EQ(printModel(again), printed) << f;
    }
}

// ---- symbols ----

TEST(Symbols, CollectsFieldsAndHierarchy) {
    ModelAst m = parseOk(readFixture("cocome.remodel"));
    SymbolResult r = collectSymbols(m);
    ASSERT_TRUE(r.env);
    EXPECT_TRUE(r.env->systemServices.count("CoCoMESystem"));
    EXPECT_TRUE(r.env->systemFields.count("CurrentStore"));
    EXPECT_TRUE(r.env->classFields.at("ProcessSaleService").count("CurrentSale"));
    EXPECT_FALSE(r.env->systemFields.count("CurrentSale"));

    SymbolResult lib = collectSymbols(parseOk(readFixture("library.remodel")));
    ASSERT_TRUE(lib.env);
    EXPECT_EQ(lib.env->hierarchy.at("Faculty"), "User");
    EXPECT_EQ(lib.env->hierarchy.at("Student"), "User");
}

TEST(Symbols, DuplicateService) {
    SymbolResult r = collectSymbols(parseOk("Service S {\n}\nService S {\n}\n"));
    EXPECT_FALSE(r.env);
    ASSERT_FALSE(r.diagnostics.empty());
    EXPECT_EQ(r.diagnostics[0].span.line, 3);
}

TEST(Symbols, UnknownParentActor) {
    SymbolResult r = collectSymbols(parseOk("Actor A extends Nobody {\n}\n"));
    EXPECT_FALSE(r.env);
    ASSERT_FALSE(r.diagnostics.empty());
    EXPECT_NE(r.diagnostics[0].message.find("Nobody"), std::string::npos);
}

TEST(Symbols, InheritanceCycle) {
    SymbolResult r = collectSymbols(parseOk("Actor A extends B {\n}\nActor B extends A {\n}\n"));
    EXPECT_FALSE(r.env);
    ASSERT_FALSE(r.diagnostics.empty());
    EXPECT_NE(r.diagnostics[0].message.find("cycle"), std::string::npos);
}

TEST(Symbols, ContractOnUndeclaredService) {
    SymbolResult r =
        collectSymbols(parseOk("Contract Ghost::f() : Boolean {\n postcondition:\n true\n}\n"));
    EXPECT_FALSE(r.env);
    ASSERT_FALSE(r.diagnostics.empty());
    EXPECT_NE(r.diagnostics[0].message.find("Ghost"), std::string::npos);
}

// ---- conjuncts ----

TEST(Conjuncts, EnterItemPrecondition) {
    ModelAst m = parseOk(readFixture("cocome.remodel"));
    auto cs = toConjuncts(contract(m, "enterItem").precondition);
    ASSERT_EQ(cs.size(), 4u);
    EXPECT_TRUE(sameExpr(cs[0], E("not CurrentSale.oclIsUndefined()")));
    EXPECT_TRUE(sameExpr(cs[1], E("not CurrentSale.IsComplete")));
    EXPECT_TRUE(sameExpr(cs[2], E("not item.oclIsUndefined()")));
    EXPECT_TRUE(sameExpr(cs[3], E("item.StockNumber > 0")));
}

TEST(Conjuncts, NestingDoesNotMatter) {
    auto a = toConjuncts(E("a and (b and c)"));
    auto b = toConjuncts(E("(a and b) and c"));
    ASSERT_EQ(a.size(), 3u);
    ASSERT_EQ(b.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_TRUE(sameExpr(a[i], b[i]));
}

TEST(Conjuncts, BooleanComparisonsNormalize) {
    auto expect1 = [](const std::string& in, const std::string& out) {
        auto cs = toConjuncts(E(in));
        ASSERT_EQ(cs.size(), 1u) << in;
        EXPECT_TRUE(sameExpr(cs[0], E(out))) << in << " gave " << printExpr(*cs[0]);
    };
    expect1("x.oclIsUndefined() = false", "not x.oclIsUndefined()");
    expect1("false = x.oclIsUndefined()", "not x.oclIsUndefined()");
    expect1("x.oclIsUndefined() <> true", "not x.oclIsUndefined()");
    expect1("x.oclIsUndefined() = true", "x.oclIsUndefined()");
    expect1("not not x.oclIsUndefined()", "x.oclIsUndefined()");
    expect1("not (x.oclIsUndefined() = false)", "x.oclIsUndefined()");
}

TEST(Conjuncts, LetBodiesFlattenAndBindingsAreCollected) {
    ExprPtr e = E("let s:Sale in s.oclIsNew() and self.CurrentSale = s and result = true");
    EXPECT_EQ(toConjuncts(e).size(), 3u);
    auto vars = letBindings(e);
    ASSERT_EQ(vars.size(), 1u);
    EXPECT_EQ(vars[0].name, "s");
    EXPECT_EQ(vars[0].type->name, "Sale");
}

TEST(Conjuncts, NullExpressionHasNoConjuncts) { EXPECT_TRUE(toConjuncts(nullptr).empty()); }
