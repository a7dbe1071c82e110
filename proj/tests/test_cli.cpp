// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <json.hpp>
#include <sstream>

#include "support/run.hpp"

using namespace remodel::testing;
using nlohmann::json;

namespace {

// Value of the first text line starting with `key: `.
std::string field(const std::string& out, const std::string& key) {
    std::istringstream in(out);
    std::string line;
    while (std::getline(in, line))
        if (line.rfind(key + ": ", 0) == 0) return line.substr(key.size() + 2);
    return "";
}

std::string firstLine(const std::string& out) { return out.substr(0, out.find('\n')); }

// The composed result is printed on the line just before `outcome:`.
std::string resultLine(const std::string& out) {
    std::istringstream in(out);
    std::string line, prev;
    while (std::getline(in, line)) {
        if (line.rfind("outcome: ", 0) == 0) return prev;
        prev = line;
    }
    return "";
}

std::vector<std::string> lines(const std::string& out, const std::string& key) {
    std::vector<std::string> v;
    std::istringstream in(out);
    std::string line;
    while (std::getline(in, line))
        if (line.rfind(key + ": ", 0) == 0) v.push_back(line.substr(key.size() + 2));
    return v;
}

std::string joinArrow(const json& arr) {
    std::string s;
    for (std::size_t i = 0; i < arr.size(); ++i) s += (i ? " -> " : "") + arr[i].get<std::string>();
    return s;
}

}  // namespace

// ---- exit codes ----

TEST(Cli, TypeListsEveryContract) {
    RunResult r = runCheck("type " + fx("cocome.remodel"));
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(field(r.out, "enterItem"),
              "[<CurrentSale, Item>; <CurrentSale, Item, SalesLineItem, CurrentSaleLine>]");
    EXPECT_EQ(field(r.out, "deleteItem"), "[Item; Void]");
}

TEST(Cli, CheckCocomeSucceeds) {
    RunResult r = runCheck("check " + fx("cocome.remodel") + " " + cocomeGroup() +
                           " --expected-order " + fx("cocome_order.txt"));
    EXPECT_EQ(r.status, 0) << r.out;
    EXPECT_EQ(field(r.out, "outcome"), "composed");
    EXPECT_EQ(field(r.out, "expected order"), "match");
    EXPECT_EQ(field(r.out, "check"), "ok");
}

TEST(Cli, ComposeCocomeResult) {
    RunResult r = runCheck("compose " + fx("cocome.remodel") + " " + cocomeGroup());
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(firstLine(r.out),
              "[Void; <CurrentStore, CurrentCashDesk, Sale, CashPayment, SalesLineItem, "
              "CurrentSaleLine>]");
    EXPECT_EQ(field(r.out, "order").rfind("createStore -> openStore", 0), 0u);
}

TEST(Cli, BrokenFileExitsOneWithPosition) {
    RunResult r = runCheck("check " + fx("broken.remodel"), "", true);
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.out.find("broken.remodel:6:"), std::string::npos) << r.out;
    EXPECT_EQ(runCheck("type " + fx("bad_enum.remodel")).status, 1);
}

TEST(Cli, StrictMakesUnknownIdentifiersFatal) {
    RunResult lax = runCheck("type " + fx("atm.remodel") + " --strict");
    EXPECT_EQ(lax.status, 0);  // conditional warnings are not unknown identifiers
    std::string tmp = ::testing::TempDir() + "unknown_ident.remodel";
    FILE* f = fopen(tmp.c_str(), "w");
    ASSERT_NE(f, nullptr);
    fputs("Service S {\n}\nContract S::f() : Boolean {\n precondition:\n  ghost.oclIsUndefined() = false\n}\n",
          f);
    fclose(f);
    EXPECT_EQ(runCheck("type '" + tmp + "'").status, 0);
    EXPECT_EQ(runCheck("type '" + tmp + "' --strict").status, 1);
}

TEST(Cli, DeadlockExitsTwoAndListsStuck) {
    RunResult r = runCheck("check " + fx("ghost.txt"));
    EXPECT_EQ(r.status, 2);
    EXPECT_EQ(lines(r.out, "stuck"), std::vector<std::string>{"haunted: [Ghost; A]"});
    EXPECT_EQ(runCheck("compose " + fx("prolog_sue.txt")).status, 2);
}

TEST(Cli, FuelExhaustionExitsThree) {
    EXPECT_EQ(runCheck("compose " + fx("prolog_sam.txt") + " --fuel 5").status, 3);
    EXPECT_EQ(runCheck("compose " + fx("prolog_sam.txt"), "REMODEL_CHECK_FUEL=5").status, 3);
    EXPECT_EQ(runCheck("compose " + fx("prolog_sam.txt") + " --fuel 10000", "REMODEL_CHECK_FUEL=5").status,
              0);
}

TEST(Cli, OrderMismatchExitsFour) {
    RunResult r = runCheck("check " + fx("cocome_missing_sale.remodel") + " " + cocomeGroup() +
                           " --expected-order " + fx("cocome_order.txt"));
    EXPECT_EQ(r.status, 4) << r.out;
    EXPECT_NE(field(r.out, "expected order").find("mismatch"), std::string::npos);
}

TEST(Cli, UsageErrorsExitSixtyFour) {
    EXPECT_EQ(runCheck("").status, 64);
    EXPECT_EQ(runCheck("compose").status, 64);
    EXPECT_EQ(runCheck("compose " + fx("prolog_sam.txt") + " --select nope").status, 64);
    EXPECT_EQ(runCheck("compose " + fx("prolog_sam.txt") + " --group '(answer'").status, 64);
    EXPECT_EQ(runCheck("type /nonexistent/model.remodel").status, 64);
}

TEST(Cli, SelectRestrictsAndOrders) {
    RunResult r = runCheck("compose " + fx("cocome_types.txt") + " --select createStore,openStore");
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(firstLine(r.out), "[Void; <Store, CurrentStore>]");
}

TEST(Cli, PrologComposesToYes) {
    RunResult r = runCheck("compose " + fx("prolog_sam.txt"));
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(firstLine(r.out), "[Void; Yes]");
    EXPECT_EQ(field(r.out, "outcome"), "composed");
}

// ---- report properties ----

TEST(Cli, RepeatedRunsAreByteIdentical) {
    for (const std::string& args :
         {"type " + fx("cocome.remodel"), "compose " + fx("prolog_sam.txt") + " --trace",
          "check " + fx("cocome.remodel") + " " + cocomeGroup() + " --json",
          "compose " + fx("ghost.txt") + " --json"}) {
        RunResult a = runCheck(args), b = runCheck(args);
        EXPECT_FALSE(a.out.empty()) << args;
        EXPECT_EQ(a.out, b.out) << args;
    }
}

TEST(Cli, JsonAndTextCarryTheSameFacts) {
    std::vector<std::string> cases = {
        "compose " + fx("cocome.remodel") + " " + cocomeGroup(),
        "compose " + fx("prolog_sam.txt"),
        "compose " + fx("prolog_sue.txt"),
        "compose " + fx("ghost.txt"),
        "check " + fx("cocome_missing_sale.remodel") + " " + cocomeGroup() + " --expected-order " +
            fx("cocome_order.txt"),
    };
    for (const auto& args : cases) {
        RunResult text = runCheck(args);
        RunResult js = runCheck(args + " --json");
        EXPECT_EQ(text.status, js.status) << args;
        json j = json::parse(js.out);
        EXPECT_EQ(j["outcome"].get<std::string>(), field(text.out, "outcome")) << args;
        EXPECT_EQ(j["result"].get<std::string>(), resultLine(text.out)) << args;
        EXPECT_EQ(joinArrow(j["order"]), field(text.out, "order")) << args;
        EXPECT_EQ(joinArrow(j["firstOccurrences"]), field(text.out, "first occurrences")) << args;
        std::vector<std::string> stuck;
        for (const auto& s : j["stuck"])
            stuck.push_back(s["name"].get<std::string>() + ": " + s["type"].get<std::string>());
        EXPECT_EQ(stuck, lines(text.out, "stuck")) << args;
    }
}
