// SPDX-License-Identifier: Apache-2.0
// remodel-check: type, compose and check REModel files or raw type fixtures.
#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "remodel/composer.hpp"
#include "remodel/model.hpp"
#include "remodel/typer.hpp"

using namespace remodel;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kParse = 1, kDeadlock = 2, kFuel = 3, kOrder = 4, kUsage = 64 };

struct Options {
    std::string file;
    bool json = false;
    std::string select;
    std::string group;
    std::optional<std::size_t> fuel;
    std::string expectedOrder;
    bool strict = false;
    bool trace = false;
};

struct Entry {
    std::string name;
    TypeExpr type;
    std::vector<TypingNote> notes;
};

struct Loaded {
    std::vector<Entry> entries;
    Hierarchy hierarchy;
    std::vector<Diagnostic> diagnostics;  // parse and typing diagnostics
    bool failed = false;
    bool strictFailure = false;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bool endsWith(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> splitList(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto b = item.find_first_not_of(" \t");
        auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

Loaded load(const Options& o) {
    Loaded l;
    std::string text = readFile(o.file);
    if (!endsWith(o.file, ".remodel")) {
        try {
            for (auto& c : parseFixture(text)) l.entries.push_back({c.name, c.type, {}});
        } catch (const FixtureError& e) {
            l.diagnostics.push_back({Severity::Error, {e.line, 1}, e.what()});
            l.failed = true;
        }
        return l;
    }
    ParseResult pr = parseModel(text);
    l.diagnostics = pr.diagnostics;
    if (!pr.ast) {
        l.failed = true;
        return l;
    }
    SymbolResult sr = collectSymbols(*pr.ast);
    l.diagnostics.insert(l.diagnostics.end(), sr.diagnostics.begin(), sr.diagnostics.end());
    if (!sr.env) {
        l.failed = true;
        return l;
    }
    l.hierarchy = sr.env->hierarchy;
    auto typed = typeModel(*pr.ast, *sr.env);
    auto names = displayNames(typed);
    for (std::size_t i = 0; i < typed.size(); ++i) {
        for (auto& n : typed[i].notes) {
            Severity sev = n.severity;
            if (o.strict && n.kind == NoteKind::UnknownIdentifier) {
                sev = Severity::Error;
                l.strictFailure = true;
            }
            l.diagnostics.push_back({sev, n.span, n.message});
        }
        l.entries.push_back({names[i], typed[i].coroutine, typed[i].notes});
    }
    return l;
}

void printDiagnostics(const Options& o, const std::vector<Diagnostic>& ds) {
    for (const auto& d : ds) std::cerr << formatDiagnostic(o.file, d) << "\n";
}

json diagnosticsJson(const Options& o, const std::vector<Diagnostic>& ds) {
    return json::parse(diagnosticsToJson(o.file, ds));
}

std::string joinArrow(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += " -> ";
        out += v[i];
    }
    return out;
}

std::size_t fuelFor(const Options& o) {
    if (o.fuel) return *o.fuel;
    if (const char* env = std::getenv("REMODEL_CHECK_FUEL")) {
        try {
            std::size_t used = 0;
            unsigned long long v = std::stoull(env, &used);
            if (used == std::string(env).size()) return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
        }
        std::cerr << "remodel-check: ignoring invalid REMODEL_CHECK_FUEL='" << env << "'\n";
    }
    return kDefaultFuel;
}

int cmdType(const Options& o) {
    Loaded l = load(o);
    if (o.json) {
        json types = json::array();
        for (const auto& e : l.entries) {
            json notes = json::array();
            for (const auto& n : e.notes) notes.push_back(n.message);
            types.push_back({{"name", e.name}, {"type", toString(e.type)}, {"notes", notes}});
        }
        std::cout << json{{"types", types}, {"diagnostics", diagnosticsJson(o, l.diagnostics)}}.dump(2)
                  << "\n";
    } else {
        printDiagnostics(o, l.diagnostics);
        for (const auto& e : l.entries) std::cout << e.name << ": " << toString(e.type) << "\n";
    }
    return l.failed || l.strictFailure ? kParse : kOk;
}

struct Composition {
    CompositionResult result;
    std::vector<std::string> order;
    std::vector<std::string> first;
    std::optional<std::string> orderMismatch;  // set when an expected order was given and differs
    bool orderChecked = false;
};

Composition runComposition(const Options& o, const Loaded& l) {
    std::vector<NamedCoroutine> theta;
    std::vector<std::string> wanted = splitList(o.select);
    if (wanted.empty()) {
        for (const auto& e : l.entries) theta.push_back({e.name, e.type, {}, false, false, false});
    } else {
        for (const auto& w : wanted) {
            auto it = std::find_if(l.entries.begin(), l.entries.end(),
                                   [&](const Entry& e) { return e.name == w; });
            if (it == l.entries.end()) throw UsageError("unknown name in --select: " + w);
            theta.push_back({it->name, it->type, {}, false, false, false});
        }
    }
    if (theta.empty()) throw UsageError("nothing to compose");
    if (!o.group.empty()) {
        try {
            theta = applyGrouping(std::move(theta), o.group);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }

    Composition c;
    Composer composer(l.hierarchy, fuelFor(o));
    c.result = composer.compose(std::move(theta));
    c.order = yieldingOrder(c.result.trace);
    c.first = firstOccurrences(c.order);

    if (!o.expectedOrder.empty()) {
        c.orderChecked = true;
        std::vector<std::string> expected;
        std::stringstream ss(readFile(o.expectedOrder));
        std::string line;
        while (std::getline(ss, line)) {
            auto b = line.find_first_not_of(" \t\r");
            if (b == std::string::npos || line[b] == '#') continue;
            auto e = line.find_last_not_of(" \t\r");
            expected.push_back(line.substr(b, e - b + 1));
        }
        for (std::size_t i = 0; i < std::max(expected.size(), c.first.size()); ++i) {
            std::string want = i < expected.size() ? expected[i] : "(end)";
            std::string got = i < c.first.size() ? c.first[i] : "(end)";
            if (want != got) {
                c.orderMismatch = "position " + std::to_string(i + 1) + ": expected " + want + ", got " + got;
                break;
            }
        }
    }
    return c;
}

int exitFor(const Composition& c) {
    switch (c.result.outcome) {
        case Outcome::Deadlock: return kDeadlock;
        case Outcome::FuelExhausted: return kFuel;
        case Outcome::Composed: break;
    }
    return c.orderMismatch ? kOrder : kOk;
}

json compositionJson(const Composition& c) {
    json trace = json::array();
    for (const auto& e : c.result.trace) {
        trace.push_back({{"rule", ruleName(e.rule)},
                         {"actor", e.actor},
                         {"detail", toString(e.detail)},
                         {"depth", e.depth}});
    }
    json stuck = json::array();
    if (c.result.outcome != Outcome::Composed)
        for (const auto& r : c.result.remaining) stuck.push_back({{"name", r.name}, {"type", toString(r.type)}});
    json j{{"result", toString(c.result.result)},
           {"outcome", outcomeName(c.result.outcome)},
           {"order", c.order},
           {"firstOccurrences", c.first},
           {"steps", c.result.steps},
           {"stuck", stuck},
           {"trace", trace}};
    if (c.orderChecked) {
        j["expectedOrder"] = {{"match", !c.orderMismatch},
                              {"detail", c.orderMismatch ? *c.orderMismatch : std::string()}};
    }
    return j;
}

void printComposition(const Options& o, const Composition& c) {
    std::cout << toString(c.result.result) << "\n";
    std::cout << "outcome: " << outcomeName(c.result.outcome) << "\n";
    std::cout << "order: " << joinArrow(c.order) << "\n";
    std::cout << "first occurrences: " << joinArrow(c.first) << "\n";
    if (c.result.outcome != Outcome::Composed) {
        for (const auto& r : c.result.remaining) std::cout << "stuck: " << r.name << ": " << toString(r.type) << "\n";
    }
    if (c.orderChecked)
        std::cout << "expected order: " << (c.orderMismatch ? "mismatch at " + *c.orderMismatch : "match") << "\n";
    if (o.trace) {
        for (const auto& e : c.result.trace) {
            std::cout << "  " << std::string(static_cast<std::size_t>(e.depth) * 2, ' ') << ruleName(e.rule);
            if (!e.actor.empty()) std::cout << " " << e.actor;
            std::cout << ": " << toString(e.detail) << "\n";
        }
    }
}

int cmdCompose(const Options& o, bool withTypes) {
    Loaded l = load(o);
    if (l.failed || l.strictFailure) {
        if (o.json)
            std::cout << json{{"diagnostics", diagnosticsJson(o, l.diagnostics)}}.dump(2) << "\n";
        else
            printDiagnostics(o, l.diagnostics);
        return kParse;
    }
    Composition c = runComposition(o, l);
    int code = exitFor(c);
    if (o.json) {
        json j = compositionJson(c);
        if (withTypes) {
            json types = json::array();
            for (const auto& e : l.entries) types.push_back({{"name", e.name}, {"type", toString(e.type)}});
            j["types"] = types;
            j["status"] = code;
        }
        j["diagnostics"] = diagnosticsJson(o, l.diagnostics);
        std::cout << j.dump(2) << "\n";
    } else {
        printDiagnostics(o, l.diagnostics);
        if (withTypes)
            for (const auto& e : l.entries) std::cout << e.name << ": " << toString(e.type) << "\n";
        printComposition(o, c);
        if (withTypes) std::cout << "check: " << (code == kOk ? "ok" : "failed") << "\n";
    }
    return code;
}

void addCommon(CLI::App* sub, Options& o, bool compose) {
    sub->add_option("file", o.file, "REModel file (.remodel) or type fixture")->required();
    sub->add_flag("--json", o.json, "Emit a JSON report");
    sub->add_flag("--strict", o.strict, "Treat unknown identifiers as errors");
    if (!compose) return;
    sub->add_option("--select", o.select, "Comma-separated names to compose, in order");
    sub->add_option("--group", o.group, "Tuple grouping, e.g. \"(a, b), c\"");
    sub->add_option("--fuel", o.fuel, "Step budget (default 10000 or $REMODEL_CHECK_FUEL)");
    sub->add_option("--expected-order", o.expectedOrder, "File with the expected first occurrences");
    sub->add_flag("--trace", o.trace, "Print the rule trace");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Type-check REModel requirement models with coroutine types"};
    app.require_subcommand(1);
    Options o;
    auto* type = app.add_subcommand("type", "Print the inferred type of every contract");
    auto* compose = app.add_subcommand("compose", "Compose contract types and report the yielding order");
    auto* check = app.add_subcommand("check", "Parse, type and compose; exit status reflects the outcome");
    addCommon(type, o, false);
    addCommon(compose, o, true);
    addCommon(check, o, true);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (type->parsed()) return cmdType(o);
        if (compose->parsed()) return cmdCompose(o, false);
        return cmdCompose(o, true);
    } catch (const UsageError& e) {
        std::cerr << "remodel-check: " << e.what() << "\n";
        return kUsage;
    }
}
