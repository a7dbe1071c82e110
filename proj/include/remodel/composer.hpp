// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "remodel/type.hpp"

namespace remodel {

// An element of the composition list. Groups (tuples) carry their members so
// member names survive; `type` is then the Product of the member types.
struct NamedCoroutine {
    std::string name;
    TypeExpr type;
    std::vector<NamedCoroutine> members;
    bool synthetic = false;  // stands for a composed group, not a user entry
    bool touched = false;    // has received at least one item
    bool relation = false;   // receive head is a tuple pattern (knowledge-base entry)

    static NamedCoroutine group(std::vector<NamedCoroutine> members);
};

enum class Rule {
    Void,
    Tuple,
    Final,
    Yield,
    YieldCo,
    Deadlock,
    Resume,
    External,
    ResumeCo,
    LoopExt,
    Retire,
};

const char* ruleName(Rule r);

struct TraceEvent {
    Rule rule;
    std::string actor;
    TypeExpr detail;
    int depth = 0;
    bool completes = false;  // the event emptied the actor's receive part
    bool synthetic = false;  // actor is a composed group
};

struct ExternalItem {
    TypeExpr type;
    std::string origin;
    bool fromRelation = false;
};

struct CompositionContext {
    TypeExpr pending;  // Void when nothing is in flight
    std::string pendingOrigin;
    bool pendingFromRelation = false;
    std::vector<ExternalItem> external;

    TypeExpr externalType() const;
};

struct FirstMatch {
    std::optional<NamedCoroutine> found;
    std::vector<NamedCoroutine> before;
    std::vector<NamedCoroutine> after;
};

FirstMatch firstMatch(const std::vector<NamedCoroutine>& theta,
                      const std::function<bool(const NamedCoroutine&)>& pred);

bool isRelationType(const TypeExpr& t);

struct EngineState {
    CompositionContext ctx;
    std::vector<NamedCoroutine> theta;
    std::string focus;  // coroutine that last became ready through R-resume
    int depth = 0;
    std::size_t yieldCoCounter = 0;
    bool finished = false;  // a terminal step has been taken
};

enum class Outcome { Composed, Deadlock, FuelExhausted };
const char* outcomeName(Outcome o);

struct StepResult {
    std::vector<TraceEvent> events;
    bool terminal = false;
    Outcome outcome = Outcome::Composed;
    TypeExpr result;
};

struct CompositionResult {
    TypeExpr result;
    std::vector<TraceEvent> trace;
    Outcome outcome = Outcome::Composed;
    std::vector<NamedCoroutine> remaining;  // deadlock or fuel exhaustion
    std::vector<ExternalItem> external;     // E at termination
    std::size_t steps = 0;
};

constexpr std::size_t kDefaultFuel = 10000;

class Composer {
public:
    explicit Composer(Hierarchy h = {}, std::size_t fuel = kDefaultFuel);

    // Applies one rule. Entry types must be normalized. Group entries are
    // composed recursively within this call.
    StepResult step(EngineState& state);
    CompositionResult compose(std::vector<NamedCoroutine> theta);

    std::size_t fuelLeft() const { return fuel_; }

private:
    Hierarchy h_;
    std::size_t initialFuel_;
    std::size_t fuel_;
    bool exhausted_ = false;

    CompositionResult run(EngineState state);
    std::optional<Bindings> receives(const NamedCoroutine& c, const TypeExpr& t) const;
    void resume(NamedCoroutine& c, const Bindings& d) const;
};

std::vector<std::string> yieldingOrder(const std::vector<TraceEvent>& trace);
std::vector<std::string> firstOccurrences(const std::vector<std::string>& order);

// Fixture text: one `name: <type>` per line; `#` and `//` start comments.
struct FixtureError : std::runtime_error {
    FixtureError(const std::string& m, int line) : std::runtime_error(m), line(line) {}
    int line;
};
std::vector<NamedCoroutine> parseFixture(const std::string& text);

// Groups entries by a tuple expression such as "(a, b), c" or "((a,b),c)".
// Grouped entries move to the position of their first member.
std::vector<NamedCoroutine> applyGrouping(std::vector<NamedCoroutine> entries,
                                          const std::string& groupSpec);

}  // namespace remodel
