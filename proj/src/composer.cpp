// SPDX-License-Identifier: Apache-2.0
#include "remodel/composer.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace remodel {

const char* ruleName(Rule r) {
    switch (r) {
        case Rule::Void: return "remove-void";
        case Rule::Tuple: return "compose-tuple";
        case Rule::Final: return "e-to-one";
        case Rule::Yield: return "yield";
        case Rule::YieldCo: return "yield-co";
        case Rule::Deadlock: return "co-to-ext";
        case Rule::Resume: return "resume";
        case Rule::External: return "external";
        case Rule::ResumeCo: return "resume-co";
        case Rule::LoopExt: return "loop-external";
        case Rule::Retire: return "retire";
    }
    return "?";
}

const char* outcomeName(Outcome o) {
    switch (o) {
        case Outcome::Composed: return "composed";
        case Outcome::Deadlock: return "deadlock";
        case Outcome::FuelExhausted: return "fuel-exhausted";
    }
    return "?";
}

TypeExpr CompositionContext::externalType() const {
    std::vector<TypeExpr> items;
    for (const auto& e : external) items.push_back(e.type);
    return normalize(TypeExpr::sequence(std::move(items)));
}

bool isRelationType(const TypeExpr& t) {
    if (!isCoroutineLike(t)) return false;
    const TypeExpr& r = coroutineBase(t).receive();
    return !r.isVoid() && head(r).kind() == TypeExpr::Kind::Product;
}

namespace {

NamedCoroutine makeEntry(std::string name, TypeExpr type) {
    NamedCoroutine c;
    c.name = std::move(name);
    c.type = normalize(type);
    if (c.type.kind() == TypeExpr::Kind::Product) {
        for (std::size_t i = 0; i < c.type.items().size(); ++i)
            c.members.push_back(makeEntry(c.name + "." + std::to_string(i + 1), c.type.items()[i]));
    }
    c.relation = isRelationType(c.type);
    return c;
}

std::string groupName(const std::vector<NamedCoroutine>& members) {
    std::string n = "(";
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (i) n += ", ";
        n += members[i].name;
    }
    return n + ")";
}

bool isVoidEntry(const NamedCoroutine& c) {
    const TypeExpr& t = c.type;
    if (t.isVoid()) return true;
    if (!isCoroutineLike(t)) return false;
    const TypeExpr& b = coroutineBase(t);
    return b.receive().isVoid() && b.yield().isVoid();
}

bool canYield(const NamedCoroutine& c) {
    if (!isCoroutineLike(c.type)) return false;
    const TypeExpr& b = coroutineBase(c.type);
    return b.receive().isVoid() && !b.yield().isVoid();
}

bool receivePending(const NamedCoroutine& c) {
    return isCoroutineLike(c.type) && !coroutineBase(c.type).receive().isVoid();
}

}  // namespace

NamedCoroutine NamedCoroutine::group(std::vector<NamedCoroutine> members) {
    NamedCoroutine g;
    g.name = groupName(members);
    std::vector<TypeExpr> types;
    for (const auto& m : members) types.push_back(m.type);
    g.type = TypeExpr::product(std::move(types));
    g.members = std::move(members);
    return g;
}

FirstMatch firstMatch(const std::vector<NamedCoroutine>& theta,
                      const std::function<bool(const NamedCoroutine&)>& pred) {
    FirstMatch fm;
    auto it = std::find_if(theta.begin(), theta.end(), pred);
    fm.before.assign(theta.begin(), it);
    if (it != theta.end()) {
        fm.found = *it;
        fm.after.assign(it + 1, theta.end());
    }
    return fm;
}

Composer::Composer(Hierarchy h, std::size_t fuel)
    : h_(std::move(h)), initialFuel_(fuel), fuel_(fuel) {}

std::optional<Bindings> Composer::receives(const NamedCoroutine& c, const TypeExpr& t) const {
    if (!receivePending(c)) return std::nullopt;
    TypeExpr want = head(coroutineBase(c.type).receive());
    Bindings d = match(t, want, h_);
    if (d.failed()) return std::nullopt;
    if (c.type.kind() == TypeExpr::Kind::Constrained &&
        !constraintHoldsSoFar(c.type.predicate(), d, h_))
        return std::nullopt;
    return d;
}

void Composer::resume(NamedCoroutine& c, const Bindings& d) const {
    const TypeExpr& b = coroutineBase(c.type);
    c.type = substitute(withParts(c.type, tail(b.receive()), b.yield()), d, h_);
    c.touched = true;
}

StepResult Composer::step(EngineState& s) {
    StepResult out;
    auto& theta = s.theta;
    auto event = [&](Rule r, const NamedCoroutine* c, TypeExpr detail, bool completes = false) {
        TraceEvent e{r, c ? c->name : std::string(), std::move(detail), s.depth, completes,
                     c ? c->synthetic : false};
        out.events.push_back(std::move(e));
    };
    auto stateAsSequence = [&] {
        std::vector<TypeExpr> items;
        for (const auto& e : s.ctx.external) items.push_back(e.type);
        if (!s.ctx.pending.isVoid()) items.push_back(s.ctx.pending);
        for (const auto& c : theta) items.push_back(c.type);
        return normalize(TypeExpr::sequence(std::move(items)));
    };

    if (s.finished) throw RuleError("step on a terminal composition state");
    if (exhausted_ || fuel_ == 0) {
        exhausted_ = true;
        s.finished = true;
        out.terminal = true;
        out.outcome = Outcome::FuelExhausted;
        out.result = stateAsSequence();
        return out;
    }
    --fuel_;

    // remove-void
    for (auto it = theta.begin(); it != theta.end(); ++it) {
        if (!isVoidEntry(*it)) continue;
        event(Rule::Void, &*it, it->type);
        if (s.focus == it->name) s.focus.clear();
        theta.erase(it);
        return out;
    }

    // compose-tuple
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (theta[i].type.kind() != TypeExpr::Kind::Product) continue;
        NamedCoroutine grp = theta[i];
        if (grp.members.empty()) grp = makeEntry(grp.name, grp.type);
        EngineState sub;
        sub.depth = s.depth + 1;
        sub.theta = grp.members;
        CompositionResult r = run(std::move(sub));
        out.events = std::move(r.trace);
        event(Rule::Tuple, &grp, r.result);
        if (r.outcome == Outcome::FuelExhausted) {
            s.finished = true;
            out.terminal = true;
            out.outcome = Outcome::FuelExhausted;
            out.result = stateAsSequence();
            return out;
        }
        theta.erase(theta.begin() + static_cast<std::ptrdiff_t>(i));
        if (r.outcome == Outcome::Composed) {
            NamedCoroutine composite;
            composite.name = grp.name;
            composite.type = r.result;
            composite.synthetic = true;
            theta.insert(theta.begin() + static_cast<std::ptrdiff_t>(i), std::move(composite));
        } else {
            theta.insert(theta.begin() + static_cast<std::ptrdiff_t>(i), r.remaining.begin(),
                         r.remaining.end());
            s.ctx.external.insert(s.ctx.external.end(), r.external.begin(), r.external.end());
        }
        return out;
    }

    // resume / external
    if (!s.ctx.pending.isVoid()) {
        TypeExpr t = s.ctx.pending;
        s.ctx.pending = TypeExpr::voidType();
        for (auto& c : theta) {
            auto d = receives(c, t);
            if (!d) continue;
            resume(c, *d);
            bool done = !receivePending(c);
            if (done) s.focus = c.name;
            event(Rule::Resume, &c, t, done);
            return out;
        }
        s.ctx.external.push_back({t, s.ctx.pendingOrigin, s.ctx.pendingFromRelation});
        event(Rule::External, nullptr, t);
        return out;
    }

    // resume-co
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (!receivePending(theta[i])) continue;
        TypeExpr want = head(coroutineBase(theta[i].type).receive());
        if (!isCoroutineLike(want)) continue;
        for (std::size_t j = 0; j < theta.size(); ++j) {
            if (j == i) continue;
            Bindings d = match(theta[j].type, want, h_);
            if (d.failed()) continue;
            if (theta[i].type.kind() == TypeExpr::Kind::Constrained &&
                !constraintHoldsSoFar(theta[i].type.predicate(), d, h_))
                continue;
            TypeExpr received = theta[j].type;
            resume(theta[i], d);
            bool done = !receivePending(theta[i]);
            event(Rule::ResumeCo, &theta[i], received, done);
            if (s.focus == theta[j].name) s.focus.clear();
            theta.erase(theta.begin() + static_cast<std::ptrdiff_t>(j));
            return out;
        }
    }

    // loop-external: E outermost, Θ innermost
    for (std::size_t k = 0; k < s.ctx.external.size(); ++k) {
        for (auto& c : theta) {
            auto d = receives(c, s.ctx.external[k].type);
            if (!d) continue;
            TypeExpr t = s.ctx.external[k].type;
            s.ctx.external.erase(s.ctx.external.begin() + static_cast<std::ptrdiff_t>(k));
            resume(c, *d);
            event(Rule::LoopExt, &c, t, !receivePending(c));
            return out;
        }
    }

    // yield / yield-co
    auto yielder = theta.end();
    if (!s.focus.empty()) {
        yielder = std::find_if(theta.begin(), theta.end(),
                               [&](const NamedCoroutine& c) { return c.name == s.focus; });
        if (yielder != theta.end() && !canYield(*yielder)) yielder = theta.end();
    }
    if (yielder == theta.end()) yielder = std::find_if(theta.begin(), theta.end(), canYield);
    if (yielder != theta.end()) {
        const TypeExpr& b = coroutineBase(yielder->type);
        TypeExpr h = head(b.yield());
        yielder->type = normalize(withParts(yielder->type, b.receive(), tail(b.yield())));
        if (isCoroutineLike(h)) {
            NamedCoroutine made =
                makeEntry(yielder->name + "." + std::to_string(++s.yieldCoCounter), h);
            event(Rule::YieldCo, &*yielder, h);
            theta.insert(yielder + 1, std::move(made));
        } else {
            s.ctx.pending = h;
            s.ctx.pendingOrigin = yielder->name;
            s.ctx.pendingFromRelation = yielder->relation;
            event(Rule::Yield, &*yielder, h);
        }
        return out;
    }

    // terminal
    bool relationInE = std::any_of(s.ctx.external.begin(), s.ctx.external.end(),
                                   [](const ExternalItem& e) { return e.fromRelation; });
    bool allDormantRelations =
        std::all_of(theta.begin(), theta.end(),
                    [](const NamedCoroutine& c) { return c.relation && !c.touched; });
    if (!theta.empty() && allDormantRelations && !relationInE) {
        for (const auto& c : theta) event(Rule::Retire, &c, c.type);
        theta.clear();
    }
    out.terminal = true;
    s.finished = true;
    if (theta.empty()) {
        out.outcome = Outcome::Composed;
        out.result = TypeExpr::coroutine(TypeExpr::voidType(), s.ctx.externalType());
        event(Rule::Final, nullptr, out.result);
    } else {
        out.outcome = Outcome::Deadlock;
        out.result = stateAsSequence();
        event(Rule::Deadlock, nullptr, out.result);
    }
    return out;
}

CompositionResult Composer::run(EngineState state) {
    CompositionResult res;
    for (;;) {
        StepResult r = step(state);
        ++res.steps;
        res.trace.insert(res.trace.end(), std::make_move_iterator(r.events.begin()),
                         std::make_move_iterator(r.events.end()));
        if (r.terminal) {
            res.outcome = r.outcome;
            res.result = r.result;
            break;
        }
    }
    res.remaining = state.theta;
    res.external = state.ctx.external;
    return res;
}

CompositionResult Composer::compose(std::vector<NamedCoroutine> theta) {
    fuel_ = initialFuel_;
    exhausted_ = false;
    EngineState s;
    for (auto& c : theta) {
        NamedCoroutine e = makeEntry(c.name, c.type);
        if (!c.members.empty()) e.members = c.members;
        s.theta.push_back(std::move(e));
    }
    return run(std::move(s));
}

std::vector<std::string> yieldingOrder(const std::vector<TraceEvent>& trace) {
    std::vector<std::string> out;
    for (const auto& e : trace) {
        if (e.synthetic || e.actor.empty()) continue;
        if (e.rule == Rule::Yield || e.rule == Rule::YieldCo || e.completes) out.push_back(e.actor);
    }
    return out;
}

std::vector<std::string> firstOccurrences(const std::vector<std::string>& order) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& n : order)
        if (seen.insert(n).second) out.push_back(n);
    return out;
}

// ---- fixture format ----

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool validName(const std::string& n) {
    if (n.empty()) return false;
    return std::all_of(n.begin(), n.end(), [](char ch) {
        return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.' || ch == '-' ||
               ch == ':';
    });
}

}  // namespace

std::vector<NamedCoroutine> parseFixture(const std::string& text) {
    std::vector<NamedCoroutine> out;
    std::set<std::string> names;
    std::istringstream in(text);
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (auto c = line.find("//"); c != std::string::npos) line.erase(c);
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto colon = line.find(": ");
        if (colon == std::string::npos) colon = line.rfind(':', line.find_first_of("[<(") );
        if (colon == std::string::npos || colon == 0)
            throw FixtureError("expected `name: <type>`", lineNo);
        std::string name = trim(line.substr(0, colon));
        if (!validName(name)) throw FixtureError("bad entry name '" + name + "'", lineNo);
        if (!names.insert(name).second) throw FixtureError("duplicate entry '" + name + "'", lineNo);
        try {
            out.push_back(makeEntry(name, parseType(line.substr(colon + 1))));
        } catch (const TypeParseError& e) {
            throw FixtureError(e.what(), lineNo);
        }
    }
    return out;
}

// ---- grouping ----

namespace {

struct GroupNode {
    std::string name;  // leaf when non-empty
    std::vector<GroupNode> kids;
};

class GroupParser {
public:
    explicit GroupParser(const std::string& s) : s_(s) {}

    std::vector<GroupNode> parseTop() {
        std::vector<GroupNode> out;
        skip();
        while (pos_ < s_.size()) {
            out.push_back(node());
            skip();
            if (pos_ < s_.size() && s_[pos_] == ',') {
                ++pos_;
                skip();
            }
        }
        return out;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    GroupNode node() {
        skip();
        GroupNode n;
        if (pos_ < s_.size() && s_[pos_] == '(') {
            ++pos_;
            for (;;) {
                n.kids.push_back(node());
                skip();
                if (pos_ < s_.size() && s_[pos_] == ',') {
                    ++pos_;
                    continue;
                }
                if (pos_ < s_.size() && s_[pos_] == ')') {
                    ++pos_;
                    break;
                }
                throw std::invalid_argument("malformed group specification: " + s_);
            }
            return n;
        }
        std::size_t start = pos_;
        while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ')' && s_[pos_] != '(' &&
               !std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
        n.name = s_.substr(start, pos_ - start);
        if (n.name.empty()) throw std::invalid_argument("malformed group specification: " + s_);
        return n;
    }
};

void leafNames(const GroupNode& n, std::vector<std::string>& out) {
    if (!n.name.empty()) {
        out.push_back(n.name);
        return;
    }
    for (const auto& k : n.kids) leafNames(k, out);
}

NamedCoroutine build(const GroupNode& n, std::map<std::string, NamedCoroutine>& pool) {
    if (!n.name.empty()) {
        auto it = pool.find(n.name);
        if (it == pool.end()) throw std::invalid_argument("unknown or repeated name in group: " + n.name);
        NamedCoroutine c = it->second;
        pool.erase(it);
        return c;
    }
    std::vector<NamedCoroutine> members;
    for (const auto& k : n.kids) members.push_back(build(k, pool));
    return NamedCoroutine::group(std::move(members));
}

}  // namespace

std::vector<NamedCoroutine> applyGrouping(std::vector<NamedCoroutine> entries,
                                          const std::string& groupSpec) {
    GroupParser parser(groupSpec);
    std::map<std::string, NamedCoroutine> pool;
    for (const auto& e : entries) pool.emplace(e.name, e);
    for (const GroupNode& top : parser.parseTop()) {
        if (!top.name.empty()) {
            if (!pool.count(top.name)) throw std::invalid_argument("unknown name in group: " + top.name);
            continue;
        }
        std::vector<std::string> names;
        leafNames(top, names);
        std::size_t pos = entries.size();
        for (const auto& n : names) {
            auto it = std::find_if(entries.begin(), entries.end(),
                                   [&](const NamedCoroutine& c) { return c.name == n; });
            if (it != entries.end())
                pos = std::min(pos, static_cast<std::size_t>(it - entries.begin()));
        }
        NamedCoroutine g = build(top, pool);
        std::set<std::string> used(names.begin(), names.end());
        std::vector<NamedCoroutine> next;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (i == pos) next.push_back(g);
            if (!used.count(entries[i].name)) next.push_back(entries[i]);
        }
        entries = std::move(next);
    }
    return entries;
}

}  // namespace remodel
