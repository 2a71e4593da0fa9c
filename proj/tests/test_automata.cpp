#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "decs/automata_ops.hpp"
#include "decs/errors.hpp"
#include "oracles.hpp"

using namespace decs;

namespace {

RegistryPtr fresh_registry() { return std::make_shared<EventRegistry>(); }

Automaton chain(RegistryPtr reg, const std::vector<std::string>& events, int marked_at) {
    Automaton a = Automaton::empty(reg);
    for (size_t i = 0; i <= events.size(); ++i) a.add_state(static_cast<int>(i) == marked_at);
    a.initial = 0;
    for (size_t i = 0; i < events.size(); ++i) {
        EventId e = reg->intern(events[i], true);
        a.alphabet.insert(e);
        a.add_transition(static_cast<StateId>(i), e, static_cast<StateId>(i + 1));
    }
    return a;
}

EventSet make_events(RegistryPtr reg, std::initializer_list<const char*> names, bool controllable = true) {
    EventSet out;
    for (const char* nm : names) out.insert(reg->intern(nm, controllable));
    return out;
}

}  // namespace

TEST_CASE("trim keeps a single marked initial state") {
    auto reg = fresh_registry();
    Automaton a = Automaton::empty(reg);
    a.initial = a.add_state(true);
    Automaton t = trim(a);
    CHECK(t.num_states() == 1);
    CHECK(t.marked[0]);
    CHECK(language_equivalent(a, t));
}

TEST_CASE("trim removes an unmarked dead tail") {
    auto reg = fresh_registry();
    // 0 -a-> 1 -b-> 2 with only state 1 marked: state 2 cannot reach marking
    Automaton a = chain(reg, {"a", "b"}, 1);
    Automaton t = trim(a);
    CHECK(t.num_states() == 2);
    CHECK(t.num_transitions() == 1);
}

TEST_CASE("trim agrees with reachable-and-coreachable enumeration on random automata") {
    auto reg = fresh_registry();
    EventSet events = make_events(reg, {"a", "b", "c"});
    oracles::Rng rng(1001);
    for (int i = 0; i < 200; ++i) {
        Automaton a = oracles::random_automaton(reg, events, 6, rng);
        auto keep = oracles::trim_states(a);
        Automaton expected = trim(oracles::restrict_to(a, keep));
        Automaton got = trim(a);
        CHECK(got.num_states() == static_cast<int>(keep.size()));
        CHECK(language_equivalent(got, expected));
    }
}

TEST_CASE("trim is idempotent") {
    auto reg = fresh_registry();
    EventSet events = make_events(reg, {"a", "b"});
    oracles::Rng rng(1002);
    for (int i = 0; i < 100; ++i) {
        Automaton t = trim(oracles::random_automaton(reg, events, 6, rng));
        Automaton tt = trim(t);
        CHECK(tt.num_states() == t.num_states());
        CHECK(language_equivalent(t, tt));
    }
}

TEST_CASE("nonblocking checks") {
    auto reg = fresh_registry();
    SUBCASE("all states marked") {
        Automaton a = chain(reg, {"a", "b"}, 0);
        for (size_t q = 0; q < a.marked.size(); ++q) a.marked[q] = true;
        CHECK(is_nonblocking(a));
    }
    SUBCASE("reachable unmarked sink") {
        Automaton a = chain(reg, {"a"}, 0);  // 0 marked, 1 is a dead sink
        CHECK_FALSE(is_nonblocking(a));
    }
}

TEST_CASE("sync product with the universal automaton is an identity") {
    auto reg = fresh_registry();
    EventSet events = make_events(reg, {"a", "b"});
    oracles::Rng rng(1003);
    for (int i = 0; i < 50; ++i) {
        Automaton a = trim(oracles::random_automaton(reg, events, 5, rng));
        if (a.is_empty()) continue;
        Automaton u = universal(reg, a.alphabet);
        CHECK(language_equivalent(sync_product(a, u), a));
    }
}

TEST_CASE("disjoint-alphabet product is the interleaving shuffle") {
    auto reg = fresh_registry();
    EventSet ea = make_events(reg, {"a1", "a2"});
    EventSet eb = make_events(reg, {"b1"});
    oracles::Rng rng(1004);
    for (int i = 0; i < 60; ++i) {
        Automaton a = trim(oracles::random_automaton(reg, ea, 2, rng));
        Automaton b = trim(oracles::random_automaton(reg, eb, 3, rng));
        if (a.is_empty() || b.is_empty()) continue;
        Automaton p = sync_product(a, b);
        CHECK(p.num_states() <= a.num_states() * b.num_states());
        // membership of every bounded string matches the interleaving definition
        auto la = oracles::closed_language(a, 6);
        auto lb = oracles::closed_language(b, 6);
        auto lp = oracles::closed_language(p, 6);
        for (const auto& w : lp) {
            CHECK(la.count(oracles::erase_events(w, a.alphabet)));
            CHECK(lb.count(oracles::erase_events(w, b.alphabet)));
        }
        // and every interleaving of member strings is present
        for (const auto& w : oracles::closed_language(p, 6)) CHECK(lp.count(w));
        auto lma = oracles::marked_language(a, 6);
        auto lmp = oracles::marked_language(p, 6);
        for (const auto& w : lmp) {
            CHECK(lma.count(oracles::erase_events(w, a.alphabet)));
            CHECK(oracles::marked_language(b, 6).count(oracles::erase_events(w, b.alphabet)));
        }
    }
}

TEST_CASE("sync product is associative up to language equivalence") {
    auto reg = fresh_registry();
    EventSet ea = make_events(reg, {"x", "y"});
    EventSet eb = make_events(reg, {"y", "z"});
    EventSet ec = make_events(reg, {"z", "x"});
    oracles::Rng rng(1005);
    for (int i = 0; i < 40; ++i) {
        Automaton a = oracles::random_automaton(reg, ea, 4, rng);
        Automaton b = oracles::random_automaton(reg, eb, 4, rng);
        Automaton c = oracles::random_automaton(reg, ec, 4, rng);
        Automaton left = sync_product(sync_product(a, b), c);
        Automaton right = sync_product(a, sync_product(b, c));
        CHECK(language_equivalent(left, right));
        CHECK(language_equivalent(sync_product(a, b), sync_product(b, a)));
    }
}

TEST_CASE("equal alphabets give language intersection") {
    auto reg = fresh_registry();
    EventSet events = make_events(reg, {"a", "b"});
    oracles::Rng rng(1006);
    for (int i = 0; i < 50; ++i) {
        Automaton a = oracles::random_automaton(reg, events, 4, rng);
        Automaton b = oracles::random_automaton(reg, events, 4, rng);
        Automaton p = sync_product(a, b);
        auto la = oracles::closed_language(a, 5);
        auto lb = oracles::closed_language(b, 5);
        for (const auto& w : oracles::closed_language(p, 5)) {
            CHECK(la.count(w));
            CHECK(lb.count(w));
        }
        for (const auto& w : la)
            if (lb.count(w)) CHECK(oracles::closed_language(p, 5).count(w));
    }
}

TEST_CASE("natural projection onto the full alphabet is an identity") {
    auto reg = fresh_registry();
    EventSet events = make_events(reg, {"a", "b"});
    oracles::Rng rng(1007);
    for (int i = 0; i < 40; ++i) {
        Automaton a = trim(oracles::random_automaton(reg, events, 5, rng));
        if (a.is_empty()) continue;
        CHECK(language_equivalent(natural_projection(a, a.alphabet), a));
    }
}

TEST_CASE("projection onto the empty set yields one state, marked iff marking is reachable") {
    auto reg = fresh_registry();
    EventSet events = make_events(reg, {"a", "b"});
    oracles::Rng rng(1008);
    for (int i = 0; i < 40; ++i) {
        Automaton a = oracles::random_automaton(reg, events, 5, rng);
        Automaton p = natural_projection(a, EventSet{});
        CHECK(p.num_states() == 1);
        CHECK(p.num_transitions() == 0);
        bool lm_nonempty = !trim(a).is_empty();
        CHECK(p.marked[0] == lm_nonempty);
    }
}

TEST_CASE("projection agrees with string-wise erasure") {
    auto reg = fresh_registry();
    EventSet events = make_events(reg, {"a", "b", "c"});
    oracles::Rng rng(1009);
    for (int i = 0; i < 80; ++i) {
        Automaton a = oracles::random_automaton(reg, events, 5, rng);
        EventSet sigma;
        for (EventId e : events)
            if (rng.chance(0.5)) sigma.insert(e);
        Automaton p = natural_projection(a, sigma);
        std::set<oracles::Word> expected_closed, expected_marked;
        for (const auto& s : oracles::closed_language(a, 6))
            expected_closed.insert(oracles::erase_events(s, sigma));
        for (const auto& s : oracles::marked_language(a, 6))
            expected_marked.insert(oracles::erase_events(s, sigma));
        // soundness: every projected string is an erasure, every erasure appears
        for (const auto& w : expected_closed) CHECK(accepts(p, w) != Membership::outside);
        for (const auto& w : expected_marked) CHECK(accepts(p, w) == Membership::in_marked);
        // completeness: every projected string has a concrete preimage, decided
        // exactly by searching (state, consumed-prefix) pairs
        for (const auto& w : oracles::closed_language(p, 6)) {
            std::set<std::pair<StateId, size_t>> seen{{a.initial, 0}};
            std::deque<std::pair<StateId, size_t>> dq{{a.initial, 0}};
            bool has_preimage = false;
            while (!dq.empty() && !has_preimage) {
                auto [q, pos] = dq.front();
                dq.pop_front();
                if (pos == w.size()) has_preimage = true;
                for (const auto& [e, t] : a.next[static_cast<size_t>(q)]) {
                    size_t npos = pos;
                    if (sigma.contains(e)) {
                        if (pos >= w.size() || w[pos] != e) continue;
                        npos = pos + 1;
                    }
                    if (seen.insert({t, npos}).second) dq.emplace_back(t, npos);
                }
            }
            CHECK(has_preimage);
        }
    }
}

TEST_CASE("projection rejects events outside the alphabet") {
    auto reg = fresh_registry();
    Automaton a = chain(reg, {"a"}, 1);
    EventSet other = make_events(reg, {"zz"});
    CHECK_THROWS_AS(natural_projection(a, other), std::invalid_argument);
}

TEST_CASE("universal automaton accepts every string over its alphabet") {
    auto reg = fresh_registry();
    EventSet events = make_events(reg, {"p", "q"});
    Automaton u = universal(reg, events);
    CHECK(u.num_states() == 1);
    CHECK(u.num_transitions() == 2);
    EventId p = reg->find("p"), q = reg->find("q");
    CHECK(accepts(u, {p, q, q, p}) == Membership::in_marked);
    CHECK_THROWS_AS(universal(reg, EventSet{}), std::invalid_argument);
    for (const auto& w : oracles::marked_language(u, 4)) CHECK(w.size() <= 4);
    CHECK(oracles::marked_language(u, 4).size() == 31);  // 2^0+...+2^4
}

TEST_CASE("accepts classifies strings") {
    auto reg = fresh_registry();
    SUBCASE("empty string on a marked initial state") {
        Automaton a = chain(reg, {"a"}, 0);
        CHECK(accepts(a, {}) == Membership::in_marked);
    }
    SUBCASE("empty string on an unmarked initial state") {
        Automaton a = chain(reg, {"a"}, 1);
        CHECK(accepts(a, {}) == Membership::in_closed);
    }
    SUBCASE("unknown events are rejected") {
        Automaton a = chain(reg, {"a"}, 1);
        EventId stray = reg->intern("stray", true);
        CHECK_THROWS_AS(accepts(a, {stray}), std::invalid_argument);
    }
}

TEST_CASE("language equivalence is invariant under renumbering and sensitive to marking") {
    auto reg = fresh_registry();
    EventSet events = make_events(reg, {"a", "b"});
    oracles::Rng rng(1010);
    for (int i = 0; i < 60; ++i) {
        Automaton a = trim(oracles::random_automaton(reg, events, 5, rng));
        if (a.is_empty()) continue;
        // renumber by reversing state ids
        Automaton rev = Automaton::empty(reg, a.alphabet);
        int n = a.num_states();
        for (int q = 0; q < n; ++q) rev.add_state(a.marked[static_cast<size_t>(n - 1 - q)]);
        rev.initial = n - 1 - a.initial;
        for (StateId q = 0; q < n; ++q)
            for (const auto& [e, t] : a.next[static_cast<size_t>(q)])
                rev.add_transition(n - 1 - q, e, n - 1 - t);
        CHECK(language_equivalent(a, rev));
    }
    // unmarking a language-relevant state breaks equivalence
    Automaton a = chain(reg, {"a", "b"}, 2);
    Automaton b = a;
    b.marked[2] = false;
    b.marked[1] = true;
    CHECK_FALSE(language_equivalent(a, b));
}

TEST_CASE("language equivalence agrees with bounded membership comparison") {
    auto reg = fresh_registry();
    EventSet events = make_events(reg, {"a", "b"});
    oracles::Rng rng(1011);
    for (int i = 0; i < 120; ++i) {
        Automaton a = oracles::random_automaton(reg, events, 5, rng);
        Automaton b = oracles::random_automaton(reg, events, 5, rng);
        size_t bound = static_cast<size_t>(std::max(1, a.num_states() * b.num_states() + 1));
        Automaton ta = trim(a), tb = trim(b);
        bool oracle = oracles::closed_language(ta, bound) == oracles::closed_language(tb, bound) &&
                      oracles::marked_language(ta, bound) == oracles::marked_language(tb, bound);
        CHECK(language_equivalent(a, b) == oracle);
    }
}

TEST_CASE("equivalence behaves like an equivalence relation on a random pool") {
    auto reg = fresh_registry();
    EventSet events = make_events(reg, {"a", "b"});
    oracles::Rng rng(1012);
    std::vector<Automaton> pool;
    for (int i = 0; i < 8; ++i) pool.push_back(oracles::random_automaton(reg, events, 4, rng));
    for (const auto& a : pool) CHECK(language_equivalent(a, a));
    for (const auto& a : pool)
        for (const auto& b : pool) CHECK(language_equivalent(a, b) == language_equivalent(b, a));
    for (const auto& a : pool)
        for (const auto& b : pool)
            for (const auto& c : pool)
                if (language_equivalent(a, b) && language_equivalent(b, c))
                    CHECK(language_equivalent(a, c));
}

TEST_CASE("minimize yields the least automaton for the language") {
    auto reg = fresh_registry();
    EventSet events = make_events(reg, {"a", "b"});
    oracles::Rng rng(1013);
    for (int i = 0; i < 60; ++i) {
        Automaton a = trim(oracles::random_automaton(reg, events, 6, rng));
        if (a.is_empty()) continue;
        Automaton m = minimize(a);
        CHECK(language_equivalent(a, m));
        CHECK(m.num_states() <= a.num_states());
        CHECK(minimize(m).num_states() == m.num_states());
    }
}

TEST_CASE("automaton text format round-trips and rejects duplicates") {
    auto reg = fresh_registry();
    Automaton a = chain(reg, {"a", "b"}, 2);
    std::ostringstream out;
    write_automaton(out, a, "round trip");
    auto reg2 = fresh_registry();
    std::istringstream in(out.str());
    Automaton b = parse_automaton(in, reg2, "<test>");
    CHECK(b.num_states() == a.num_states());
    CHECK(b.num_transitions() == a.num_transitions());

    std::istringstream bad("states 2\ninitial 0\nevent a c\ntrans 0 a 1\ntrans 0 a 0\n");
    CHECK_THROWS_AS(parse_automaton(bad, fresh_registry(), "<bad>"), ParseError);

    std::istringstream conflict("states 1\ninitial 0\nevent a c\nevent a u\n");
    CHECK_THROWS_AS(parse_automaton(conflict, fresh_registry(), "<conflict>"), ParseError);
}

TEST_CASE("dot export mentions every state and the initial arrow") {
    auto reg = fresh_registry();
    Automaton a = chain(reg, {"a"}, 1);
    std::ostringstream out;
    write_dot(out, a, "g");
    std::string dot = out.str();
    CHECK(dot.find("doublecircle") != std::string::npos);
    CHECK(dot.find("__init -> q0") != std::string::npos);
    CHECK(dot.find("label=\"a\"") != std::string::npos);
}
