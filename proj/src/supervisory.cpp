#include "decs/supervisory.hpp"

#include "decs/errors.hpp"

#include <array>
#include <deque>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace decs {

namespace {

constexpr StateId kDead = -1;

struct TupleHash {
    size_t operator()(const std::array<StateId, 4>& t) const {
        size_t h = 1469598103934665603ull;
        for (StateId x : t) {
            h ^= static_cast<size_t>(x + 1) + 0x9e3779b97f4a7c15ull;
            h *= 1099511628211ull;
        }
        return h;
    }
};

EventSet uncontrollable_events(const Automaton& a) {
    EventSet out;
    for (EventId e : a.alphabet)
        if (!a.registry->controllable(e)) out.insert(e);
    return out;
}

}  // namespace

ControllabilityResult is_controllable(const Automaton& k0, const Automaton& plant) {
    if (k0.registry != plant.registry)
        throw std::invalid_argument("operands belong to different model universes");
    if (k0.alphabet != plant.alphabet)
        throw std::invalid_argument("is_controllable requires equal alphabets");
    Automaton k = trim(k0);
    ControllabilityResult res;
    if (k.is_empty() || plant.is_empty()) return res;

    EventSet unc = uncontrollable_events(plant);
    const uint64_t np = static_cast<uint64_t>(plant.num_states());
    auto key = [np](StateId qk, StateId qp) {
        return static_cast<uint64_t>(qk) * np + static_cast<uint64_t>(qp);
    };
    std::unordered_map<uint64_t, std::pair<uint64_t, EventId>> parent;  // key -> (parent key, event)
    std::deque<std::pair<StateId, StateId>> dq{{k.initial, plant.initial}};
    uint64_t start = key(k.initial, plant.initial);
    parent.emplace(start, std::make_pair(start, EventId{-1}));

    auto rebuild = [&](uint64_t at) {
        std::vector<EventId> s;
        while (true) {
            auto [p, e] = parent.at(at);
            if (p == at) break;
            s.push_back(e);
            at = p;
        }
        std::reverse(s.begin(), s.end());
        return s;
    };

    while (!dq.empty()) {
        auto [qk, qp] = dq.front();
        dq.pop_front();
        for (EventId e : unc) {
            if (plant.successor(qp, e) && !k.successor(qk, e)) {
                res.controllable = false;
                res.witness_string = rebuild(key(qk, qp));
                res.witness_event = e;
                return res;
            }
        }
        for (const auto& [e, tk] : k.next[static_cast<size_t>(qk)]) {
            auto tp = plant.successor(qp, e);
            if (!tp) continue;  // prefix left the plant, no further uncontrollable demands
            uint64_t kk = key(tk, *tp);
            if (parent.find(kk) == parent.end()) {
                parent.emplace(kk, std::make_pair(key(qk, qp), e));
                dq.emplace_back(tk, *tp);
            }
        }
    }
    return res;
}

Automaton supcon(const Automaton& spec, const Automaton& plant) {
    if (spec.registry != plant.registry)
        throw std::invalid_argument("operands belong to different model universes");
    if (spec.is_empty() || plant.is_empty())
        return Automaton::empty(plant.registry, plant.alphabet);

    // product of the lifted spec with the plant; spec events outside the
    // plant alphabet cannot occur and are ignored
    const uint64_t np = static_cast<uint64_t>(plant.num_states());
    auto key = [np](StateId qc, StateId qp) {
        return static_cast<uint64_t>(qc) * np + static_cast<uint64_t>(qp);
    };
    std::unordered_map<uint64_t, StateId> index;
    std::vector<std::pair<StateId, StateId>> states;
    auto get = [&](StateId qc, StateId qp) {
        auto [it, inserted] = index.try_emplace(key(qc, qp), static_cast<StateId>(states.size()));
        if (inserted) states.emplace_back(qc, qp);
        return it->second;
    };
    get(spec.initial, plant.initial);
    std::vector<std::vector<std::pair<EventId, StateId>>> trans;
    for (size_t i = 0; i < states.size(); ++i) {
        auto [qc, qp] = states[i];
        trans.emplace_back();
        for (const auto& [e, tp] : plant.next[static_cast<size_t>(qp)]) {
            std::optional<StateId> tc;
            if (spec.alphabet.contains(e)) tc = spec.successor(qc, e);
            else tc = qc;  // lifted self-loop
            if (!tc) continue;
            trans[i].emplace_back(e, get(*tc, tp));
        }
    }
    const int n = static_cast<int>(states.size());
    std::vector<bool> is_marked(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        is_marked[static_cast<size_t>(i)] = spec.marked[static_cast<size_t>(states[i].first)] &&
                                            plant.marked[static_cast<size_t>(states[i].second)];

    EventSet unc = uncontrollable_events(plant);
    std::vector<bool> alive(static_cast<size_t>(n), true);
    while (true) {
        bool changed = false;
        // uncontrollable violations against the plant
        for (int i = 0; i < n; ++i) {
            if (!alive[static_cast<size_t>(i)]) continue;
            StateId qp = states[static_cast<size_t>(i)].second;
            for (EventId e : unc) {
                if (!plant.successor(qp, e)) continue;
                bool ok = false;
                for (const auto& [te, tt] : trans[static_cast<size_t>(i)])
                    if (te == e && alive[static_cast<size_t>(tt)]) { ok = true; break; }
                if (!ok) {
                    alive[static_cast<size_t>(i)] = false;
                    changed = true;
                    break;
                }
            }
        }
        if (!alive[0]) return Automaton::empty(plant.registry, plant.alphabet);
        // reachable within alive
        std::vector<bool> reach(static_cast<size_t>(n), false);
        std::deque<int> dq{0};
        reach[0] = true;
        while (!dq.empty()) {
            int q = dq.front();
            dq.pop_front();
            for (const auto& [e, t] : trans[static_cast<size_t>(q)]) {
                (void)e;
                if (alive[static_cast<size_t>(t)] && !reach[static_cast<size_t>(t)]) {
                    reach[static_cast<size_t>(t)] = true;
                    dq.push_back(t);
                }
            }
        }
        // coreachable within alive & reachable
        std::vector<std::vector<int>> rev(static_cast<size_t>(n));
        for (int q = 0; q < n; ++q) {
            if (!reach[static_cast<size_t>(q)]) continue;
            for (const auto& [e, t] : trans[static_cast<size_t>(q)]) {
                (void)e;
                if (reach[static_cast<size_t>(t)]) rev[static_cast<size_t>(t)].push_back(q);
            }
        }
        std::vector<bool> co(static_cast<size_t>(n), false);
        std::deque<int> cq;
        for (int q = 0; q < n; ++q)
            if (reach[static_cast<size_t>(q)] && is_marked[static_cast<size_t>(q)]) {
                co[static_cast<size_t>(q)] = true;
                cq.push_back(q);
            }
        while (!cq.empty()) {
            int q = cq.front();
            cq.pop_front();
            for (int p : rev[static_cast<size_t>(q)])
                if (!co[static_cast<size_t>(p)]) {
                    co[static_cast<size_t>(p)] = true;
                    cq.push_back(p);
                }
        }
        for (int q = 0; q < n; ++q) {
            bool keep = reach[static_cast<size_t>(q)] && co[static_cast<size_t>(q)];
            if (alive[static_cast<size_t>(q)] != keep) {
                alive[static_cast<size_t>(q)] = keep;
                changed = true;
            }
        }
        if (!alive[0]) return Automaton::empty(plant.registry, plant.alphabet);
        if (!changed) break;
    }

    Automaton out = Automaton::empty(plant.registry, plant.alphabet);
    std::vector<StateId> remap(static_cast<size_t>(n), -1);
    for (int q = 0; q < n; ++q)
        if (alive[static_cast<size_t>(q)]) remap[static_cast<size_t>(q)] = out.add_state(is_marked[static_cast<size_t>(q)]);
    out.initial = remap[0];
    for (int q = 0; q < n; ++q) {
        if (!alive[static_cast<size_t>(q)]) continue;
        for (const auto& [e, t] : trans[static_cast<size_t>(q)])
            if (alive[static_cast<size_t>(t)])
                out.add_transition(remap[static_cast<size_t>(q)], e, remap[static_cast<size_t>(t)]);
    }
    return renumber_bfs(out);
}

ObservabilityResult is_observable(const Automaton& k0, const Automaton& plant,
                                  const EventSet& observable_set) {
    if (k0.registry != plant.registry)
        throw std::invalid_argument("operands belong to different model universes");
    if (!observable_set.is_subset_of(plant.alphabet))
        throw std::invalid_argument("observable set is not a subset of the alphabet");
    if (k0.alphabet != plant.alphabet)
        throw std::invalid_argument("is_observable requires equal alphabets");
    Automaton k = trim(k0);
    ObservabilityResult res;
    if (k.is_empty()) return res;

    // verifier state: (x_k, y_k, x_plant, y_plant) for string pairs (s, s')
    // with equal projections; plant components may be dead (-1)
    using Tup = std::array<StateId, 4>;
    struct Move {
        Tup from;
        EventId event;
        int side;  // 0 = s, 1 = s', 2 = both
    };
    std::unordered_map<Tup, Move, TupleHash> parent;
    std::deque<Tup> dq;
    Tup start{k.initial, k.initial, plant.initial, plant.initial};
    parent.emplace(start, Move{start, -1, -1});
    dq.push_back(start);

    auto rebuild = [&](Tup at) {
        std::vector<EventId> s, sp;
        while (true) {
            const Move& mv = parent.at(at);
            if (mv.side < 0) break;
            if (mv.side == 0 || mv.side == 2) s.push_back(mv.event);
            if (mv.side == 1 || mv.side == 2) sp.push_back(mv.event);
            at = mv.from;
        }
        std::reverse(s.begin(), s.end());
        std::reverse(sp.begin(), sp.end());
        return std::make_pair(s, sp);
    };

    auto plant_succ = [&](StateId qp, EventId e) -> StateId {
        if (qp == kDead) return kDead;
        auto t = plant.successor(qp, e);
        return t ? *t : kDead;
    };
    auto plant_marked = [&](StateId qp) { return qp != kDead && plant.marked[static_cast<size_t>(qp)]; };

    while (!dq.empty()) {
        Tup cur = dq.front();
        dq.pop_front();
        auto [xk, yk, xp, yp] = cur;
        // condition 1, both orientations
        for (EventId e : plant.alphabet) {
            if (k.successor(xk, e) && yp != kDead && plant.successor(yp, e) && !k.successor(yk, e)) {
                res.observable = false;
                std::tie(res.witness_s, res.witness_s_prime) = rebuild(cur);
                res.witness_event = e;
                return res;
            }
            if (k.successor(yk, e) && xp != kDead && plant.successor(xp, e) && !k.successor(xk, e)) {
                res.observable = false;
                std::tie(res.witness_s_prime, res.witness_s) = rebuild(cur);
                res.witness_event = e;
                return res;
            }
        }
        // condition 2, both orientations
        bool xm = k.marked[static_cast<size_t>(xk)];
        bool ym = k.marked[static_cast<size_t>(yk)];
        if ((xm && plant_marked(yp) && !ym) || (ym && plant_marked(xp) && !xm)) {
            res.observable = false;
            std::tie(res.witness_s, res.witness_s_prime) = rebuild(cur);
            if (!xm) std::swap(res.witness_s, res.witness_s_prime);
            res.witness_event = std::nullopt;
            return res;
        }
        for (EventId e : plant.alphabet) {
            auto xk2 = k.successor(xk, e);
            auto yk2 = k.successor(yk, e);
            if (observable_set.contains(e)) {
                if (xk2 && yk2) {
                    Tup t{*xk2, *yk2, plant_succ(xp, e), plant_succ(yp, e)};
                    if (parent.find(t) == parent.end()) {
                        parent.emplace(t, Move{cur, e, 2});
                        dq.push_back(t);
                    }
                }
            } else {
                if (xk2) {
                    Tup t{*xk2, yk, plant_succ(xp, e), yp};
                    if (parent.find(t) == parent.end()) {
                        parent.emplace(t, Move{cur, e, 0});
                        dq.push_back(t);
                    }
                }
                if (yk2) {
                    Tup t{xk, *yk2, xp, plant_succ(yp, e)};
                    if (parent.find(t) == parent.end()) {
                        parent.emplace(t, Move{cur, e, 1});
                        dq.push_back(t);
                    }
                }
            }
        }
    }
    return res;
}

bool is_coordinable(const Automaton& k, const std::vector<Automaton>& agents,
                    const EventSet& sigma_com) {
    if (agents.empty()) throw std::invalid_argument("is_coordinable needs at least one agent");
    Automaton plant = sync_product(agents);
    if (!is_controllable(k, plant).controllable) return false;
    for (const Automaton& agent : agents) {
        EventSet view = unite(agent.alphabet, sigma_com);
        if (!is_observable(k, plant, view).observable) return false;
    }
    return true;
}

EventSet min_sys_com_set(const Automaton& k, const std::vector<Automaton>& agents) {
    if (agents.empty()) throw std::invalid_argument("min_sys_com_set needs at least one agent");
    Automaton plant = sync_product(agents);
    if (!is_controllable(k, plant).controllable)
        throw DomainError("min_sys_com_set: language is not controllable, no communication set exists");

    std::vector<std::string> names = sorted_names(*plant.registry, plant.alphabet);
    std::vector<EventId> pool;
    pool.reserve(names.size());
    for (const auto& nm : names) pool.push_back(plant.registry->find(nm));

    // observability depends only on the per-agent view; memoize per view
    std::vector<std::map<std::vector<EventId>, bool>> memo(agents.size());
    auto coordinable_with = [&](const EventSet& com) {
        for (size_t i = 0; i < agents.size(); ++i) {
            EventSet view = unite(agents[i].alphabet, com);
            auto [it, inserted] = memo[i].try_emplace(view.ids(), false);
            if (inserted) it->second = is_observable(k, plant, view).observable;
            if (!it->second) return false;
        }
        return true;
    };

    const size_t m = pool.size();
    for (size_t card = 0; card <= m; ++card) {
        std::vector<size_t> idx(card);
        for (size_t i = 0; i < card; ++i) idx[i] = i;
        while (true) {
            std::vector<EventId> chosen;
            chosen.reserve(card);
            for (size_t i : idx) chosen.push_back(pool[i]);
            EventSet com{std::move(chosen)};
            if (coordinable_with(com)) return com;
            if (card == 0) break;
            // next combination in lexicographic order over the name-sorted pool
            size_t i = card;
            while (i > 0 && idx[i - 1] == m - card + i - 1) --i;
            if (i == 0) break;
            ++idx[i - 1];
            for (size_t j = i; j < card; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    return plant.alphabet;  // full alphabet always succeeds
}

ProjectionCheck is_observer(const Automaton& sup0, const EventSet& sigma) {
    if (!sigma.is_subset_of(sup0.alphabet))
        throw std::invalid_argument("observer event set is not a subset of the alphabet");
    Automaton sup = trim(sup0);
    ProjectionCheck res;
    if (sup.is_empty()) return res;
    EventSet erased = subtract(sup.alphabet, sigma);

    // abstract marked continuations per state, canonicalized once
    std::vector<std::optional<Automaton>> abs(static_cast<size_t>(sup.num_states()));
    auto abstract_of = [&](StateId q) -> const Automaton& {
        auto& slot = abs[static_cast<size_t>(q)];
        if (!slot) {
            Automaton rooted = sup;
            rooted.initial = q;
            slot = minimize(natural_projection(rooted, sigma));
        }
        return *slot;
    };
    std::map<std::pair<StateId, StateId>, bool> eq_memo;
    auto same_future = [&](StateId x, StateId y) {
        auto key = std::minmax(x, y);
        auto [it, inserted] = eq_memo.try_emplace(key, false);
        if (inserted) it->second = language_equivalent(abstract_of(x), abstract_of(y));
        return it->second;
    };

    auto closure = [&](std::vector<StateId> set) {
        std::vector<bool> in(static_cast<size_t>(sup.num_states()), false);
        for (StateId q : set) in[static_cast<size_t>(q)] = true;
        std::deque<StateId> dq(set.begin(), set.end());
        while (!dq.empty()) {
            StateId q = dq.front();
            dq.pop_front();
            for (EventId e : erased) {
                auto t = sup.successor(q, e);
                if (t && !in[static_cast<size_t>(*t)]) {
                    in[static_cast<size_t>(*t)] = true;
                    set.push_back(*t);
                    dq.push_back(*t);
                }
            }
        }
        std::sort(set.begin(), set.end());
        return set;
    };

    struct SubsetInfo {
        int parent = -1;
        EventId via = -1;
    };
    std::map<std::vector<StateId>, int> index;
    std::vector<std::vector<StateId>> subsets;
    std::vector<SubsetInfo> info;
    subsets.push_back(closure({sup.initial}));
    index[subsets[0]] = 0;
    info.push_back({});

    auto abstract_access = [&](int si) {
        std::vector<EventId> w;
        while (info[static_cast<size_t>(si)].parent >= 0) {
            w.push_back(info[static_cast<size_t>(si)].via);
            si = info[static_cast<size_t>(si)].parent;
        }
        std::reverse(w.begin(), w.end());
        return w;
    };

    // concrete string with projection w reaching target, found by BFS over
    // (state, consumed prefix length)
    auto realize = [&](const std::vector<EventId>& w, StateId target) {
        struct Node {
            StateId q;
            size_t pos;
        };
        auto nk = [&](StateId q, size_t pos) {
            return static_cast<uint64_t>(q) * (w.size() + 1) + pos;
        };
        std::unordered_map<uint64_t, std::pair<uint64_t, EventId>> par;
        std::deque<Node> dq{{sup.initial, 0}};
        par.emplace(nk(sup.initial, 0), std::make_pair(nk(sup.initial, 0), EventId{-1}));
        while (!dq.empty()) {
            auto [q, pos] = dq.front();
            dq.pop_front();
            if (q == target && pos == w.size()) {
                std::vector<EventId> s;
                uint64_t at = nk(q, pos);
                while (true) {
                    auto [p, e] = par.at(at);
                    if (p == at) break;
                    s.push_back(e);
                    at = p;
                }
                std::reverse(s.begin(), s.end());
                return s;
            }
            for (const auto& [e, t] : sup.next[static_cast<size_t>(q)]) {
                size_t npos = pos;
                if (sigma.contains(e)) {
                    if (pos >= w.size() || w[pos] != e) continue;
                    npos = pos + 1;
                }
                uint64_t kk = nk(t, npos);
                if (par.find(kk) == par.end()) {
                    par.emplace(kk, std::make_pair(nk(q, pos), e));
                    dq.push_back({t, npos});
                }
            }
        }
        return std::vector<EventId>{};
    };

    for (size_t si = 0; si < subsets.size(); ++si) {
        const auto S = subsets[si];  // by value: the vector grows inside the loop
        for (size_t j = 1; j < S.size(); ++j) {
            if (!same_future(S[0], S[j])) {
                res.holds = false;
                auto w = abstract_access(static_cast<int>(si));
                res.witness_a = realize(w, S[0]);
                res.witness_b = realize(w, S[j]);
                for (EventId e : res.witness_a)
                    if (!sigma.contains(e)) res.suggested.insert(e);
                for (EventId e : res.witness_b)
                    if (!sigma.contains(e)) res.suggested.insert(e);
                return res;
            }
        }
        for (EventId e : sigma) {
            std::vector<StateId> tgt;
            for (StateId q : S) {
                auto t = sup.successor(q, e);
                if (t) tgt.push_back(*t);
            }
            if (tgt.empty()) continue;
            std::sort(tgt.begin(), tgt.end());
            tgt.erase(std::unique(tgt.begin(), tgt.end()), tgt.end());
            auto T = closure(std::move(tgt));
            auto [it, inserted] = index.try_emplace(T, static_cast<int>(subsets.size()));
            if (inserted) {
                subsets.push_back(T);
                info.push_back({static_cast<int>(si), e});
            }
        }
    }
    return res;
}

ProjectionCheck is_occ(const Automaton& a, const EventSet& sigma) {
    if (!sigma.is_subset_of(a.alphabet))
        throw std::invalid_argument("occ event set is not a subset of the alphabet");
    ProjectionCheck res;
    if (a.is_empty()) return res;

    std::vector<bool> reach(static_cast<size_t>(a.num_states()), false);
    std::vector<std::pair<StateId, EventId>> how(static_cast<size_t>(a.num_states()), {-1, -1});
    std::deque<StateId> dq{a.initial};
    reach[static_cast<size_t>(a.initial)] = true;
    while (!dq.empty()) {
        StateId q = dq.front();
        dq.pop_front();
        for (const auto& [e, t] : a.next[static_cast<size_t>(q)])
            if (!reach[static_cast<size_t>(t)]) {
                reach[static_cast<size_t>(t)] = true;
                how[static_cast<size_t>(t)] = {q, e};
                dq.push_back(t);
            }
    }
    auto access_string = [&](StateId q) {
        std::vector<EventId> s;
        while (how[static_cast<size_t>(q)].first >= 0) {
            s.push_back(how[static_cast<size_t>(q)].second);
            q = how[static_cast<size_t>(q)].first;
        }
        std::reverse(s.begin(), s.end());
        return s;
    };

    // states enabling an observable uncontrollable event, then backward
    // closure through unobservable transitions
    std::vector<bool> hot(static_cast<size_t>(a.num_states()), false);
    for (StateId q = 0; q < a.num_states(); ++q) {
        if (!reach[static_cast<size_t>(q)]) continue;
        for (const auto& [e, t] : a.next[static_cast<size_t>(q)]) {
            (void)t;
            if (sigma.contains(e) && !a.registry->controllable(e)) {
                hot[static_cast<size_t>(q)] = true;
                break;
            }
        }
    }
    std::vector<std::vector<std::pair<StateId, EventId>>> rev_unobs(static_cast<size_t>(a.num_states()));
    for (StateId q = 0; q < a.num_states(); ++q) {
        if (!reach[static_cast<size_t>(q)]) continue;
        for (const auto& [e, t] : a.next[static_cast<size_t>(q)])
            if (!sigma.contains(e)) rev_unobs[static_cast<size_t>(t)].emplace_back(q, e);
    }
    std::vector<bool> warm = hot;  // can reach a hot state via unobservable events
    std::vector<std::pair<StateId, EventId>> fwd(static_cast<size_t>(a.num_states()), {-1, -1});
    std::deque<StateId> wq;
    for (StateId q = 0; q < a.num_states(); ++q)
        if (warm[static_cast<size_t>(q)]) wq.push_back(q);
    while (!wq.empty()) {
        StateId q = wq.front();
        wq.pop_front();
        for (const auto& [p, e] : rev_unobs[static_cast<size_t>(q)])
            if (!warm[static_cast<size_t>(p)]) {
                warm[static_cast<size_t>(p)] = true;
                fwd[static_cast<size_t>(p)] = {q, e};
                wq.push_back(p);
            }
    }

    for (StateId q = 0; q < a.num_states(); ++q) {
        if (!reach[static_cast<size_t>(q)]) continue;
        for (const auto& [e, t] : a.next[static_cast<size_t>(q)]) {
            if (sigma.contains(e) || !a.registry->controllable(e)) continue;
            if (!warm[static_cast<size_t>(t)]) continue;
            res.holds = false;
            res.witness_a = access_string(q);
            std::vector<EventId> segment{e};
            StateId at = t;
            while (!hot[static_cast<size_t>(at)]) {
                auto [nxt, ne] = fwd[static_cast<size_t>(at)];
                segment.push_back(ne);
                at = nxt;
            }
            res.witness_b = segment;
            for (EventId se : segment)
                if (!sigma.contains(se)) res.suggested.insert(se);
            return res;
        }
    }
    return res;
}

EventSet enlarge_event_set(const EventSet& base, const std::vector<PropertyRequirement>& requirements) {
    auto passes = [&](const Automaton& aut, PropertyRequirement::Kind kind, const EventSet& cur,
                      EventSet* suggested) {
        EventSet view = intersect(cur, aut.alphabet);
        ProjectionCheck check = kind == PropertyRequirement::Kind::observer
                                    ? is_observer(aut, view)
                                    : is_occ(aut, view);
        if (!check.holds && suggested) *suggested = check.suggested;
        return check.holds;
    };

    EventSet cur = base;
    bool progressing = true;
    while (progressing) {
        progressing = false;
        for (const auto& req : requirements) {
            EventSet suggested;
            if (!passes(*req.automaton, req.kind, cur, &suggested)) {
                if (suggested.empty()) suggested = subtract(req.automaton->alphabet, cur);
                cur = unite(cur, suggested);
                progressing = true;
                break;
            }
        }
    }
    // shrink pass: drop single additions that turned out unnecessary
    if (!requirements.empty()) {
        std::vector<std::string> names;
        for (EventId e : subtract(cur, base)) names.push_back((*requirements[0].automaton).registry->name(e));
        std::sort(names.begin(), names.end());
        for (const auto& nm : names) {
            EventId e = requirements[0].automaton->registry->find(nm);
            EventSet trial = cur;
            trial.erase(e);
            bool ok = true;
            for (const auto& req : requirements)
                if (!passes(*req.automaton, req.kind, trial, nullptr)) { ok = false; break; }
            if (ok) cur = trial;
        }
    }
    return cur;
}

Automaton cm_from(const Automaton& sup, const EventSet& sigma) {
    Automaton cm = minimize(natural_projection(sup, sigma));
    cm.alphabet = sigma;  // keep the full view alphabet even if not all events occur
    return cm;
}

namespace {

struct ReduceInfo {
    std::vector<EventSet> enabled;   // exercised events per state
    std::vector<EventSet> disabled;  // disabled while the context allows
    std::vector<bool> mark_true, mark_false;
};

ReduceInfo reduce_info(const Automaton& s, const Automaton& a) {
    ReduceInfo info;
    info.enabled.resize(static_cast<size_t>(s.num_states()));
    info.disabled.resize(static_cast<size_t>(s.num_states()));
    info.mark_true.assign(static_cast<size_t>(s.num_states()), false);
    info.mark_false.assign(static_cast<size_t>(s.num_states()), false);
    if (s.is_empty() || a.is_empty()) return info;
    EventSet all = unite(s.alphabet, a.alphabet);
    const uint64_t na = static_cast<uint64_t>(a.num_states());
    std::unordered_set<uint64_t> seen;
    std::deque<std::pair<StateId, StateId>> dq{{s.initial, a.initial}};
    seen.insert(static_cast<uint64_t>(s.initial) * na + static_cast<uint64_t>(a.initial));
    while (!dq.empty()) {
        auto [xs, xa] = dq.front();
        dq.pop_front();
        if (a.marked[static_cast<size_t>(xa)]) {
            if (s.marked[static_cast<size_t>(xs)]) info.mark_true[static_cast<size_t>(xs)] = true;
            else info.mark_false[static_cast<size_t>(xs)] = true;
        }
        for (EventId e : all) {
            bool in_s = s.alphabet.contains(e);
            bool in_a = a.alphabet.contains(e);
            std::optional<StateId> ts = in_s ? s.successor(xs, e) : std::optional<StateId>(xs);
            std::optional<StateId> ta = in_a ? a.successor(xa, e) : std::optional<StateId>(xa);
            if (in_s && ta) {
                if (ts) info.enabled[static_cast<size_t>(xs)].insert(e);
                else info.disabled[static_cast<size_t>(xs)].insert(e);
            }
            if (ts && ta) {
                uint64_t k = static_cast<uint64_t>(*ts) * na + static_cast<uint64_t>(*ta);
                if (seen.insert(k).second) dq.emplace_back(*ts, *ta);
            }
        }
    }
    return info;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<size_t>(n)) {
        for (int i = 0; i < n; ++i) parent[static_cast<size_t>(i)] = i;
    }
    int find(int x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    }
    void unite(int x, int y) {
        int rx = find(x), ry = find(y);
        if (rx != ry) parent[static_cast<size_t>(std::max(rx, ry))] = std::min(rx, ry);
    }
};

// Merge seed pair, propagate forced merges over exercised transitions,
// check enablement/disablement and marking compatibility; null on conflict.
std::optional<Automaton> try_merge(const Automaton& s, const ReduceInfo& info, int i, int j) {
    const int n = s.num_states();
    UnionFind uf(n);
    uf.unite(i, j);
    bool stable = false;
    while (!stable) {
        stable = true;
        std::map<int, std::vector<int>> classes;
        for (int q = 0; q < n; ++q) classes[uf.find(q)].push_back(q);
        for (const auto& [root, members] : classes) {
            (void)root;
            for (EventId e : s.alphabet) {
                int first = -1;
                for (int q : members) {
                    if (!info.enabled[static_cast<size_t>(q)].contains(e)) continue;
                    int t = uf.find(*s.successor(q, e));
                    if (first < 0) first = t;
                    else if (t != first) {
                        uf.unite(first, t);
                        first = std::min(first, t);
                        stable = false;
                    }
                }
            }
        }
    }
    std::map<int, std::vector<int>> classes;
    for (int q = 0; q < n; ++q) classes[uf.find(q)].push_back(q);
    for (const auto& [root, members] : classes) {
        (void)root;
        EventSet enb, dis;
        bool mt = false, mf = false;
        for (int q : members) {
            enb = unite(enb, info.enabled[static_cast<size_t>(q)]);
            dis = unite(dis, info.disabled[static_cast<size_t>(q)]);
            mt = mt || info.mark_true[static_cast<size_t>(q)];
            mf = mf || info.mark_false[static_cast<size_t>(q)];
        }
        if (!intersect(enb, dis).empty()) return std::nullopt;
        if (mt && mf) return std::nullopt;
    }
    Automaton out = Automaton::empty(s.registry, s.alphabet);
    std::map<int, StateId> id_of;
    for (const auto& [root, members] : classes) {
        bool m = false;
        for (int q : members)
            if (s.marked[static_cast<size_t>(q)]) { m = true; break; }
        id_of[root] = out.add_state(m);
    }
    out.initial = id_of.at(uf.find(s.initial));
    for (int q = 0; q < n; ++q) {
        StateId from = id_of.at(uf.find(q));
        for (EventId e : info.enabled[static_cast<size_t>(q)].ids()) {
            StateId to = id_of.at(uf.find(*s.successor(q, e)));
            if (!out.successor(from, e)) out.add_transition(from, e, to);
        }
    }
    return out;
}

}  // namespace

Automaton cm_reduce(const Automaton& s, const Automaton& a) {
    if (s.registry != a.registry)
        throw std::invalid_argument("operands belong to different model universes");
    if (s.is_empty()) return s;
    Automaton reference = sync_product(a, s);
    Automaton cur = s;
    while (true) {
        ReduceInfo info = reduce_info(cur, a);
        bool merged = false;
        for (int i = 0; i < cur.num_states() && !merged; ++i) {
            for (int j = i + 1; j < cur.num_states() && !merged; ++j) {
                auto cand = try_merge(cur, info, i, j);
                if (!cand || cand->num_states() >= cur.num_states()) continue;
                if (language_equivalent(sync_product(a, *cand), reference)) {
                    cur = std::move(*cand);
                    merged = true;
                }
            }
        }
        if (!merged) break;
    }
    // drop transitions the context can never exercise
    ReduceInfo info = reduce_info(cur, a);
    Automaton pruned = Automaton::empty(cur.registry, cur.alphabet);
    for (StateId q = 0; q < cur.num_states(); ++q) pruned.add_state(cur.marked[static_cast<size_t>(q)]);
    pruned.initial = cur.initial;
    for (StateId q = 0; q < cur.num_states(); ++q)
        for (const auto& [e, t] : cur.next[static_cast<size_t>(q)])
            if (info.enabled[static_cast<size_t>(q)].contains(e)) pruned.add_transition(q, e, t);
    if (pruned.num_transitions() < cur.num_transitions() &&
        language_equivalent(sync_product(a, pruned), reference))
        cur = std::move(pruned);
    return cur.num_states() <= s.num_states() ? cur : s;
}

bool is_valid_cm(const Automaton& s, const Automaton& agent, const Automaton& system) {
    if (!agent.alphabet.is_subset_of(s.alphabet)) return false;
    if (s.is_empty() || system.is_empty()) return true;
    // the module gates only its agent's events, so the enabling demand is on
    // the agent's own uncontrollable ones; tracking transitions on other
    // agents' events may lag the free system (their own modules gate them),
    // but must never strand the freely interacting system
    if (!is_nonblocking(sync_product(s, system))) return false;
    EventSet watched;
    for (EventId e : intersect(agent.alphabet, system.alphabet))
        if (!s.registry->controllable(e)) watched.insert(e);

    const uint64_t ns = static_cast<uint64_t>(system.num_states());
    std::unordered_set<uint64_t> seen;
    std::deque<std::pair<StateId, StateId>> dq{{s.initial, system.initial}};
    seen.insert(static_cast<uint64_t>(s.initial) * ns + static_cast<uint64_t>(system.initial));
    EventSet all = unite(s.alphabet, system.alphabet);
    while (!dq.empty()) {
        auto [xs, xg] = dq.front();
        dq.pop_front();
        for (EventId e : watched)
            if (system.successor(xg, e) && !s.successor(xs, e)) return false;
        for (EventId e : all) {
            bool in_s = s.alphabet.contains(e);
            bool in_g = system.alphabet.contains(e);
            std::optional<StateId> ts = in_s ? s.successor(xs, e) : std::optional<StateId>(xs);
            std::optional<StateId> tg = in_g ? system.successor(xg, e) : std::optional<StateId>(xg);
            if (!ts || !tg) continue;
            uint64_t k = static_cast<uint64_t>(*ts) * ns + static_cast<uint64_t>(*tg);
            if (seen.insert(k).second) dq.emplace_back(*ts, *tg);
        }
    }
    return true;
}

}  // namespace decs
