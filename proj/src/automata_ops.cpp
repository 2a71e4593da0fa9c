#include "decs/automata_ops.hpp"

#include <deque>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace decs {

namespace {

void require_same_registry(const Automaton& a, const Automaton& b) {
    if (a.registry != b.registry)
        throw std::invalid_argument("operands belong to different model universes");
}

std::vector<bool> reachable_states(const Automaton& a) {
    std::vector<bool> seen(static_cast<size_t>(a.num_states()), false);
    if (a.is_empty()) return seen;
    std::deque<StateId> dq{a.initial};
    seen[static_cast<size_t>(a.initial)] = true;
    while (!dq.empty()) {
        StateId q = dq.front();
        dq.pop_front();
        for (const auto& [e, t] : a.next[static_cast<size_t>(q)]) {
            (void)e;
            if (!seen[static_cast<size_t>(t)]) {
                seen[static_cast<size_t>(t)] = true;
                dq.push_back(t);
            }
        }
    }
    return seen;
}

std::vector<bool> coreachable_states(const Automaton& a, const std::vector<bool>& pool) {
    std::vector<std::vector<StateId>> rev(static_cast<size_t>(a.num_states()));
    for (StateId q = 0; q < a.num_states(); ++q) {
        if (!pool[static_cast<size_t>(q)]) continue;
        for (const auto& [e, t] : a.next[static_cast<size_t>(q)]) {
            (void)e;
            if (pool[static_cast<size_t>(t)]) rev[static_cast<size_t>(t)].push_back(q);
        }
    }
    std::vector<bool> co(static_cast<size_t>(a.num_states()), false);
    std::deque<StateId> dq;
    for (StateId q = 0; q < a.num_states(); ++q) {
        if (pool[static_cast<size_t>(q)] && a.marked[static_cast<size_t>(q)]) {
            co[static_cast<size_t>(q)] = true;
            dq.push_back(q);
        }
    }
    while (!dq.empty()) {
        StateId q = dq.front();
        dq.pop_front();
        for (StateId p : rev[static_cast<size_t>(q)]) {
            if (!co[static_cast<size_t>(p)]) {
                co[static_cast<size_t>(p)] = true;
                dq.push_back(p);
            }
        }
    }
    return co;
}

Automaton restrict_states(const Automaton& a, const std::vector<bool>& keep) {
    if (a.is_empty() || !keep[static_cast<size_t>(a.initial)])
        return Automaton::empty(a.registry, a.alphabet);
    std::vector<StateId> remap(static_cast<size_t>(a.num_states()), -1);
    Automaton out = Automaton::empty(a.registry, a.alphabet);
    for (StateId q = 0; q < a.num_states(); ++q)
        if (keep[static_cast<size_t>(q)])
            remap[static_cast<size_t>(q)] = out.add_state(a.marked[static_cast<size_t>(q)]);
    out.initial = remap[static_cast<size_t>(a.initial)];
    for (StateId q = 0; q < a.num_states(); ++q) {
        if (!keep[static_cast<size_t>(q)]) continue;
        for (const auto& [e, t] : a.next[static_cast<size_t>(q)])
            if (keep[static_cast<size_t>(t)])
                out.add_transition(remap[static_cast<size_t>(q)], e, remap[static_cast<size_t>(t)]);
    }
    if (!a.labels.empty()) {
        out.labels.resize(static_cast<size_t>(out.num_states()));
        for (StateId q = 0; q < a.num_states(); ++q)
            if (keep[static_cast<size_t>(q)])
                out.labels[static_cast<size_t>(remap[static_cast<size_t>(q)])] = a.labels[static_cast<size_t>(q)];
    }
    return out;
}

}  // namespace

Automaton trim(const Automaton& a) {
    if (a.is_empty()) return a;
    auto reach = reachable_states(a);
    auto co = coreachable_states(a, reach);
    std::vector<bool> keep(static_cast<size_t>(a.num_states()));
    for (StateId q = 0; q < a.num_states(); ++q)
        keep[static_cast<size_t>(q)] = reach[static_cast<size_t>(q)] && co[static_cast<size_t>(q)];
    return restrict_states(a, keep);
}

bool is_nonblocking(const Automaton& a) {
    if (a.is_empty()) return true;
    auto reach = reachable_states(a);
    auto co = coreachable_states(a, reach);
    for (StateId q = 0; q < a.num_states(); ++q)
        if (reach[static_cast<size_t>(q)] && !co[static_cast<size_t>(q)]) return false;
    return true;
}

Automaton sync_product(const Automaton& a, const Automaton& b) {
    require_same_registry(a, b);
    EventSet alphabet = unite(a.alphabet, b.alphabet);
    if (a.is_empty() || b.is_empty()) return Automaton::empty(a.registry, alphabet);
    // Shared events agree on controllability by construction: both operands
    // resolve events through the same registry.
    Automaton out = Automaton::empty(a.registry, alphabet);
    const uint64_t nb = static_cast<uint64_t>(b.num_states());
    std::unordered_map<uint64_t, StateId> index;
    std::vector<std::pair<StateId, StateId>> pairs;
    auto key = [nb](StateId qa, StateId qb) {
        return static_cast<uint64_t>(qa) * nb + static_cast<uint64_t>(qb);
    };
    auto get = [&](StateId qa, StateId qb) {
        auto [it, inserted] = index.try_emplace(key(qa, qb), out.num_states());
        if (inserted) {
            out.add_state(a.marked[static_cast<size_t>(qa)] && b.marked[static_cast<size_t>(qb)]);
            pairs.emplace_back(qa, qb);
        }
        return it->second;
    };
    out.initial = get(a.initial, b.initial);
    for (size_t i = 0; i < pairs.size(); ++i) {
        auto [qa, qb] = pairs[i];
        StateId from = static_cast<StateId>(i);
        for (EventId e : alphabet) {
            bool in_a = a.alphabet.contains(e);
            bool in_b = b.alphabet.contains(e);
            std::optional<StateId> ta = in_a ? a.successor(qa, e) : std::optional<StateId>(qa);
            std::optional<StateId> tb = in_b ? b.successor(qb, e) : std::optional<StateId>(qb);
            if (!ta || !tb) continue;
            out.add_transition(from, e, get(*ta, *tb));
        }
    }
    return out;
}

Automaton sync_product(const std::vector<Automaton>& parts) {
    if (parts.empty()) throw std::invalid_argument("sync_product of no automata");
    Automaton acc = parts[0];
    for (size_t i = 1; i < parts.size(); ++i) acc = sync_product(acc, parts[i]);
    return acc;
}

namespace {

struct VecHash {
    size_t operator()(const std::vector<StateId>& v) const {
        size_t h = 1469598103934665603ull;
        for (StateId x : v) {
            h ^= static_cast<size_t>(x) + 0x9e3779b97f4a7c15ull;
            h *= 1099511628211ull;
        }
        return h;
    }
};

}  // namespace

Automaton natural_projection(const Automaton& a, const EventSet& sigma) {
    if (!sigma.is_subset_of(a.alphabet))
        throw std::invalid_argument("projection event set is not a subset of the alphabet");
    if (a.is_empty()) return Automaton::empty(a.registry, sigma);
    EventSet erased = subtract(a.alphabet, sigma);

    auto closure = [&](std::vector<StateId> set) {
        std::vector<bool> in(static_cast<size_t>(a.num_states()), false);
        for (StateId q : set) in[static_cast<size_t>(q)] = true;
        std::deque<StateId> dq(set.begin(), set.end());
        while (!dq.empty()) {
            StateId q = dq.front();
            dq.pop_front();
            for (EventId e : erased) {
                auto t = a.successor(q, e);
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

    Automaton out = Automaton::empty(a.registry, sigma);
    std::unordered_map<std::vector<StateId>, StateId, VecHash> index;
    std::vector<std::vector<StateId>> subsets;
    auto get = [&](std::vector<StateId> set) {
        auto [it, inserted] = index.try_emplace(set, out.num_states());
        if (inserted) {
            bool m = false;
            for (StateId q : set)
                if (a.marked[static_cast<size_t>(q)]) { m = true; break; }
            out.add_state(m);
            subsets.push_back(std::move(set));
        }
        return it->second;
    };
    out.initial = get(closure({a.initial}));
    for (size_t i = 0; i < subsets.size(); ++i) {
        for (EventId e : sigma) {
            std::vector<StateId> tgt;
            for (StateId q : subsets[i]) {
                auto t = a.successor(q, e);
                if (t) tgt.push_back(*t);
            }
            if (tgt.empty()) continue;
            std::sort(tgt.begin(), tgt.end());
            tgt.erase(std::unique(tgt.begin(), tgt.end()), tgt.end());
            StateId to = get(closure(std::move(tgt)));
            out.add_transition(static_cast<StateId>(i), e, to);
        }
    }
    return out;
}

Automaton universal(RegistryPtr reg, const EventSet& sigma) {
    if (sigma.empty()) throw std::invalid_argument("universal automaton needs a nonempty event set");
    Automaton a = Automaton::empty(std::move(reg), sigma);
    a.initial = a.add_state(true);
    for (EventId e : sigma) a.add_transition(0, e, 0);
    return a;
}

Membership accepts(const Automaton& a, const std::vector<EventId>& s) {
    for (EventId e : s)
        if (a.is_empty() || !a.alphabet.contains(e))
            throw std::invalid_argument("string uses an event outside the alphabet");
    if (a.is_empty()) return Membership::outside;
    StateId q = a.initial;
    for (EventId e : s) {
        auto t = a.successor(q, e);
        if (!t) return Membership::outside;
        q = *t;
    }
    return a.marked[static_cast<size_t>(q)] ? Membership::in_marked : Membership::in_closed;
}

Automaton renumber_bfs(const Automaton& a) {
    if (a.is_empty()) return a;
    std::vector<StateId> order;
    std::vector<StateId> remap(static_cast<size_t>(a.num_states()), -1);
    std::deque<StateId> dq{a.initial};
    remap[static_cast<size_t>(a.initial)] = 0;
    order.push_back(a.initial);
    while (!dq.empty()) {
        StateId q = dq.front();
        dq.pop_front();
        for (const auto& [e, t] : a.next[static_cast<size_t>(q)]) {
            (void)e;
            if (remap[static_cast<size_t>(t)] < 0) {
                remap[static_cast<size_t>(t)] = static_cast<StateId>(order.size());
                order.push_back(t);
                dq.push_back(t);
            }
        }
    }
    Automaton out = Automaton::empty(a.registry, a.alphabet);
    for (StateId q : order) out.add_state(a.marked[static_cast<size_t>(q)]);
    out.initial = 0;
    for (StateId q : order)
        for (const auto& [e, t] : a.next[static_cast<size_t>(q)])
            if (remap[static_cast<size_t>(t)] >= 0)
                out.add_transition(remap[static_cast<size_t>(q)], e, remap[static_cast<size_t>(t)]);
    if (!a.labels.empty()) {
        out.labels.resize(static_cast<size_t>(out.num_states()));
        for (StateId q : order)
            out.labels[static_cast<size_t>(remap[static_cast<size_t>(q)])] = a.labels[static_cast<size_t>(q)];
    }
    return out;
}

EventSet used_events(const Automaton& a) {
    EventSet used;
    for (StateId q = 0; q < a.num_states(); ++q)
        for (const auto& [e, t] : a.next[static_cast<size_t>(q)]) {
            (void)t;
            used.insert(e);
        }
    return used;
}

Automaton minimize(const Automaton& input) {
    Automaton a = trim(input);
    if (a.is_empty()) return a;
    const int n = a.num_states();
    const int dead = n;
    // classes: 0 = dead, 1 = unmarked, 2 = marked; refine on successor classes
    std::vector<int> cls(static_cast<size_t>(n) + 1);
    cls[static_cast<size_t>(dead)] = 0;
    for (StateId q = 0; q < n; ++q) cls[static_cast<size_t>(q)] = a.marked[static_cast<size_t>(q)] ? 2 : 1;
    while (true) {
        std::map<std::vector<int>, int> sig_to_class;
        std::vector<int> next_cls(static_cast<size_t>(n) + 1);
        for (int q = 0; q <= n; ++q) {
            std::vector<int> sig{cls[static_cast<size_t>(q)]};
            for (EventId e : a.alphabet) {
                int target_cls = 0;
                if (q != dead) {
                    auto t = a.successor(q, e);
                    target_cls = t ? cls[static_cast<size_t>(*t)] : 0;
                }
                sig.push_back(target_cls);
            }
            auto [it, inserted] = sig_to_class.try_emplace(std::move(sig), static_cast<int>(sig_to_class.size()));
            (void)inserted;
            next_cls[static_cast<size_t>(q)] = it->second;
        }
        if (next_cls == cls) break;
        cls = std::move(next_cls);
    }
    const int dead_cls = cls[static_cast<size_t>(dead)];
    std::map<int, StateId> class_state;
    Automaton out = Automaton::empty(a.registry, a.alphabet);
    for (StateId q = 0; q < n; ++q) {
        int c = cls[static_cast<size_t>(q)];
        if (class_state.find(c) == class_state.end())
            class_state[c] = out.add_state(a.marked[static_cast<size_t>(q)]);
    }
    out.initial = class_state.at(cls[static_cast<size_t>(a.initial)]);
    std::vector<bool> emitted(class_state.size(), false);
    for (StateId q = 0; q < n; ++q) {
        StateId from = class_state.at(cls[static_cast<size_t>(q)]);
        if (emitted[static_cast<size_t>(from)]) continue;
        emitted[static_cast<size_t>(from)] = true;
        for (const auto& [e, t] : a.next[static_cast<size_t>(q)]) {
            int tc = cls[static_cast<size_t>(t)];
            if (tc == dead_cls) continue;
            out.add_transition(from, e, class_state.at(tc));
        }
    }
    return renumber_bfs(out);
}

bool language_equivalent(const Automaton& a, const Automaton& b) {
    require_same_registry(a, b);
    Automaton ta = trim(a);
    Automaton tb = trim(b);
    if (ta.is_empty() || tb.is_empty()) return ta.is_empty() && tb.is_empty();
    EventSet ua = used_events(ta);
    EventSet ub = used_events(tb);
    if (ua != ub) return false;
    ta.alphabet = ua;
    tb.alphabet = ub;
    Automaton ca = minimize(ta);
    Automaton cb = minimize(tb);
    return ca.num_states() == cb.num_states() && ca.initial == cb.initial &&
           ca.marked == cb.marked && ca.next == cb.next;
}

bool is_sublanguage(const Automaton& a, const Automaton& b) {
    require_same_registry(a, b);
    Automaton ta = trim(a);
    if (ta.is_empty()) return true;
    if (b.is_empty()) return false;
    std::unordered_map<uint64_t, bool> seen;
    const uint64_t nb = static_cast<uint64_t>(b.num_states());
    std::deque<std::pair<StateId, StateId>> dq{{ta.initial, b.initial}};
    seen[static_cast<uint64_t>(ta.initial) * nb + static_cast<uint64_t>(b.initial)] = true;
    while (!dq.empty()) {
        auto [qa, qb] = dq.front();
        dq.pop_front();
        if (ta.marked[static_cast<size_t>(qa)] && !b.marked[static_cast<size_t>(qb)]) return false;
        for (const auto& [e, t] : ta.next[static_cast<size_t>(qa)]) {
            if (!b.alphabet.contains(e)) return false;
            auto tb = b.successor(qb, e);
            if (!tb) return false;
            uint64_t k = static_cast<uint64_t>(t) * nb + static_cast<uint64_t>(*tb);
            if (!seen[k]) {
                seen[k] = true;
                dq.emplace_back(t, *tb);
            }
        }
    }
    return true;
}

}  // namespace decs
