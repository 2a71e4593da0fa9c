// automata_ops.hpp -- automata algebra: trim, synchronous product, natural
// projection, minimization, language equivalence, membership
#ifndef DECS_AUTOMATA_OPS_HPP
#define DECS_AUTOMATA_OPS_HPP

#include <vector>

#include "decs/automaton.hpp"

namespace decs {

// Sub-automaton of states both reachable and coreachable; languages unchanged.
// Returns the empty automaton when the initial state is cut.
Automaton trim(const Automaton& a);

// closure(L_m(a)) == L(a), i.e. every reachable state can reach a marked one.
// The empty automaton is vacuously nonblocking.
bool is_nonblocking(const Automaton& a);

// Reachable synchronous product: interleaving with synchronization on shared
// events. Both operands must share one registry.
Automaton sync_product(const Automaton& a, const Automaton& b);
Automaton sync_product(const std::vector<Automaton>& parts);

// Deterministic automaton generating P(L(a)) and marking P(L_m(a)), built by
// erased-event closure plus subset construction. sigma must be a subset of
// the alphabet.
Automaton natural_projection(const Automaton& a, const EventSet& sigma);

// One-state automaton, initial and marked, every event of sigma self-looped.
// sigma must be nonempty.
Automaton universal(RegistryPtr reg, const EventSet& sigma);

enum class Membership { outside, in_closed, in_marked };
Membership accepts(const Automaton& a, const std::vector<EventId>& s);

// Canonical minimal form: trim, merge states equivalent under the two-class
// (marked / defined) refinement, renumber by BFS over event-id order.
Automaton minimize(const Automaton& a);

// L(a) == L(b) and L_m(a) == L_m(b), decided on canonical minimal forms.
bool language_equivalent(const Automaton& a, const Automaton& b);

// L(a) subset of L(b) and L_m(a) subset of L_m(b).
bool is_sublanguage(const Automaton& a, const Automaton& b);

// Events that occur on some transition (post-trim these are exactly the
// events occurring in L(a)).
EventSet used_events(const Automaton& a);

// Dense renumbering by BFS from the initial state, edges in event-id order.
Automaton renumber_bfs(const Automaton& a);

}  // namespace decs

#endif
