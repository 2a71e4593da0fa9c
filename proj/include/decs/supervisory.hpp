// supervisory.hpp -- coordination-oriented supervisory computations:
// controllability, supremal controllable sublanguage, observability,
// coordinability, communication-set search, abstraction property checks,
// coordination-module extraction and reduction
#ifndef DECS_SUPERVISORY_HPP
#define DECS_SUPERVISORY_HPP

#include <optional>
#include <vector>

#include "decs/automata_ops.hpp"
#include "decs/automaton.hpp"

namespace decs {

struct ControllabilityResult {
    bool controllable = true;
    std::vector<EventId> witness_string;  // minimal-length s on failure
    EventId witness_event = -1;           // uncontrollable continuation
};

// closure(L_m(k)) closed under uncontrollable continuations allowed by the
// plant. Alphabets must coincide.
ControllabilityResult is_controllable(const Automaton& k, const Automaton& plant);

// Nonblocking automaton marking the supremal controllable sublanguage of
// L_m(plant) intersect L_m(spec), with spec lifted by self-looping plant
// events absent from its alphabet. Returns the empty automaton when the
// supremal language is empty.
Automaton supcon(const Automaton& spec, const Automaton& plant);

struct ObservabilityResult {
    bool observable = true;
    std::vector<EventId> witness_s, witness_s_prime;
    std::optional<EventId> witness_event;  // nullopt signals a marking clash
};

// Control and marking decisions of L_m(k) are determined through the
// projection onto observable_set, decided on a four-component verifier over
// projection-equivalent string pairs.
ObservabilityResult is_observable(const Automaton& k, const Automaton& plant,
                                  const EventSet& observable_set);

// Controllable w.r.t. the agents' product, and observable through every
// agent's own alphabet extended by sigma_com.
bool is_coordinable(const Automaton& k, const std::vector<Automaton>& agents,
                    const EventSet& sigma_com);

// Minimum-cardinality sigma_com making k coordinable; ties broken by
// lexicographic order of sorted event names.
EventSet min_sys_com_set(const Automaton& k, const std::vector<Automaton>& agents);

struct ProjectionCheck {
    bool holds = true;
    EventSet suggested;                         // erased events whose addition makes progress
    std::vector<EventId> witness_a, witness_b;  // offending concrete strings
};

// Projection onto sigma is an L_m(sup)-observer: every abstract marked
// continuation is realizable from every concrete state with the same view.
ProjectionCheck is_observer(const Automaton& sup, const EventSet& sigma);

// Projection onto sigma is output-control-consistent for L(a): an erased
// segment ending in an observable uncontrollable event contains no
// controllable event.
ProjectionCheck is_occ(const Automaton& a, const EventSet& sigma);

struct PropertyRequirement {
    enum class Kind { observer, occ };
    const Automaton* automaton = nullptr;
    Kind kind = Kind::observer;
};

// Grows base until every requirement holds for the projection onto the grown
// set restricted to that automaton's alphabet; counterexample-driven, with a
// post-pass attempting single-event removals.
EventSet enlarge_event_set(const EventSet& base, const std::vector<PropertyRequirement>& requirements);

// Coordination module over sigma: minimal deterministic automaton generating
// P(L(sup)) and marking P(L_m(sup)).
Automaton cm_from(const Automaton& sup, const EventSet& sigma);

// Behavior-preserving state reduction of s relative to a: returns r with
// (a || r) language-equivalent to (a || s), by greedy compatibility merging
// over exercised transitions; falls back to s when nothing verifies.
Automaton cm_reduce(const Automaton& s, const Automaton& a);

// Definition of a coordination module for the given agent: the agent's
// alphabet is covered, and s never disables an uncontrollable event the
// system allows. Other agents' controllable events are gated by their own
// modules, so blocking them here carries no control decision.
bool is_valid_cm(const Automaton& s, const Automaton& agent, const Automaton& system);

}  // namespace decs

#endif
