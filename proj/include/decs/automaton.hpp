// automaton.hpp -- deterministic finite automaton with marked states and a
// controllability-partitioned alphabet; text format and DOT export
#ifndef DECS_AUTOMATON_HPP
#define DECS_AUTOMATON_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "decs/events.hpp"

namespace decs {

// States are dense ints 0..n-1. The transition function is partial: at most
// one successor per (state, event). The canonical empty automaton has zero
// states and empty languages.
struct Automaton {
    RegistryPtr registry;
    EventSet alphabet;
    StateId initial = -1;
    std::vector<bool> marked;
    std::vector<std::vector<std::pair<EventId, StateId>>> next;  // per state, sorted by event
    std::vector<std::string> labels;  // optional debug labels, may be empty

    int num_states() const { return static_cast<int>(marked.size()); }
    bool is_empty() const { return marked.empty(); }

    int num_transitions() const {
        size_t n = 0;
        for (const auto& row : next) n += row.size();
        return static_cast<int>(n);
    }

    StateId add_state(bool is_marked) {
        marked.push_back(is_marked);
        next.emplace_back();
        return num_states() - 1;
    }

    std::optional<StateId> successor(StateId q, EventId e) const {
        const auto& row = next[static_cast<size_t>(q)];
        auto it = std::lower_bound(row.begin(), row.end(), std::make_pair(e, StateId{-1}));
        if (it != row.end() && it->first == e) return it->second;
        return std::nullopt;
    }

    bool has_transition(StateId q, EventId e) const { return successor(q, e).has_value(); }

    // Throws on a duplicate (from, event) pair.
    void add_transition(StateId from, EventId e, StateId to);

    // Structural invariants: initial and targets in range, alphabet covers
    // transitions. Throws std::invalid_argument on violation.
    void check_well_formed() const;

    static Automaton empty(RegistryPtr reg, EventSet alphabet = {}) {
        Automaton a;
        a.registry = std::move(reg);
        a.alphabet = std::move(alphabet);
        return a;
    }
};

// Line-oriented text format, '#' starts a comment:
//   states <n>
//   initial <id>
//   marked <id> <id> ...
//   event <name> <c|u> [owner]
//   trans <from> <name> <to>
Automaton parse_automaton(std::istream& in, RegistryPtr reg, const std::string& source = "<stream>");
Automaton load_automaton(const std::string& path, RegistryPtr reg);
void write_automaton(std::ostream& out, const Automaton& a, const std::string& comment = "");
void save_automaton(const std::string& path, const Automaton& a, const std::string& comment = "");

// Marked states double-circled, initial state gets an inbound arrow.
void write_dot(std::ostream& out, const Automaton& a, const std::string& name = "automaton");

}  // namespace decs

#endif
