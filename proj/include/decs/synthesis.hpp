// synthesis.hpp -- per-subnet coordination-module synthesis, conflict
// detection and resolution, subnet composition, and plan-driven solving
#ifndef DECS_SYNTHESIS_HPP
#define DECS_SYNTHESIS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "decs/dcsn.hpp"
#include "decs/planning.hpp"
#include "decs/supervisory.hpp"

namespace decs {

struct TaggedCm {
    std::string tag;  // "c<k>" for a local CM, "s<i>-<j>-..." for a deconflicting one
    Automaton automaton;
};

// Solved subnet: its supervisor-like automaton, per-agent CMs, and the
// per-constraint communication (receive) sets.
struct SubnetSolution {
    Subnet subnet;
    Automaton sup;
    std::map<int, std::vector<TaggedCm>> local_cms;  // agent -> CMs
    std::map<int, std::vector<TaggedCm>> decon_cms;
    std::map<int, std::map<int, EventSet>> comm_sets;  // constraint -> agent -> receive set
};

struct BasicSynthesisTrace {
    EventSet sigma_com;
    std::map<int, Automaton> unreduced_cms;  // agent -> CM before reduction
};

// Supervisor synthesis for one constraint plus per-agent CM extraction and
// reduction. Throws when the supremal language is empty.
SubnetSolution cm_basic_subnet(const Subnet& s, BasicSynthesisTrace* trace = nullptr);

struct NonconflictResult {
    bool nonconflicting = true;
    EventSet sigma_cr;  // abstraction event set used by the test
};

// Abstracted nonconflict test: project both sups onto an observer-closed
// event set seeded from the shared agents' alphabets and check that the
// abstract product is nonblocking. Disjoint-agent pairs short-circuit.
NonconflictResult nonconflict_test(const SubnetSolution& x, const SubnetSolution& y);

struct ConflictResolutionResult {
    Automaton cr;
    EventSet sigma_cr;
};

// Supremal nonblocking restriction of the abstract product, over an event
// set additionally closed under control consistency for every member agent.
// Throws when the resolution is empty.
ConflictResolutionResult conflict_resolution(const SubnetSolution& x, const SubnetSolution& y);

// Merge two solved subnets: carries CMs over, and when the pair conflicts
// adds a deconflicting CM for every agent sharing events with the
// resolution. The merged sup composes the resolution with both sups.
SubnetSolution deconflict_subnets(const SubnetSolution& x, const SubnetSolution& y);

struct SolveOptions {
    bool verify = false;    // compare against the monolithic synthesis
    bool parallel = false;  // run independent schedule slots concurrently
};

struct SynthesisResult {
    SubnetSolution solution;
    std::vector<std::vector<std::string>> schedule_log;  // executed levels
    std::optional<bool> verified;
};

// Solve the whole network by running basic synthesis on every leaf and then
// composing bottom-up along the plan levels. One plan per constraint-connected
// component; plans are validated against the network first.
SynthesisResult solve_dcsn(const Dcsn& d, const std::vector<PlanPtr>& plans,
                           const SolveOptions& options = {});

// Plans for every constraint-connected component, selected with h_p.
std::vector<PlanPtr> default_plans(const Dcsn& d);

// Connected components of the full network's CRN, each as a sorted member list.
std::vector<std::vector<int>> constraint_components(const Dcsn& d);

// Composition of every agent with all of its CMs.
Automaton coordinated_system(const Dcsn& d, const SubnetSolution& sol);

// Supcon of all constraints against all agents (the monolithic route).
Automaton monolithic_supcon(const Dcsn& d);

// One .aut per CM named agent<i>_<kind>_<tag>.aut plus a manifest with the
// communication sets and the verification verdict.
void write_solution_bundle(const std::string& dir, const Dcsn& d, const SynthesisResult& result);

}  // namespace decs

#endif
