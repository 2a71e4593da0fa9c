// dcsn.hpp -- agents, inter-agent constraints, subnets, and the constraint
// relational network, with validation and file/DOT I/O
#ifndef DECS_DCSN_HPP
#define DECS_DCSN_HPP

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "decs/automaton.hpp"

namespace decs {

struct InterAgentConstraint {
    int index = 0;            // 1-based constraint index
    std::vector<int> agents;  // 1-based agent indices, sorted
    Automaton automaton;
    std::string source;  // file the automaton came from, informational
};

// Agents with pairwise-disjoint alphabets plus indexed constraints, each
// relevant to a group of agents.
struct Dcsn {
    RegistryPtr registry;
    std::vector<Automaton> agents;                  // agents[i-1] is agent i
    std::vector<InterAgentConstraint> constraints;  // constraints[k-1] has index k

    int num_agents() const { return static_cast<int>(agents.size()); }
    int num_constraints() const { return static_cast<int>(constraints.size()); }
    const Automaton& agent(int i) const { return agents.at(static_cast<size_t>(i - 1)); }
    const InterAgentConstraint& constraint(int k) const { return constraints.at(static_cast<size_t>(k - 1)); }
};

// Each violated invariant as a human-readable line; empty means valid.
std::vector<std::string> validate(const Dcsn& d);

// A set of basic-subnet (constraint) indices over one parent network.
struct Subnet {
    const Dcsn* parent = nullptr;
    std::set<int> members;  // 1-based constraint indices

    bool is_basic() const { return members.size() == 1; }
};

Subnet full_subnet(const Dcsn& d);
Subnet basic_subnet(const Dcsn& d, int k);

// Agent indices covered by the subnet's constraints.
std::set<int> subnet_agents(const Subnet& s);

Subnet subnet_union(const Subnet& a, const Subnet& b);
// Empty intersections have no Subnet representation (members must be nonempty).
std::optional<Subnet> subnet_intersection(const Subnet& a, const Subnet& b);

// Undirected graph over constraint indices; an edge exists exactly when the
// agent groups overlap and carries the overlap.
struct Crn {
    std::vector<int> vertices;  // sorted constraint indices
    struct Edge {
        int a = 0, b = 0;          // a < b
        std::vector<int> overlap;  // shared agent indices, sorted
    };
    std::vector<Edge> edges;  // sorted by (a, b)

    bool has_edge(int a, int b) const;
};

Crn build_crn(const Subnet& s);
bool is_constraint_connected(const Subnet& s);

// `agent <path>` lines (1-based order), then
// `constraint <k> agents <i,j,...> <path>` lines; paths relative to the file.
Dcsn load_dcsn(const std::string& path);

// Agents as boxes, constraints as ovals, arcs per membership.
void write_dcsn_dot(std::ostream& out, const Dcsn& d);
// Constraints as nodes, overlap-labeled edges.
void write_crn_dot(std::ostream& out, const Crn& g);

}  // namespace decs

#endif
