// planning.hpp -- cut-set enumeration over constraint relational networks,
// AND/OR graph generation, plan trees with the depth metric and its
// admissible heuristic, best-first plan selection, schedules
#ifndef DECS_PLANNING_HPP
#define DECS_PLANNING_HPP

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "decs/dcsn.hpp"

namespace decs {

// Bipartition of a connected graph whose crossing edges form a minimal
// disconnecting set; both sides induce connected subgraphs.
struct CutSet {
    std::vector<int> side_a, side_b;             // sorted; side_a lexicographically smaller
    std::vector<std::pair<int, int>> crossing;  // sorted edge list, first < second
};

// Complete cut-set enumeration: spanning tree, fundamental cut-sets,
// ring-sums over their nonempty subsets, then a connectivity validation
// filter. Input must be connected with at least two vertices.
std::vector<CutSet> all_cutsets(const Crn& g);

using CutsetFilter = std::function<bool(const CutSet&)>;

// Conflict-resolution plan: a leaf carries a subnet, a branch carries the
// decomposition of its subnet into the two children's subnets.
struct PlanTree {
    std::vector<int> members;  // sorted constraint indices
    std::shared_ptr<const PlanTree> left, right;

    bool is_leaf() const { return left == nullptr; }
};
using PlanPtr = std::shared_ptr<const PlanTree>;

PlanPtr make_leaf(std::vector<int> members);
PlanPtr make_branch(PlanPtr left, PlanPtr right);

// Hyper-graph of constraint-connected subnets: each hyper-edge decomposes a
// parent into two disjoint connected children covering it.
struct AndOrGraph {
    const Dcsn* dcsn = nullptr;
    std::vector<int> root_members;               // subnet the graph was generated for
    std::vector<std::vector<int>> nodes;         // sorted member lists
    struct HyperEdge {
        int parent = -1, left = -1, right = -1;  // node ids; left's members lex-smaller
    };
    std::vector<HyperEdge> edges;                // canonical order per parent
    std::vector<std::vector<int>> out_edges;     // node id -> edge ids
    int root = -1;                               // -1 when the graph is empty

    int node_of(const std::vector<int>& members) const;  // -1 if absent
    int num_basic(int node) const { return static_cast<int>(nodes[static_cast<size_t>(node)].size()); }
};

// Recursive decomposition with memoized expansion. A basic subnet yields the
// empty graph. The filter discards cut-sets before node/edge creation.
AndOrGraph generate_andor_graph(const Subnet& s, const CutsetFilter& filter = nullptr);
// The whole network must be constraint-connected.
AndOrGraph generate_andor_graph(const Dcsn& d, const CutsetFilter& filter = nullptr);

int depth(const PlanTree& t);

// log2(basic subnet count) at leaves, 1 + max of children at branches;
// coincides with depth on complete trees and never overestimates it.
double h_p(const PlanTree& t);

using Heuristic = std::function<double(const PlanTree&)>;

// Best-first search over partial trees; returns a complete tree minimizing
// the metric the heuristic is admissible for. Equal-value trees leave the
// queue in insertion order; the expanded terminal is the non-leaf with the
// most basic subnets.
PlanPtr heuristic_plan_selection(const AndOrGraph& g, const Heuristic& h = h_p);

// All complete trees of the graph; exponential, intended for small networks.
std::vector<PlanPtr> enumerate_complete_trees(const AndOrGraph& g);

// One composition operation: deconflict the solutions of left and right
// into the parent subnet.
struct ScheduleOp {
    std::vector<int> parent, left, right;
};

// Level k holds the branches of height k; levels execute in order, ops
// within a level are independent.
std::vector<std::vector<ScheduleOp>> schedule_from_plan(const PlanTree& t);

// Nested text form: `(1,2, [1|2], (1), (2))`, leaves as `(1)`.
std::string plan_to_string(const PlanTree& t);
PlanPtr parse_plan(const std::string& text);
PlanPtr load_plan(const std::string& path);

// Plan structure against a network: root covers everything, children
// partition parents, every node constraint-connected. Empty result = valid.
std::vector<std::string> validate_plan(const PlanTree& t, const Dcsn& d);

void write_andor_dot(std::ostream& out, const AndOrGraph& g);
void write_plan_dot(std::ostream& out, const PlanTree& t);

}  // namespace decs

#endif
