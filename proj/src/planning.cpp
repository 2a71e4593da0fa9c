#include "decs/planning.hpp"

#include "decs/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <deque>
#include <fstream>
#include <map>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace decs {

namespace {

using Edge = std::pair<int, int>;
using EdgeSet = std::set<Edge>;

Edge make_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

std::vector<std::set<int>> components(const std::vector<int>& vertices, const EdgeSet& edges) {
    std::map<int, std::vector<int>> adj;
    for (const auto& [a, b] : edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::set<int> left(vertices.begin(), vertices.end());
    std::vector<std::set<int>> out;
    while (!left.empty()) {
        int start = *left.begin();
        std::set<int> comp{start};
        std::deque<int> dq{start};
        left.erase(start);
        while (!dq.empty()) {
            int v = dq.front();
            dq.pop_front();
            for (int w : adj[v])
                if (left.erase(w)) {
                    comp.insert(w);
                    dq.push_back(w);
                }
        }
        out.push_back(std::move(comp));
    }
    return out;
}

}  // namespace

std::vector<CutSet> all_cutsets(const Crn& g) {
    if (g.vertices.size() < 2) throw std::invalid_argument("cut-sets need at least two vertices");
    EdgeSet all_edges;
    for (const auto& e : g.edges) all_edges.insert(make_edge(e.a, e.b));
    if (components(g.vertices, all_edges).size() != 1)
        throw std::invalid_argument("cut-sets are defined on connected graphs only");

    // BFS spanning tree
    std::map<int, std::vector<int>> adj;
    for (const auto& [a, b] : all_edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto& [v, ns] : adj) {
        (void)v;
        std::sort(ns.begin(), ns.end());
    }
    EdgeSet tree;
    std::set<int> seen{g.vertices[0]};
    std::deque<int> dq{g.vertices[0]};
    while (!dq.empty()) {
        int v = dq.front();
        dq.pop_front();
        for (int w : adj[v])
            if (seen.insert(w).second) {
                tree.insert(make_edge(v, w));
                dq.push_back(w);
            }
    }

    // fundamental cut-set per tree branch: crossing edges of the bipartition
    // obtained by removing the branch from the tree
    std::vector<EdgeSet> fundamentals;
    for (const auto& branch : tree) {
        EdgeSet rest = tree;
        rest.erase(branch);
        auto parts = components(g.vertices, rest);
        // removing one branch splits the tree into exactly two parts
        const std::set<int>& part = parts[0].count(branch.first) ? parts[0] : parts[1];
        EdgeSet crossing;
        for (const auto& e : all_edges)
            if (part.count(e.first) != part.count(e.second)) crossing.insert(e);
        fundamentals.push_back(std::move(crossing));
    }

    // ring-sums over nonempty subsets of fundamental cut-sets, then validate
    std::set<std::vector<int>> seen_sides;
    std::vector<CutSet> out;
    const size_t nf = fundamentals.size();
    for (size_t mask = 1; mask < (size_t{1} << nf); ++mask) {
        EdgeSet cand;
        for (size_t i = 0; i < nf; ++i) {
            if (!(mask & (size_t{1} << i))) continue;
            EdgeSet sym;
            std::set_symmetric_difference(cand.begin(), cand.end(), fundamentals[i].begin(),
                                          fundamentals[i].end(), std::inserter(sym, sym.begin()));
            cand = std::move(sym);
        }
        if (cand.empty()) continue;
        EdgeSet rest;
        std::set_difference(all_edges.begin(), all_edges.end(), cand.begin(), cand.end(),
                            std::inserter(rest, rest.begin()));
        auto parts = components(g.vertices, rest);
        if (parts.size() != 2) continue;  // a union of edge-disjoint cut-sets
        EdgeSet crossing;
        for (const auto& e : all_edges)
            if (parts[0].count(e.first) != parts[0].count(e.second)) crossing.insert(e);
        if (crossing != cand) continue;  // some candidate edge lies inside a part
        std::vector<int> sa(parts[0].begin(), parts[0].end());
        std::vector<int> sb(parts[1].begin(), parts[1].end());
        if (sb < sa) std::swap(sa, sb);
        if (!seen_sides.insert(sa).second) continue;
        CutSet cs;
        cs.side_a = std::move(sa);
        cs.side_b = std::move(sb);
        cs.crossing.assign(cand.begin(), cand.end());
        out.push_back(std::move(cs));
    }
    std::sort(out.begin(), out.end(),
              [](const CutSet& x, const CutSet& y) { return x.side_a < y.side_a; });
    return out;
}

PlanPtr make_leaf(std::vector<int> members) {
    auto t = std::make_shared<PlanTree>();
    t->members = std::move(members);
    std::sort(t->members.begin(), t->members.end());
    return t;
}

PlanPtr make_branch(PlanPtr left, PlanPtr right) {
    if (left->members > right->members) std::swap(left, right);
    auto t = std::make_shared<PlanTree>();
    std::set_union(left->members.begin(), left->members.end(), right->members.begin(),
                   right->members.end(), std::back_inserter(t->members));
    t->left = std::move(left);
    t->right = std::move(right);
    return t;
}

int AndOrGraph::node_of(const std::vector<int>& members) const {
    for (size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i] == members) return static_cast<int>(i);
    return -1;
}

namespace {

struct GraphBuilder {
    const Dcsn* dcsn;
    CutsetFilter filter;
    AndOrGraph g;
    std::map<std::vector<int>, int> index;
    std::set<int> expanded;

    int node(const std::vector<int>& members) {
        auto [it, inserted] = index.try_emplace(members, static_cast<int>(g.nodes.size()));
        if (inserted) {
            g.nodes.push_back(members);
            g.out_edges.emplace_back();
        }
        return it->second;
    }

    void expand(const std::vector<int>& members) {
        int me = node(members);
        if (members.size() == 1) return;
        if (!expanded.insert(me).second) return;
        Subnet sub{dcsn, std::set<int>(members.begin(), members.end())};
        Crn crn = build_crn(sub);
        for (const CutSet& cs : all_cutsets(crn)) {
            if (filter && !filter(cs)) continue;
            int left = node(cs.side_a);
            int right = node(cs.side_b);
            g.edges.push_back({me, left, right});
            g.out_edges[static_cast<size_t>(me)].push_back(static_cast<int>(g.edges.size()) - 1);
        }
        // children recurse after all edges of this node exist
        for (int eid : std::vector<int>(g.out_edges[static_cast<size_t>(me)])) {
            expand(g.nodes[static_cast<size_t>(g.edges[static_cast<size_t>(eid)].left)]);
            expand(g.nodes[static_cast<size_t>(g.edges[static_cast<size_t>(eid)].right)]);
        }
    }
};

}  // namespace

AndOrGraph generate_andor_graph(const Subnet& s, const CutsetFilter& filter) {
    if (s.members.empty()) throw std::invalid_argument("subnet has no members");
    if (!is_constraint_connected(s))
        throw std::invalid_argument("subnet is not constraint-connected");
    GraphBuilder b;
    b.dcsn = s.parent;
    b.filter = filter;
    b.g.dcsn = s.parent;
    b.g.root_members.assign(s.members.begin(), s.members.end());
    if (s.members.size() == 1) return std::move(b.g);  // basic subnet: empty graph
    b.expand(b.g.root_members);
    if (b.g.out_edges[0].empty()) {
        // every root cut-set rejected by the filter
        AndOrGraph empty;
        empty.dcsn = s.parent;
        empty.root_members = b.g.root_members;
        return empty;
    }
    b.g.root = 0;
    return std::move(b.g);
}

AndOrGraph generate_andor_graph(const Dcsn& d, const CutsetFilter& filter) {
    return generate_andor_graph(full_subnet(d), filter);
}

int depth(const PlanTree& t) {
    if (t.is_leaf()) return 0;
    return 1 + std::max(depth(*t.left), depth(*t.right));
}

double h_p(const PlanTree& t) {
    if (t.is_leaf()) return std::log2(static_cast<double>(t.members.size()));
    return 1.0 + std::max(h_p(*t.left), h_p(*t.right));
}

namespace {

void collect_open_leaves(const PlanPtr& t, std::vector<const PlanTree*>& out) {
    if (t->is_leaf()) {
        if (t->members.size() > 1) out.push_back(t.get());
        return;
    }
    collect_open_leaves(t->left, out);
    collect_open_leaves(t->right, out);
}

// replace the open leaf carrying `target` members by a branch per the edge
PlanPtr substitute(const PlanPtr& t, const std::vector<int>& target, const PlanPtr& replacement) {
    if (t->is_leaf()) return t->members == target ? replacement : t;
    PlanPtr nl = substitute(t->left, target, replacement);
    PlanPtr nr = substitute(t->right, target, replacement);
    if (nl == t->left && nr == t->right) return t;
    return make_branch(nl, nr);
}

std::string tree_key(const PlanTree& t) {
    std::ostringstream os;
    std::vector<std::string> parts;
    std::function<void(const PlanTree&)> walk = [&](const PlanTree& n) {
        if (n.is_leaf()) return;
        std::ostringstream e;
        for (int m : n.members) e << m << ',';
        e << '<';
        for (int m : n.left->members) e << m << ',';
        e << '|';
        for (int m : n.right->members) e << m << ',';
        e << '>';
        parts.push_back(e.str());
        walk(*n.left);
        walk(*n.right);
    };
    walk(t);
    std::sort(parts.begin(), parts.end());
    for (const auto& p : parts) os << p << ';';
    return os.str();
}

}  // namespace

PlanPtr heuristic_plan_selection(const AndOrGraph& g, const Heuristic& h) {
    if (g.root < 0) {
        if (g.root_members.size() == 1) return make_leaf(g.root_members);
        throw std::runtime_error("plan selection on an empty AND/OR graph");
    }
    Heuristic heur = h ? h : Heuristic([](const PlanTree& t) { return h_p(t); });

    struct Entry {
        double value;
        uint64_t seq;
        PlanPtr tree;
    };
    auto cmp = [](const Entry& a, const Entry& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.seq > b.seq;  // FIFO among equals
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> q(cmp);
    std::set<std::string> seen;
    uint64_t seq = 0;

    PlanPtr root = make_leaf(g.root_members);
    q.push({heur(*root), seq++, root});
    seen.insert(tree_key(*root));

    while (!q.empty()) {
        Entry cur = q.top();
        q.pop();
        std::vector<const PlanTree*> open;
        collect_open_leaves(cur.tree, open);
        if (open.empty()) return cur.tree;
        // most basic subnets first, then lexicographically smallest member list
        const PlanTree* pick = open[0];
        for (const PlanTree* cand : open) {
            if (cand->members.size() > pick->members.size() ||
                (cand->members.size() == pick->members.size() && cand->members < pick->members))
                pick = cand;
        }
        int node = g.node_of(pick->members);
        if (node < 0) throw std::runtime_error("plan node missing from the AND/OR graph");
        for (int eid : g.out_edges[static_cast<size_t>(node)]) {
            const auto& e = g.edges[static_cast<size_t>(eid)];
            PlanPtr branch = make_branch(make_leaf(g.nodes[static_cast<size_t>(e.left)]),
                                         make_leaf(g.nodes[static_cast<size_t>(e.right)]));
            PlanPtr next = substitute(cur.tree, pick->members, branch);
            if (seen.insert(tree_key(*next)).second) q.push({heur(*next), seq++, next});
        }
    }
    throw std::runtime_error("AND/OR graph has no complete plan");
}

namespace {

std::vector<PlanPtr> trees_of(const AndOrGraph& g, int node,
                              std::map<int, std::vector<PlanPtr>>& memo) {
    auto it = memo.find(node);
    if (it != memo.end()) return it->second;
    std::vector<PlanPtr> out;
    const auto& members = g.nodes[static_cast<size_t>(node)];
    if (members.size() == 1) {
        out.push_back(make_leaf(members));
    } else {
        for (int eid : g.out_edges[static_cast<size_t>(node)]) {
            const auto& e = g.edges[static_cast<size_t>(eid)];
            for (const auto& lt : trees_of(g, e.left, memo))
                for (const auto& rt : trees_of(g, e.right, memo))
                    out.push_back(make_branch(lt, rt));
        }
    }
    memo[node] = out;
    return out;
}

}  // namespace

std::vector<PlanPtr> enumerate_complete_trees(const AndOrGraph& g) {
    if (g.root < 0)
        return g.root_members.size() == 1 ? std::vector<PlanPtr>{make_leaf(g.root_members)}
                                          : std::vector<PlanPtr>{};
    std::map<int, std::vector<PlanPtr>> memo;
    return trees_of(g, g.root, memo);
}

std::vector<std::vector<ScheduleOp>> schedule_from_plan(const PlanTree& t) {
    int d = depth(t);
    std::vector<std::vector<ScheduleOp>> levels(static_cast<size_t>(d));
    std::function<int(const PlanTree&)> walk = [&](const PlanTree& n) -> int {
        if (n.is_leaf()) return 0;
        int hl = walk(*n.left);
        int hr = walk(*n.right);
        int height = 1 + std::max(hl, hr);
        levels[static_cast<size_t>(height - 1)].push_back(
            ScheduleOp{n.members, n.left->members, n.right->members});
        return height;
    };
    walk(t);
    for (auto& level : levels)
        std::sort(level.begin(), level.end(),
                  [](const ScheduleOp& a, const ScheduleOp& b) { return a.parent < b.parent; });
    return levels;
}

std::string plan_to_string(const PlanTree& t) {
    std::ostringstream os;
    auto list = [&](const std::vector<int>& v) {
        for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    };
    std::function<void(const PlanTree&)> walk = [&](const PlanTree& n) {
        os << '(';
        list(n.members);
        if (!n.is_leaf()) {
            os << ", [";
            list(n.left->members);
            os << '|';
            list(n.right->members);
            os << "], ";
            walk(*n.left);
            os << ", ";
            walk(*n.right);
        }
        os << ')';
    };
    walk(t);
    return os.str();
}

namespace {

struct PlanParser {
    const std::string& text;
    size_t pos = 0;

    explicit PlanParser(const std::string& t) : text(t) {}

    void skip() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    char peek() {
        skip();
        if (pos >= text.size()) throw ParseError("plan text ended unexpectedly");
        return text[pos];
    }
    void expect(char c) {
        if (peek() != c)
            throw ParseError(std::string("plan text: expected '") + c + "' at offset " +
                             std::to_string(pos));
        ++pos;
    }
    int integer() {
        skip();
        size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (start == pos) throw ParseError("plan text: expected integer at offset " + std::to_string(pos));
        return std::stoi(text.substr(start, pos - start));
    }
    std::vector<int> int_list() {
        std::vector<int> out{integer()};
        while (true) {
            skip();
            if (pos < text.size() && text[pos] == ',') {
                size_t save = pos;
                ++pos;
                skip();
                if (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])))) {
                    out.push_back(integer());
                    continue;
                }
                pos = save;  // comma belongs to the surrounding structure
            }
            break;
        }
        return out;
    }
    PlanPtr tree() {
        expect('(');
        std::vector<int> members = int_list();
        skip();
        if (peek() == ')') {
            ++pos;
            return make_leaf(std::move(members));
        }
        expect(',');
        expect('[');
        std::vector<int> left_members = int_list();
        expect('|');
        std::vector<int> right_members = int_list();
        expect(']');
        expect(',');
        PlanPtr left = tree();
        expect(',');
        PlanPtr right = tree();
        expect(')');
        std::sort(left_members.begin(), left_members.end());
        std::sort(right_members.begin(), right_members.end());
        if ((left->members != left_members || right->members != right_members) &&
            (left->members != right_members || right->members != left_members))
            throw ParseError("plan text: child annotation disagrees with subtree members");
        PlanPtr out = make_branch(left, right);
        std::sort(members.begin(), members.end());
        if (out->members != members)
            throw ParseError("plan text: node members disagree with children");
        return out;
    }
};

}  // namespace

PlanPtr parse_plan(const std::string& text) {
    PlanParser p(text);
    PlanPtr t = p.tree();
    p.skip();
    if (p.pos != text.size()) throw ParseError("plan text: trailing characters");
    return t;
}

PlanPtr load_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open plan file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_plan(ss.str());
}

std::vector<std::string> validate_plan(const PlanTree& t, const Dcsn& d) {
    std::vector<std::string> out;
    std::function<void(const PlanTree&)> walk = [&](const PlanTree& n) {
        for (int k : n.members)
            if (k < 1 || k > d.num_constraints()) {
                out.push_back("plan references unknown constraint " + std::to_string(k));
                return;
            }
        Subnet sub{&d, std::set<int>(n.members.begin(), n.members.end())};
        if (!is_constraint_connected(sub)) {
            std::ostringstream os;
            os << "plan node {";
            for (size_t i = 0; i < n.members.size(); ++i) os << (i ? "," : "") << n.members[i];
            os << "} is not constraint-connected";
            out.push_back(os.str());
        }
        if (!n.is_leaf()) {
            std::vector<int> uni;
            std::set_union(n.left->members.begin(), n.left->members.end(), n.right->members.begin(),
                           n.right->members.end(), std::back_inserter(uni));
            std::vector<int> inter;
            std::set_intersection(n.left->members.begin(), n.left->members.end(),
                                  n.right->members.begin(), n.right->members.end(),
                                  std::back_inserter(inter));
            if (uni != n.members || !inter.empty())
                out.push_back("plan node children do not partition the parent");
            walk(*n.left);
            walk(*n.right);
        }
    };
    walk(t);
    return out;
}

void write_andor_dot(std::ostream& out, const AndOrGraph& g) {
    out << "digraph andor {\n";
    auto label = [&](const std::vector<int>& m) {
        std::ostringstream os;
        os << '{';
        for (size_t i = 0; i < m.size(); ++i) os << (i ? "," : "") << m[i];
        os << '}';
        return os.str();
    };
    for (size_t i = 0; i < g.nodes.size(); ++i)
        out << "  n" << i << " [shape=box, label=\"" << label(g.nodes[i]) << "\"];\n";
    for (size_t e = 0; e < g.edges.size(); ++e) {
        out << "  j" << e << " [shape=point];\n";
        out << "  n" << g.edges[e].parent << " -> j" << e << " [arrowhead=none];\n";
        out << "  j" << e << " -> n" << g.edges[e].left << ";\n";
        out << "  j" << e << " -> n" << g.edges[e].right << ";\n";
    }
    out << "}\n";
}

void write_plan_dot(std::ostream& out, const PlanTree& t) {
    out << "digraph plan {\n";
    int counter = 0;
    std::function<int(const PlanTree&)> walk = [&](const PlanTree& n) -> int {
        int id = counter++;
        std::ostringstream os;
        os << '{';
        for (size_t i = 0; i < n.members.size(); ++i) os << (i ? "," : "") << n.members[i];
        os << '}';
        out << "  n" << id << " [shape=" << (n.is_leaf() ? "box" : "ellipse") << ", label=\""
            << os.str() << "\"];\n";
        if (!n.is_leaf()) {
            int l = walk(*n.left);
            int r = walk(*n.right);
            out << "  n" << id << " -> n" << l << ";\n  n" << id << " -> n" << r << ";\n";
        }
        return id;
    };
    walk(t);
    out << "}\n";
}

}  // namespace decs
