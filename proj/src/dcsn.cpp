#include "decs/dcsn.hpp"

#include "decs/errors.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "decs/automata_ops.hpp"

namespace decs {

std::vector<std::string> validate(const Dcsn& d) {
    std::vector<std::string> out;
    if (d.num_agents() < 1) out.push_back("network has no agents");
    if (d.num_constraints() < 1) out.push_back("network has no constraints");

    // pairwise-disjoint agent alphabets
    for (int i = 1; i <= d.num_agents(); ++i)
        for (int j = i + 1; j <= d.num_agents(); ++j) {
            EventSet shared = intersect(d.agent(i).alphabet, d.agent(j).alphabet);
            if (!shared.empty())
                out.push_back("agents " + std::to_string(i) + " and " + std::to_string(j) +
                              " share event '" + d.registry->name(*shared.begin()) + "'");
        }

    std::vector<bool> covered(static_cast<size_t>(d.num_agents()) + 1, false);
    for (const auto& c : d.constraints) {
        if (c.agents.empty())
            out.push_back("constraint " + std::to_string(c.index) + " lists no agents");
        for (int i : c.agents) {
            if (i < 1 || i > d.num_agents()) {
                out.push_back("constraint " + std::to_string(c.index) + " references unknown agent " +
                              std::to_string(i));
                continue;
            }
            covered[static_cast<size_t>(i)] = true;
            if (intersect(c.automaton.alphabet, d.agent(i).alphabet).empty())
                out.push_back("constraint " + std::to_string(c.index) +
                              " shares no event with listed agent " + std::to_string(i));
        }
    }
    for (int i = 1; i <= d.num_agents(); ++i)
        if (!covered[static_cast<size_t>(i)])
            out.push_back("agent " + std::to_string(i) + " appears in no constraint group");

    // declared event ownership must match the agent alphabets
    for (int i = 1; i <= d.num_agents(); ++i)
        for (EventId e : d.agent(i).alphabet) {
            int owner = d.registry->owner(e);
            if (owner != 0 && owner != i)
                out.push_back("event '" + d.registry->name(e) + "' is owned by agent " +
                              std::to_string(owner) + " but appears in agent " + std::to_string(i));
        }
    for (int i = 1; i <= d.num_agents(); ++i)
        if (!is_nonblocking(d.agent(i)))
            out.push_back("agent " + std::to_string(i) + " is blocking");
    return out;
}

Subnet full_subnet(const Dcsn& d) {
    Subnet s{&d, {}};
    for (int k = 1; k <= d.num_constraints(); ++k) s.members.insert(k);
    return s;
}

Subnet basic_subnet(const Dcsn& d, int k) {
    if (k < 1 || k > d.num_constraints())
        throw std::invalid_argument("no constraint with index " + std::to_string(k));
    return Subnet{&d, {k}};
}

std::set<int> subnet_agents(const Subnet& s) {
    std::set<int> out;
    for (int k : s.members)
        for (int i : s.parent->constraint(k).agents) out.insert(i);
    return out;
}

Subnet subnet_union(const Subnet& a, const Subnet& b) {
    if (a.parent != b.parent) throw std::invalid_argument("subnets of different networks");
    Subnet out{a.parent, a.members};
    out.members.insert(b.members.begin(), b.members.end());
    return out;
}

std::optional<Subnet> subnet_intersection(const Subnet& a, const Subnet& b) {
    if (a.parent != b.parent) throw std::invalid_argument("subnets of different networks");
    Subnet out{a.parent, {}};
    std::set_intersection(a.members.begin(), a.members.end(), b.members.begin(), b.members.end(),
                          std::inserter(out.members, out.members.begin()));
    if (out.members.empty()) return std::nullopt;
    return out;
}

bool Crn::has_edge(int a, int b) const {
    if (a > b) std::swap(a, b);
    for (const auto& e : edges)
        if (e.a == a && e.b == b) return true;
    return false;
}

Crn build_crn(const Subnet& s) {
    Crn g;
    g.vertices.assign(s.members.begin(), s.members.end());
    for (size_t i = 0; i < g.vertices.size(); ++i)
        for (size_t j = i + 1; j < g.vertices.size(); ++j) {
            // agent lists are sorted on load; sort local copies anyway
            std::vector<int> ca = s.parent->constraint(g.vertices[i]).agents;
            std::vector<int> cb = s.parent->constraint(g.vertices[j]).agents;
            std::sort(ca.begin(), ca.end());
            std::sort(cb.begin(), cb.end());
            std::vector<int> overlap;
            std::set_intersection(ca.begin(), ca.end(), cb.begin(), cb.end(),
                                  std::back_inserter(overlap));
            if (!overlap.empty())
                g.edges.push_back({g.vertices[i], g.vertices[j], std::move(overlap)});
        }
    return g;
}

bool is_constraint_connected(const Subnet& s) {
    if (s.members.empty()) return false;
    Crn g = build_crn(s);
    std::map<int, std::vector<int>> adj;
    for (const auto& e : g.edges) {
        adj[e.a].push_back(e.b);
        adj[e.b].push_back(e.a);
    }
    std::set<int> seen{g.vertices[0]};
    std::deque<int> dq{g.vertices[0]};
    while (!dq.empty()) {
        int v = dq.front();
        dq.pop_front();
        for (int w : adj[v])
            if (seen.insert(w).second) dq.push_back(w);
    }
    return seen.size() == g.vertices.size();
}

namespace {

std::string dirname_of(const std::string& path) {
    auto pos = path.find_last_of('/');
    return pos == std::string::npos ? std::string() : path.substr(0, pos + 1);
}

}  // namespace

Dcsn load_dcsn(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open network file: " + path);
    Dcsn d;
    d.registry = std::make_shared<EventRegistry>();
    std::string base = dirname_of(path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string kw;
        if (!(ss >> kw) || kw[0] == '#') continue;
        auto fail = [&](const std::string& msg) {
            return ParseError(path + ":" + std::to_string(lineno) + ": " + msg);
        };
        if (kw == "agent") {
            std::string file;
            if (!(ss >> file)) throw fail("agent takes a file path");
            d.agents.push_back(load_automaton(base + file, d.registry));
        } else if (kw == "constraint") {
            int k;
            std::string agents_kw, list, file;
            if (!(ss >> k >> agents_kw >> list >> file) || agents_kw != "agents")
                throw fail("constraint takes <k> agents <i,j,...> <path>");
            if (k != static_cast<int>(d.constraints.size()) + 1)
                throw fail("constraint indices must be consecutive from 1");
            InterAgentConstraint c;
            c.index = k;
            c.source = file;
            std::istringstream ls(list);
            std::string tok;
            while (std::getline(ls, tok, ','))
                if (!tok.empty()) c.agents.push_back(std::stoi(tok));
            std::sort(c.agents.begin(), c.agents.end());
            c.agents.erase(std::unique(c.agents.begin(), c.agents.end()), c.agents.end());
            c.automaton = load_automaton(base + file, d.registry);
            d.constraints.push_back(std::move(c));
        } else {
            throw fail("unknown keyword '" + kw + "'");
        }
    }
    return d;
}

void write_dcsn_dot(std::ostream& out, const Dcsn& d) {
    out << "graph dcsn {\n";
    for (int i = 1; i <= d.num_agents(); ++i)
        out << "  a" << i << " [shape=box, label=\"A" << i << "\"];\n";
    for (const auto& c : d.constraints)
        out << "  c" << c.index << " [shape=oval, label=\"C" << c.index << "\"];\n";
    for (const auto& c : d.constraints)
        for (int i : c.agents) out << "  c" << c.index << " -- a" << i << ";\n";
    out << "}\n";
}

void write_crn_dot(std::ostream& out, const Crn& g) {
    out << "graph crn {\n";
    for (int v : g.vertices) out << "  c" << v << " [shape=oval, label=\"C" << v << "\"];\n";
    for (const auto& e : g.edges) {
        out << "  c" << e.a << " -- c" << e.b << " [label=\"{";
        for (size_t i = 0; i < e.overlap.size(); ++i)
            out << (i ? "," : "") << e.overlap[i];
        out << "}\"];\n";
    }
    out << "}\n";
}

}  // namespace decs
