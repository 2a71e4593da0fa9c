#include "decs/synthesis.hpp"

#include "decs/errors.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace decs {

namespace {

std::string members_text(const std::set<int>& members) {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (int k : members) {
        os << (first ? "" : ",") << k;
        first = false;
    }
    os << '}';
    return os.str();
}

std::string decon_tag(const std::set<int>& members) {
    std::ostringstream os;
    os << 's';
    bool first = true;
    for (int k : members) {
        os << (first ? "" : "-") << k;
        first = false;
    }
    return os.str();
}

std::vector<Automaton> member_agents(const Subnet& s) {
    std::vector<Automaton> out;
    for (int i : subnet_agents(s)) out.push_back(s.parent->agent(i));
    return out;
}

EventSet shared_agent_alphabet(const SubnetSolution& x, const SubnetSolution& y) {
    std::set<int> ax = subnet_agents(x.subnet);
    std::set<int> ay = subnet_agents(y.subnet);
    EventSet out;
    for (int i : ax)
        if (ay.count(i)) out = unite(out, x.subnet.parent->agent(i).alphabet);
    return out;
}

}  // namespace

SubnetSolution cm_basic_subnet(const Subnet& s, BasicSynthesisTrace* trace) {
    if (!s.is_basic()) throw std::invalid_argument("cm_basic_subnet needs a basic subnet");
    const Dcsn& d = *s.parent;
    int k = *s.members.begin();
    const InterAgentConstraint& c = d.constraint(k);

    std::vector<Automaton> agents;
    for (int i : c.agents) agents.push_back(d.agent(i));
    Automaton plant = sync_product(agents);
    Automaton sup = supcon(c.automaton, plant);
    if (sup.is_empty())
        throw DomainError("subnet {" + std::to_string(k) +
                          "} is unsynthesizable: the supremal language is empty");

    EventSet sigma_com = min_sys_com_set(sup, agents);
    if (trace) trace->sigma_com = sigma_com;

    SubnetSolution sol;
    sol.subnet = s;
    sol.sup = sup;
    for (size_t idx = 0; idx < c.agents.size(); ++idx) {
        int i = c.agents[idx];
        const Automaton& agent = agents[idx];
        EventSet receive = subtract(sigma_com, agent.alphabet);
        EventSet view = unite(agent.alphabet, receive);
        Automaton cm = cm_from(sup, view);
        if (trace) trace->unreduced_cms.emplace(i, cm);
        Automaton reduced = cm_reduce(cm, plant);
        sol.local_cms[i].push_back({"c" + std::to_string(k), std::move(reduced)});
        sol.comm_sets[k][i] = receive;
    }
    return sol;
}

NonconflictResult nonconflict_test(const SubnetSolution& x, const SubnetSolution& y) {
    NonconflictResult res;
    EventSet seed = shared_agent_alphabet(x, y);
    if (seed.empty()) return res;  // no common agents, trivially nonconflicting

    std::vector<PropertyRequirement> reqs{
        {&x.sup, PropertyRequirement::Kind::observer},
        {&y.sup, PropertyRequirement::Kind::observer},
    };
    res.sigma_cr = enlarge_event_set(seed, reqs);
    Automaton px = natural_projection(x.sup, intersect(res.sigma_cr, x.sup.alphabet));
    Automaton py = natural_projection(y.sup, intersect(res.sigma_cr, y.sup.alphabet));
    res.nonconflicting = is_nonblocking(sync_product(px, py));
    return res;
}

ConflictResolutionResult conflict_resolution(const SubnetSolution& x, const SubnetSolution& y) {
    EventSet seed = shared_agent_alphabet(x, y);
    if (seed.empty())
        throw std::invalid_argument("conflict resolution needs subnets with common agents");
    Subnet merged = subnet_union(x.subnet, y.subnet);

    std::vector<Automaton> agents = member_agents(merged);
    std::vector<PropertyRequirement> reqs{
        {&x.sup, PropertyRequirement::Kind::observer},
        {&y.sup, PropertyRequirement::Kind::observer},
    };
    for (const Automaton& agent : agents) reqs.push_back({&agent, PropertyRequirement::Kind::occ});

    ConflictResolutionResult res;
    res.sigma_cr = enlarge_event_set(seed, reqs);
    Automaton px = natural_projection(x.sup, intersect(res.sigma_cr, x.sup.alphabet));
    Automaton py = natural_projection(y.sup, intersect(res.sigma_cr, y.sup.alphabet));
    Automaton abstract = sync_product(px, py);
    res.cr = supcon(universal(x.sup.registry, res.sigma_cr), abstract);
    if (res.cr.is_empty())
        throw DomainError("conflict resolution for " + members_text(x.subnet.members) +
                          " and " + members_text(y.subnet.members) +
                          " is empty: the joined subnet is unsynthesizable");
    return res;
}

SubnetSolution deconflict_subnets(const SubnetSolution& x, const SubnetSolution& y) {
    SubnetSolution merged;
    merged.subnet = subnet_union(x.subnet, y.subnet);
    for (const SubnetSolution* src : {&x, &y}) {
        for (const auto& [agent, cms] : src->local_cms)
            merged.local_cms[agent].insert(merged.local_cms[agent].end(), cms.begin(), cms.end());
        for (const auto& [agent, cms] : src->decon_cms)
            merged.decon_cms[agent].insert(merged.decon_cms[agent].end(), cms.begin(), cms.end());
        for (const auto& [k, per_agent] : src->comm_sets) merged.comm_sets[k] = per_agent;
    }

    NonconflictResult nc = nonconflict_test(x, y);
    if (nc.nonconflicting) {
        merged.sup = renumber_bfs(trim(sync_product(x.sup, y.sup)));
        return merged;
    }

    ConflictResolutionResult cr = conflict_resolution(x, y);
    merged.sup = renumber_bfs(trim(sync_product(cr.cr, sync_product(x.sup, y.sup))));
    std::string tag = decon_tag(merged.subnet.members);
    for (int i : subnet_agents(merged.subnet)) {
        const Automaton& agent = merged.subnet.parent->agent(i);
        if (intersect(cr.cr.alphabet, agent.alphabet).empty()) continue;
        merged.decon_cms[i].push_back({tag, cm_reduce(cr.cr, agent)});
    }
    return merged;
}

std::vector<std::vector<int>> constraint_components(const Dcsn& d) {
    Crn g = build_crn(full_subnet(d));
    std::map<int, std::vector<int>> adj;
    for (const auto& e : g.edges) {
        adj[e.a].push_back(e.b);
        adj[e.b].push_back(e.a);
    }
    std::set<int> left(g.vertices.begin(), g.vertices.end());
    std::vector<std::vector<int>> out;
    while (!left.empty()) {
        int start = *left.begin();
        std::vector<int> comp{start};
        left.erase(start);
        std::vector<int> stack{start};
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : adj[v])
                if (left.erase(w)) {
                    comp.push_back(w);
                    stack.push_back(w);
                }
        }
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<PlanPtr> default_plans(const Dcsn& d) {
    std::vector<PlanPtr> plans;
    for (const auto& comp : constraint_components(d)) {
        Subnet sub{&d, std::set<int>(comp.begin(), comp.end())};
        AndOrGraph g = generate_andor_graph(sub);
        plans.push_back(heuristic_plan_selection(g));
    }
    return plans;
}

namespace {

std::string op_text(const ScheduleOp& op) {
    auto fmt = [](const std::vector<int>& v) {
        std::ostringstream os;
        os << '{';
        for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
        os << '}';
        return os.str();
    };
    return fmt(op.left) + "+" + fmt(op.right) + "->" + fmt(op.parent);
}

}  // namespace

SynthesisResult solve_dcsn(const Dcsn& d, const std::vector<PlanPtr>& plans,
                           const SolveOptions& options) {
    // the plans must cover every constraint exactly once and be well-formed
    std::set<int> covered;
    for (const auto& plan : plans) {
        auto issues = validate_plan(*plan, d);
        if (!issues.empty()) throw std::invalid_argument("invalid plan: " + issues.front());
        for (int k : plan->members)
            if (!covered.insert(k).second)
                throw std::invalid_argument("plans overlap on constraint " + std::to_string(k));
    }
    if (static_cast<int>(covered.size()) != d.num_constraints())
        throw std::invalid_argument("plans do not cover every constraint");

    SynthesisResult result;
    std::map<std::vector<int>, SubnetSolution> slots;

    auto run_level = [&](const std::vector<std::function<SubnetSolution()>>& jobs,
                         const std::vector<std::vector<int>>& keys) {
        if (options.parallel && jobs.size() > 1) {
            std::vector<std::future<SubnetSolution>> futures;
            futures.reserve(jobs.size());
            for (const auto& job : jobs) futures.push_back(std::async(std::launch::async, job));
            // join every job before touching the shared slot map
            std::vector<SubnetSolution> results;
            results.reserve(futures.size());
            for (auto& f : futures) results.push_back(f.get());
            for (size_t i = 0; i < results.size(); ++i) slots[keys[i]] = std::move(results[i]);
        } else {
            for (size_t i = 0; i < jobs.size(); ++i) slots[keys[i]] = jobs[i]();
        }
    };

    // leaves: basic subnet synthesis
    {
        std::vector<std::function<SubnetSolution()>> jobs;
        std::vector<std::vector<int>> keys;
        std::vector<std::string> log;
        for (const auto& plan : plans) {
            std::function<void(const PlanTree&)> collect = [&](const PlanTree& t) {
                if (t.is_leaf()) {
                    if (t.members.size() != 1)
                        throw std::invalid_argument("plan is not complete: a leaf covers " +
                                                    std::to_string(t.members.size()) + " constraints");
                    int k = t.members[0];
                    std::vector<int> key{k};
                    if (!std::count(keys.begin(), keys.end(), key)) {
                        jobs.push_back([&d, k] { return cm_basic_subnet(basic_subnet(d, k)); });
                        keys.push_back(key);
                        log.push_back("synthesize {" + std::to_string(k) + "}");
                    }
                    return;
                }
                collect(*t.left);
                collect(*t.right);
            };
            collect(*plan);
        }
        std::sort(log.begin(), log.end());
        result.schedule_log.push_back(std::move(log));
        run_level(jobs, keys);
    }

    // composition levels, merged across components
    size_t max_depth = 0;
    std::vector<std::vector<std::vector<ScheduleOp>>> schedules;
    for (const auto& plan : plans) {
        schedules.push_back(schedule_from_plan(*plan));
        max_depth = std::max(max_depth, schedules.back().size());
    }
    for (size_t level = 0; level < max_depth; ++level) {
        std::vector<std::function<SubnetSolution()>> jobs;
        std::vector<std::vector<int>> keys;
        std::vector<std::string> log;
        for (const auto& sched : schedules) {
            if (level >= sched.size()) continue;
            for (const ScheduleOp& op : sched[level]) {
                jobs.push_back([&slots, op] {
                    return deconflict_subnets(slots.at(op.left), slots.at(op.right));
                });
                keys.push_back(op.parent);
                log.push_back(op_text(op));
            }
        }
        std::sort(log.begin(), log.end());
        result.schedule_log.push_back(std::move(log));
        run_level(jobs, keys);
    }

    // join per-component solutions (disjoint agents, plain composition)
    std::vector<SubnetSolution> parts;
    for (const auto& plan : plans) parts.push_back(slots.at(plan->members));
    SubnetSolution total = parts[0];
    for (size_t i = 1; i < parts.size(); ++i) {
        SubnetSolution& other = parts[i];
        total.subnet = subnet_union(total.subnet, other.subnet);
        total.sup = renumber_bfs(trim(sync_product(total.sup, other.sup)));
        for (auto& [agent, cms] : other.local_cms)
            total.local_cms[agent].insert(total.local_cms[agent].end(), cms.begin(), cms.end());
        for (auto& [agent, cms] : other.decon_cms)
            total.decon_cms[agent].insert(total.decon_cms[agent].end(), cms.begin(), cms.end());
        for (auto& [k, per_agent] : other.comm_sets) total.comm_sets[k] = per_agent;
    }
    result.solution = std::move(total);

    if (options.verify) {
        Automaton acm = coordinated_system(d, result.solution);
        Automaton mono = monolithic_supcon(d);
        result.verified = language_equivalent(acm, mono);
    }
    return result;
}

Automaton coordinated_system(const Dcsn& d, const SubnetSolution& sol) {
    // no trimming here: blocking states of the coordinated system must stay
    // visible to the verification
    std::vector<Automaton> parts;
    for (int i = 1; i <= d.num_agents(); ++i) {
        Automaton composed = d.agent(i);
        auto attach = [&](const std::map<int, std::vector<TaggedCm>>& cms) {
            auto it = cms.find(i);
            if (it == cms.end()) return;
            for (const TaggedCm& cm : it->second) composed = sync_product(composed, cm.automaton);
        };
        attach(sol.local_cms);
        attach(sol.decon_cms);
        parts.push_back(renumber_bfs(composed));
    }
    return renumber_bfs(sync_product(parts));
}

Automaton monolithic_supcon(const Dcsn& d) {
    std::vector<Automaton> agents;
    for (int i = 1; i <= d.num_agents(); ++i) agents.push_back(d.agent(i));
    Automaton plant = sync_product(agents);
    Automaton spec = d.constraint(1).automaton;
    for (int k = 2; k <= d.num_constraints(); ++k)
        spec = sync_product(spec, d.constraint(k).automaton);
    return supcon(spec, plant);
}

void write_solution_bundle(const std::string& dir, const Dcsn& d, const SynthesisResult& result) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::ostringstream manifest;
    manifest << "agents " << d.num_agents() << "\n";
    manifest << "constraints " << d.num_constraints() << "\n";
    for (size_t level = 0; level < result.schedule_log.size(); ++level) {
        if (result.schedule_log[level].empty()) continue;
        manifest << "schedule level " << level << ":";
        for (const auto& op : result.schedule_log[level]) manifest << " " << op << ";";
        manifest << "\n";
    }
    const SubnetSolution& sol = result.solution;
    for (const auto& [k, per_agent] : sol.comm_sets) {
        manifest << "constraint " << k << "\n";
        for (const auto& [agent, receive] : per_agent) {
            manifest << "  receive agent " << agent << ":";
            for (const auto& nm : sorted_names(*d.registry, receive)) manifest << " " << nm;
            manifest << "\n";
        }
    }
    auto dump = [&](const std::map<int, std::vector<TaggedCm>>& cms, const std::string& kind) {
        for (const auto& [agent, list] : cms)
            for (const TaggedCm& cm : list) {
                std::string name = "agent" + std::to_string(agent) + "_" + kind + "_" + cm.tag + ".aut";
                save_automaton(dir + "/" + name, cm.automaton, name);
                manifest << "cm " << name << " " << cm.automaton.num_states() << " states "
                         << cm.automaton.num_transitions() << " transitions\n";
            }
    };
    dump(sol.local_cms, "local");
    dump(sol.decon_cms, "decon");
    if (result.verified.has_value())
        manifest << "verification " << (*result.verified ? "PASS" : "FAIL") << "\n";
    else
        manifest << "verification SKIPPED\n";
    std::ofstream out(dir + "/manifest.txt");
    if (!out) throw ParseError("cannot write manifest in " + dir);
    out << manifest.str();
}

}  // namespace decs
