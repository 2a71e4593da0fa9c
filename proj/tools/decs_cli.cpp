// decs -- coordination-module synthesis for networks of discrete-event agents
//
// Subcommands: validate, synth-basic, plan, solve. Machine-readable artifacts
// go to disk, human-readable text to stdout, diagnostics to stderr (DECS_LOG).
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "decs/errors.hpp"
#include "decs/synthesis.hpp"

namespace {

enum class LogLevel { quiet = 0, info = 1, debug = 2 };

LogLevel log_level() {
    const char* env = std::getenv("DECS_LOG");
    if (!env) return LogLevel::quiet;
    std::string v(env);
    if (v == "debug") return LogLevel::debug;
    if (v == "info") return LogLevel::info;
    return LogLevel::quiet;
}

void log_info(const std::string& msg) {
    if (log_level() >= LogLevel::info) std::cerr << "[decs] " << msg << "\n";
}

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitIo = 2;
constexpr int kExitInvariant = 3;

std::string counts(const decs::Automaton& a) {
    return std::to_string(a.num_states()) + " states, " + std::to_string(a.num_transitions()) +
           " transitions";
}

std::string receive_set_text(const decs::Dcsn& d, const decs::EventSet& set) {
    std::ostringstream os;
    os << '{';
    auto names = decs::sorted_names(*d.registry, set);
    for (size_t i = 0; i < names.size(); ++i) os << (i ? "," : "") << names[i];
    os << '}';
    return os.str();
}

int cmd_validate(const std::string& file) {
    decs::Dcsn d = decs::load_dcsn(file);
    auto issues = decs::validate(d);
    if (issues.empty()) {
        std::cout << "ok: " << d.num_agents() << " agents, " << d.num_constraints()
                  << " constraints\n";
        return kExitOk;
    }
    for (const auto& msg : issues) std::cout << "violation: " << msg << "\n";
    return kExitDomain;
}

int cmd_synth_basic(const std::string& file, int k, const std::string& out_dir) {
    decs::Dcsn d = decs::load_dcsn(file);
    auto issues = decs::validate(d);
    if (!issues.empty()) {
        std::cout << "invalid network: " << issues.front() << "\n";
        return kExitDomain;
    }
    if (k < 1 || k > d.num_constraints()) {
        std::cout << "no constraint with index " << k << "\n";
        return kExitDomain;
    }
    decs::BasicSynthesisTrace trace;
    decs::SubnetSolution sol = decs::cm_basic_subnet(decs::basic_subnet(d, k), &trace);
    std::cout << "SUP: " << counts(sol.sup) << "\n";
    for (int i : d.constraint(k).agents) {
        const decs::EventSet& receive = sol.comm_sets.at(k).at(i);
        std::cout << "agent " << i << " receives " << receive_set_text(d, receive) << "\n";
        std::cout << "agent " << i << " CM: " << counts(trace.unreduced_cms.at(i)) << "\n";
        const decs::Automaton& reduced = sol.local_cms.at(i).front().automaton;
        std::cout << "agent " << i << " CM reduced: " << counts(reduced);
        if (receive.empty() &&
            decs::language_equivalent(reduced, decs::universal(d.registry, reduced.alphabet)))
            std::cout << " (vacuous: equivalent to the universal module)";
        std::cout << "\n";
    }
    if (!out_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(out_dir);
        decs::save_automaton(out_dir + "/sup_c" + std::to_string(k) + ".aut", sol.sup);
        for (int i : d.constraint(k).agents) {
            std::string base = out_dir + "/agent" + std::to_string(i) + "_local_c" + std::to_string(k);
            decs::save_automaton(base + "_unreduced.aut", trace.unreduced_cms.at(i));
            decs::save_automaton(base + ".aut", sol.local_cms.at(i).front().automaton);
        }
        std::ofstream comm(out_dir + "/comm_c" + std::to_string(k) + ".txt");
        for (int i : d.constraint(k).agents) {
            comm << "receive agent " << i << ":";
            for (const auto& nm : decs::sorted_names(*d.registry, sol.comm_sets.at(k).at(i)))
                comm << " " << nm;
            comm << "\n";
        }
        log_info("wrote solution of subnet {" + std::to_string(k) + "} to " + out_dir);
    }
    return kExitOk;
}

int cmd_plan(const std::string& file, const std::string& metric, const std::string& dot_file,
             bool all_trees, const std::string& out_file) {
    if (metric != "depth") {
        std::cout << "unknown metric '" << metric << "' (only 'depth' is available)\n";
        return kExitDomain;
    }
    decs::Dcsn d = decs::load_dcsn(file);
    auto issues = decs::validate(d);
    if (!issues.empty()) {
        std::cout << "invalid network: " << issues.front() << "\n";
        return kExitDomain;
    }
    auto components = decs::constraint_components(d);
    std::vector<decs::PlanPtr> plans;
    for (size_t ci = 0; ci < components.size(); ++ci) {
        decs::Subnet sub{&d, std::set<int>(components[ci].begin(), components[ci].end())};
        decs::AndOrGraph g = decs::generate_andor_graph(sub);
        if (components.size() > 1) std::cout << "component " << ci + 1 << ":\n";
        if (g.root < 0 && g.root_members.size() > 1) {
            std::cout << "AND/OR graph is empty: every root cut-set was rejected\n";
            return kExitDomain;
        }
        std::cout << "AND/OR graph: " << g.nodes.size() << " nodes, " << g.edges.size()
                  << " hyper-edges";
        if (g.root >= 0)
            std::cout << ", root out-degree " << g.out_edges[static_cast<size_t>(g.root)].size();
        std::cout << "\n";
        decs::PlanPtr plan = decs::heuristic_plan_selection(g);
        std::cout << "selected plan (depth " << decs::depth(*plan) << "): "
                  << decs::plan_to_string(*plan) << "\n";
        if (all_trees) {
            for (const auto& t : decs::enumerate_complete_trees(g))
                std::cout << "tree depth " << decs::depth(*t) << ": " << decs::plan_to_string(*t)
                          << "\n";
        }
        if (!dot_file.empty() && ci == 0) {
            std::ofstream out(dot_file);
            if (!out) throw decs::ParseError("cannot write DOT file: " + dot_file);
            decs::write_andor_dot(out, g);
        }
        plans.push_back(plan);
    }
    if (!out_file.empty()) {
        std::ofstream out(out_file);
        if (!out) throw decs::ParseError("cannot write plan file: " + out_file);
        for (const auto& plan : plans) out << decs::plan_to_string(*plan) << "\n";
        log_info("wrote plan to " + out_file);
    }
    return kExitOk;
}

int cmd_solve(const std::string& file, const std::string& plan_file, bool verify, bool parallel,
              const std::string& out_dir) {
    decs::Dcsn d = decs::load_dcsn(file);
    auto issues = decs::validate(d);
    if (!issues.empty()) {
        std::cout << "invalid network: " << issues.front() << "\n";
        return kExitDomain;
    }
    std::vector<decs::PlanPtr> plans;
    if (plan_file.empty()) {
        plans = decs::default_plans(d);
        log_info("generated " + std::to_string(plans.size()) + " plan(s)");
    } else {
        std::ifstream in(plan_file);
        if (!in) throw decs::ParseError("cannot open plan file: " + plan_file);
        std::string line;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
            plans.push_back(decs::parse_plan(line));
        }
        if (plans.empty()) throw decs::ParseError("plan file holds no plan: " + plan_file);
    }
    decs::SolveOptions options;
    options.verify = verify;
    options.parallel = parallel;
    decs::SynthesisResult result = decs::solve_dcsn(d, plans, options);

    for (size_t level = 0; level < result.schedule_log.size(); ++level) {
        if (result.schedule_log[level].empty()) continue;
        std::cout << "level " << level << ":";
        for (const auto& op : result.schedule_log[level]) std::cout << " " << op << ";";
        std::cout << "\n";
    }
    std::cout << "composed behavior: " << counts(result.solution.sup) << "\n";
    int cm_count = 0;
    for (const auto& [agent, cms] : result.solution.local_cms) cm_count += static_cast<int>(cms.size());
    for (const auto& [agent, cms] : result.solution.decon_cms) cm_count += static_cast<int>(cms.size());
    std::cout << "coordination modules: " << cm_count << "\n";
    if (!out_dir.empty()) {
        decs::write_solution_bundle(out_dir, d, result);
        log_info("wrote solution bundle to " + out_dir);
    }
    if (verify) {
        bool ok = result.verified.value();
        std::cout << "verification: " << (ok ? "PASS" : "FAIL") << "\n";
        if (!ok) return kExitInvariant;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coordination-module synthesis for networks of discrete-event agents"};
    app.require_subcommand(1);

    std::string file, out_dir, plan_file, dot_file, out_file;
    std::string metric = "depth";
    int constraint_index = 0;
    bool verify = false, parallel = false, all_trees = false;

    auto* validate = app.add_subcommand("validate", "check a network description");
    validate->add_option("file", file, "network file")->required();

    auto* synth = app.add_subcommand("synth-basic", "synthesize one basic subnet");
    synth->add_option("file", file, "network file")->required();
    synth->add_option("--constraint", constraint_index, "constraint index")->required();
    synth->add_option("--out", out_dir, "output directory");

    auto* plan = app.add_subcommand("plan", "generate and select a composition plan");
    plan->add_option("file", file, "network file")->required();
    plan->add_option("--metric", metric, "optimization metric (depth)");
    plan->add_option("--dot", dot_file, "write the AND/OR graph as DOT");
    plan->add_flag("--all-trees", all_trees, "enumerate every complete plan");
    plan->add_option("--out", out_file, "write the selected plan to a file");

    auto* solve = app.add_subcommand("solve", "synthesize the whole network");
    solve->add_option("file", file, "network file")->required();
    solve->add_option("--plan", plan_file, "plan file (one plan per line)");
    solve->add_flag("--verify", verify, "verify against the monolithic synthesis");
    solve->add_flag("--parallel", parallel, "run independent compositions concurrently");
    solve->add_option("--out", out_dir, "solution bundle directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(file);
        if (synth->parsed()) return cmd_synth_basic(file, constraint_index, out_dir);
        if (plan->parsed()) return cmd_plan(file, metric, dot_file, all_trees, out_file);
        if (solve->parsed()) return cmd_solve(file, plan_file, verify, parallel, out_dir);
    } catch (const decs::ParseError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitIo;
    } catch (const decs::DomainError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitDomain;
    } catch (const std::invalid_argument& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& ex) {
        std::cerr << "internal error: " << ex.what() << "\n";
        return kExitInvariant;
    }
    return kExitOk;
}
