#include "decs/automaton.hpp"

#include "decs/errors.hpp"

#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace decs {

void Automaton::add_transition(StateId from, EventId e, StateId to) {
    auto& row = next[static_cast<size_t>(from)];
    auto it = std::lower_bound(row.begin(), row.end(), std::make_pair(e, StateId{-1}));
    if (it != row.end() && it->first == e)
        throw std::invalid_argument("duplicate transition on '" + registry->name(e) +
                                    "' from state " + std::to_string(from));
    row.insert(it, {e, to});
}

void Automaton::check_well_formed() const {
    if (is_empty()) return;
    if (initial < 0 || initial >= num_states())
        throw std::invalid_argument("initial state out of range");
    for (StateId q = 0; q < num_states(); ++q) {
        for (const auto& [e, t] : next[static_cast<size_t>(q)]) {
            if (t < 0 || t >= num_states())
                throw std::invalid_argument("transition target out of range");
            if (!alphabet.contains(e))
                throw std::invalid_argument("transition on event outside the alphabet: " +
                                            registry->name(e));
        }
    }
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> toks;
    std::istringstream ss(line);
    std::string t;
    while (ss >> t) {
        if (t[0] == '#') break;
        toks.push_back(t);
    }
    return toks;
}

int parse_int(const std::string& s, const std::string& src, int lineno) {
    try {
        size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(src + ":" + std::to_string(lineno) + ": expected integer, got '" + s + "'");
    }
}

}  // namespace

Automaton parse_automaton(std::istream& in, RegistryPtr reg, const std::string& source) {
    Automaton a;
    a.registry = reg;
    int declared_states = -1;
    bool have_initial = false;
    std::string line;
    int lineno = 0;
    std::vector<std::tuple<int, std::string, int>> pending_trans;
    std::vector<int> pending_marked;

    auto fail = [&](const std::string& msg) -> ParseError {
        return ParseError(source + ":" + std::to_string(lineno) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++lineno;
        auto toks = tokenize(line);
        if (toks.empty()) continue;
        const std::string& kw = toks[0];
        if (kw == "states") {
            if (toks.size() != 2) throw fail("states takes one argument");
            declared_states = parse_int(toks[1], source, lineno);
            if (declared_states < 0) throw fail("negative state count");
        } else if (kw == "initial") {
            if (toks.size() != 2) throw fail("initial takes one argument");
            a.initial = parse_int(toks[1], source, lineno);
            have_initial = true;
        } else if (kw == "marked") {
            for (size_t i = 1; i < toks.size(); ++i)
                pending_marked.push_back(parse_int(toks[i], source, lineno));
        } else if (kw == "event") {
            if (toks.size() != 3 && toks.size() != 4) throw fail("event takes <name> <c|u> [owner]");
            bool ctrl;
            if (toks[2] == "c") ctrl = true;
            else if (toks[2] == "u") ctrl = false;
            else throw fail("event controllability must be 'c' or 'u'");
            int owner = toks.size() == 4 ? parse_int(toks[3], source, lineno) : 0;
            EventId e;
            try {
                e = reg->intern(toks[1], ctrl, owner);
            } catch (const std::invalid_argument& ex) {
                throw fail(ex.what());
            }
            a.alphabet.insert(e);
        } else if (kw == "trans") {
            if (toks.size() != 4) throw fail("trans takes <from> <name> <to>");
            pending_trans.emplace_back(parse_int(toks[1], source, lineno), toks[2],
                                       parse_int(toks[3], source, lineno));
        } else {
            throw fail("unknown keyword '" + kw + "'");
        }
    }
    lineno = 0;
    if (declared_states < 0) throw ParseError(source + ": missing 'states' line");
    for (int i = 0; i < declared_states; ++i) a.add_state(false);
    if (declared_states > 0 && !have_initial) throw ParseError(source + ": missing 'initial' line");
    if (have_initial && (a.initial < 0 || a.initial >= declared_states))
        throw ParseError(source + ": initial state out of range");
    for (int m : pending_marked) {
        if (m < 0 || m >= declared_states) throw ParseError(source + ": marked state out of range");
        a.marked[static_cast<size_t>(m)] = true;
    }
    for (const auto& [from, name, to] : pending_trans) {
        if (from < 0 || from >= declared_states || to < 0 || to >= declared_states)
            throw ParseError(source + ": transition state out of range");
        EventId e = reg->find(name);
        if (e < 0 || !a.alphabet.contains(e))
            throw ParseError(source + ": transition on undeclared event '" + name + "'");
        try {
            a.add_transition(from, e, to);
        } catch (const std::invalid_argument& ex) {
            throw ParseError(source + ": " + ex.what());
        }
    }
    a.check_well_formed();
    return a;
}

Automaton load_automaton(const std::string& path, RegistryPtr reg) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open automaton file: " + path);
    return parse_automaton(in, std::move(reg), path);
}

void write_automaton(std::ostream& out, const Automaton& a, const std::string& comment) {
    if (!comment.empty()) out << "# " << comment << "\n";
    out << "states " << a.num_states() << "\n";
    if (!a.is_empty()) out << "initial " << a.initial << "\n";
    std::string marked_line;
    for (StateId q = 0; q < a.num_states(); ++q)
        if (a.marked[static_cast<size_t>(q)]) marked_line += " " + std::to_string(q);
    if (!marked_line.empty()) out << "marked" << marked_line << "\n";
    // events sorted by name, transitions by (from, event name, to)
    std::map<std::string, EventId> by_name;
    for (EventId e : a.alphabet) by_name[a.registry->name(e)] = e;
    for (const auto& [name, e] : by_name) {
        const auto& info = a.registry->info(e);
        out << "event " << name << " " << (info.controllable ? "c" : "u");
        if (info.owner != 0) out << " " << info.owner;
        out << "\n";
    }
    for (StateId q = 0; q < a.num_states(); ++q) {
        std::map<std::string, StateId> row;
        for (const auto& [e, t] : a.next[static_cast<size_t>(q)]) row[a.registry->name(e)] = t;
        for (const auto& [name, t] : row) out << "trans " << q << " " << name << " " << t << "\n";
    }
}

void save_automaton(const std::string& path, const Automaton& a, const std::string& comment) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write automaton file: " + path);
    write_automaton(out, a, comment);
}

void write_dot(std::ostream& out, const Automaton& a, const std::string& name) {
    out << "digraph " << name << " {\n  rankdir=LR;\n";
    if (a.is_empty()) {
        out << "  empty [shape=plaintext, label=\"(empty)\"];\n}\n";
        return;
    }
    out << "  __init [shape=point, style=invis];\n";
    for (StateId q = 0; q < a.num_states(); ++q) {
        out << "  q" << q << " [shape=" << (a.marked[static_cast<size_t>(q)] ? "doublecircle" : "circle");
        if (!a.labels.empty() && static_cast<size_t>(q) < a.labels.size() && !a.labels[q].empty())
            out << ", label=\"" << a.labels[q] << "\"";
        out << "];\n";
    }
    out << "  __init -> q" << a.initial << ";\n";
    for (StateId q = 0; q < a.num_states(); ++q)
        for (const auto& [e, t] : a.next[static_cast<size_t>(q)])
            out << "  q" << q << " -> q" << t << " [label=\"" << a.registry->name(e) << "\"];\n";
    out << "}\n";
}

}  // namespace decs
