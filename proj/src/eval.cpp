#include "parroute/eval.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "parroute/error.hpp"
#include "text_io.hpp"

namespace parroute {

namespace {

const std::vector<NodeId> kNoPath;

const std::vector<NodeId> &path_of(const Solution &solution, std::size_t c)
{
    return c < solution.size() ? solution[c] : kNoPath;
}

} // namespace

ValidationResult validate(const RoutingGraph &graph, const Netlist &netlist, const Solution &solution)
{
    ValidationResult r;
    std::vector<std::vector<NodeId>> net_nodes(netlist.nets.size());
    for (std::size_t c = 0; c < netlist.connections.size(); ++c) {
        const Connection &conn = netlist.connections[c];
        const auto &path = path_of(solution, c);
        const std::string who = "connection " + std::to_string(c) + " (net " + std::to_string(conn.net_id) + ")";
        if (path.empty()) {
            if (conn.source != conn.sink) {
                ++r.disconnected_connections;
                r.violations.push_back(who + " is unrouted");
            }
            continue;
        }
        std::string problem;
        if (std::any_of(path.begin(), path.end(), [&](NodeId n) { return !graph.contains(n); }))
            problem = "references a node outside the graph";
        else if (path.front() != conn.source)
            problem = "does not start at its source " + std::to_string(conn.source);
        else if (path.back() != conn.sink)
            problem = "does not end at its sink " + std::to_string(conn.sink);
        else
            for (std::size_t i = 0; i + 1 < path.size() && problem.empty(); ++i)
                if (!graph.has_edge(path[i], path[i + 1]))
                    problem = "has no edge " + std::to_string(path[i]) + " -> " + std::to_string(path[i + 1]);
        if (!problem.empty()) {
            ++r.disconnected_connections;
            r.violations.push_back(who + ' ' + problem);
            continue;
        }
        auto &nodes = net_nodes[static_cast<std::size_t>(conn.net_id)];
        nodes.insert(nodes.end(), path.begin(), path.end());
    }

    std::vector<int> nets_on(graph.num_nodes(), 0);
    for (auto &nodes : net_nodes) {
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
        for (NodeId n : nodes)
            ++nets_on[static_cast<std::size_t>(n)];
    }
    for (std::size_t n = 0; n < nets_on.size(); ++n) {
        if (nets_on[n] > RrgNode::capacity) {
            ++r.overflow_nodes;
            r.violations.push_back("node " + std::to_string(n) + " used by " + std::to_string(nets_on[n]) + " nets");
        }
    }
    return r;
}

Wirelength wirelength(const RoutingGraph &graph, const Netlist &netlist, const Solution &solution)
{
    Wirelength wl;
    std::vector<std::unordered_set<NodeId>> net_nodes(netlist.nets.size());
    for (std::size_t c = 0; c < netlist.connections.size(); ++c) {
        long long len = 0;
        for (NodeId n : path_of(solution, c)) {
            len += graph.node(n).length;
            net_nodes[static_cast<std::size_t>(netlist.connections[c].net_id)].insert(n);
        }
        wl.critical_path = std::max(wl.critical_path, len);
    }
    for (const auto &nodes : net_nodes)
        for (NodeId n : nodes)
            wl.total += graph.node(n).length;
    return wl;
}

RoutingReport make_report(const RoutingGraph &graph, const Netlist &netlist, const RoutingResult &result)
{
    RoutingReport rep;
    const ValidationResult v = validate(graph, netlist, result.paths);
    const Wirelength wl = wirelength(graph, netlist, result.paths);
    rep.legal = v.legal();
    rep.overflow_nodes = v.overflow_nodes;
    rep.disconnected_connections = v.disconnected_connections;
    rep.total_wirelength = wl.total;
    rep.critical_path_wirelength = wl.critical_path;
    rep.runtime_s = result.runtime_s;
    rep.score = score(result.runtime_s, static_cast<double>(wl.critical_path));
    rep.iterations = result.iterations;
    rep.per_iteration = result.stats;
    return rep;
}

std::string report_to_json(const RoutingReport &r)
{
    nlohmann::ordered_json j;
    j["legal"] = r.legal;
    j["overflow_nodes"] = r.overflow_nodes;
    j["disconnected_connections"] = r.disconnected_connections;
    j["total_wirelength"] = r.total_wirelength;
    j["critical_path_wirelength"] = r.critical_path_wirelength;
    j["runtime_s"] = r.runtime_s;
    j["score"] = r.score;
    j["iterations"] = r.iterations;
    j["per_iteration"] = nlohmann::ordered_json::array();
    for (const IterationStats &s : r.per_iteration) {
        nlohmann::ordered_json it;
        it["iteration"] = s.iteration;
        it["overused_nodes"] = s.overused_nodes;
        it["routed_connections"] = s.routed_connections;
        it["phase"] = std::string(to_string(s.phase));
        it["wall_ms"] = s.wall_ms;
        j["per_iteration"].push_back(std::move(it));
    }
    return j.dump(2);
}

RoutingReport report_from_json(const std::string &text)
{
    const auto j = nlohmann::json::parse(text);
    RoutingReport r;
    r.legal = j.at("legal").get<bool>();
    r.overflow_nodes = j.at("overflow_nodes").get<int>();
    r.disconnected_connections = j.at("disconnected_connections").get<int>();
    r.total_wirelength = j.at("total_wirelength").get<long long>();
    r.critical_path_wirelength = j.at("critical_path_wirelength").get<long long>();
    r.runtime_s = j.at("runtime_s").get<double>();
    r.score = j.at("score").get<double>();
    r.iterations = j.at("iterations").get<int>();
    for (const auto &it : j.at("per_iteration")) {
        IterationStats s;
        s.iteration = it.at("iteration").get<int>();
        s.overused_nodes = it.at("overused_nodes").get<int>();
        s.routed_connections = it.at("routed_connections").get<int>();
        s.phase = it.at("phase").get<std::string>() == to_string(Phase::HistoricalCentric) ? Phase::HistoricalCentric
                                                                                         : Phase::PresentCentric;
        s.wall_ms = it.at("wall_ms").get<double>();
        r.per_iteration.push_back(s);
    }
    return r;
}

std::string report_to_csv(const RoutingReport &r)
{
    std::ostringstream out;
    out << "legal,overflow_nodes,disconnected_connections,total_wirelength,critical_path_wirelength,runtime_s,score,"
           "iterations\n";
    out << (r.legal ? 1 : 0) << ',' << r.overflow_nodes << ',' << r.disconnected_connections << ','
        << r.total_wirelength << ',' << r.critical_path_wirelength << ',' << detail::format_double(r.runtime_s) << ','
        << detail::format_double(r.score) << ',' << r.iterations << '\n';
    return out.str();
}

void emit_report(const RoutingReport &report, const std::filesystem::path &path, ReportFormat format)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << (format == ReportFormat::Json ? report_to_json(report) + "\n" : report_to_csv(report));
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

void write_solution(const Netlist &netlist, const Solution &solution, std::ostream &out)
{
    for (std::size_t c = 0; c < netlist.connections.size(); ++c) {
        const auto &path = path_of(solution, c);
        if (path.empty())
            continue;
        const Connection &conn = netlist.connections[c];
        out << "PATH " << conn.net_id << ' ' << conn.sink_index;
        for (NodeId n : path)
            out << ' ' << n;
        out << '\n';
    }
}

Solution read_solution(std::istream &in, const RoutingGraph &graph, const Netlist &netlist)
{
    std::vector<std::size_t> first_conn(netlist.nets.size(), 0);
    for (std::size_t c = netlist.connections.size(); c-- > 0;)
        first_conn[static_cast<std::size_t>(netlist.connections[c].net_id)] = c;

    Solution solution(netlist.connections.size());
    detail::LineReader reader(in);
    while (reader.next()) {
        if (reader.token(0) != "PATH")
            throw ParseError(reader.line(), "unknown record '" + std::string(reader.token(0)) + "'");
        if (reader.size() < 4)
            throw ParseError(reader.line(), "expected 'PATH <net_id> <conn_idx> <node_id>+'");
        const long long net = reader.int_at(1);
        const long long idx = reader.int_at(2);
        if (net < 0 || net >= static_cast<long long>(netlist.nets.size()))
            throw ParseError(reader.line(), "unknown net " + std::to_string(net));
        if (idx < 0 || idx >= static_cast<long long>(netlist.nets[static_cast<std::size_t>(net)].sinks.size()))
            throw ParseError(reader.line(), "net " + std::to_string(net) + " has no connection " + std::to_string(idx));
        auto &path = solution[first_conn[static_cast<std::size_t>(net)] + static_cast<std::size_t>(idx)];
        if (!path.empty())
            throw ParseError(reader.line(), "duplicate path for net " + std::to_string(net) + " connection " +
                                                std::to_string(idx));
        for (std::size_t i = 3; i < reader.size(); ++i) {
            const long long n = reader.int_at(i);
            if (n < 0 || n >= static_cast<long long>(graph.num_nodes()))
                throw ParseError(reader.line(), "unknown node " + std::to_string(n));
            path.push_back(static_cast<NodeId>(n));
        }
    }
    return solution;
}

void save_solution(const Netlist &netlist, const Solution &solution, const std::filesystem::path &path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_solution(netlist, solution, out);
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

Solution load_solution(const std::filesystem::path &path, const RoutingGraph &graph, const Netlist &netlist)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    return read_solution(in, graph, netlist);
}

} // namespace parroute
