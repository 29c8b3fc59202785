#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "parroute/error.hpp"
#include "parroute/eval.hpp"
#include "parroute/netlist.hpp"
#include "parroute/router.hpp"
#include "parroute/rrg.hpp"

namespace py = pybind11;
using namespace parroute;

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Parallel negotiation-based FPGA router";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<InvalidParameter>(m, "InvalidParameter", PyExc_ValueError);
    py::register_exception<GenerationError>(m, "GenerationError", PyExc_RuntimeError);
    py::register_exception<UnroutableError>(m, "UnroutableError", PyExc_RuntimeError);

    py::class_<GridParams>(m, "GridParams")
        .def(py::init<>())
        .def_readwrite("width", &GridParams::width)
        .def_readwrite("height", &GridParams::height)
        .def_readwrite("wires_per_dir_per_len", &GridParams::wires_per_dir_per_len)
        .def_readwrite("switch_density", &GridParams::switch_density)
        .def_readwrite("pins_per_tile", &GridParams::pins_per_tile)
        .def_readwrite("seed", &GridParams::seed);

    py::class_<RoutingGraph>(m, "RoutingGraph")
        .def_property_readonly("width", &RoutingGraph::width)
        .def_property_readonly("height", &RoutingGraph::height)
        .def_property_readonly("num_nodes", &RoutingGraph::num_nodes)
        .def_property_readonly("num_edges", &RoutingGraph::num_edges)
        .def("node_length", [](const RoutingGraph &g, NodeId n) { return g.node(n).length; })
        .def("node_tile", [](const RoutingGraph &g, NodeId n) { return std::pair{g.node(n).x, g.node(n).y}; });

    m.def("generate_grid", &generate_grid, py::arg("params"));
    m.def("save_rrg", &save_rrg, py::arg("graph"), py::arg("path"));
    m.def("load_rrg", &load_rrg, py::arg("path"));

    py::class_<BenchmarkParams>(m, "BenchmarkParams")
        .def(py::init<>())
        .def_readwrite("num_nets", &BenchmarkParams::num_nets)
        .def_readwrite("fanout_mean", &BenchmarkParams::fanout_mean)
        .def_readwrite("locality", &BenchmarkParams::locality)
        .def_readwrite("seed", &BenchmarkParams::seed)
        .def_readwrite("margin", &BenchmarkParams::margin)
        .def_readwrite("quadrants", &BenchmarkParams::quadrants);

    py::class_<Net>(m, "Net")
        .def(py::init([](int id, NodeId source, std::vector<NodeId> sinks) { return Net{id, source, std::move(sinks)}; }),
             py::arg("id"), py::arg("source"), py::arg("sinks"))
        .def_readonly("id", &Net::id)
        .def_readonly("source", &Net::source)
        .def_readonly("sinks", &Net::sinks);

    py::class_<Netlist>(m, "Netlist")
        .def_readonly("nets", &Netlist::nets)
        .def_property_readonly("num_connections", [](const Netlist &nl) { return nl.connections.size(); })
        .def_readonly("margin", &Netlist::margin);

    m.def("make_netlist", &make_netlist, py::arg("nets"), py::arg("graph"), py::arg("margin") = kDefaultBboxMargin);
    m.def("generate_benchmark", &generate_benchmark, py::arg("graph"), py::arg("params"));
    m.def("save_netlist", &save_netlist, py::arg("netlist"), py::arg("path"));
    m.def("load_netlist", &load_netlist, py::arg("path"), py::arg("graph"), py::arg("margin") = kDefaultBboxMargin);

    py::class_<CostConfig>(m, "CostConfig")
        .def(py::init<>())
        .def_readwrite("p0", &CostConfig::p0)
        .def_readwrite("pf", &CostConfig::pf)
        .def_readwrite("hf", &CostConfig::hf)
        .def_readwrite("alpha", &CostConfig::alpha)
        .def_readwrite("beta", &CostConfig::beta)
        .def_readwrite("congestion_threshold", &CostConfig::congestion_threshold)
        .def_readwrite("switch_iteration", &CostConfig::switch_iteration)
        .def_readwrite("astar_weight", &CostConfig::astar_weight)
        .def_readwrite("legacy_mode", &CostConfig::legacy_mode)
        .def_readwrite("hus_enabled", &CostConfig::hus_enabled);

    py::class_<RouterOptions>(m, "RouterOptions")
        .def(py::init<>())
        .def_readwrite("threads", &RouterOptions::threads)
        .def_readwrite("max_iterations", &RouterOptions::max_iterations)
        .def_readwrite("ternary", &RouterOptions::ternary)
        .def_readwrite("bbox_retries", &RouterOptions::bbox_retries)
        .def_readwrite("cost", &RouterOptions::cost);

    py::class_<RoutingResult>(m, "RoutingResult")
        .def_readonly("success", &RoutingResult::success)
        .def_readonly("paths", &RoutingResult::paths)
        .def_readonly("iterations", &RoutingResult::iterations)
        .def_readonly("overflow_nodes", &RoutingResult::overflow_nodes)
        .def_readonly("runtime_s", &RoutingResult::runtime_s);

    m.def(
        "route_all",
        [](const RoutingGraph &g, const Netlist &nl, const RouterOptions &o) {
            py::gil_scoped_release release;
            return route_all(g, nl, o);
        },
        py::arg("graph"), py::arg("netlist"), py::arg("options") = RouterOptions{});

    py::class_<ValidationResult>(m, "ValidationResult")
        .def_readonly("overflow_nodes", &ValidationResult::overflow_nodes)
        .def_readonly("disconnected_connections", &ValidationResult::disconnected_connections)
        .def_readonly("violations", &ValidationResult::violations)
        .def_property_readonly("legal", &ValidationResult::legal);

    py::class_<Wirelength>(m, "Wirelength")
        .def_readonly("total", &Wirelength::total)
        .def_readonly("critical_path", &Wirelength::critical_path);

    m.def("validate", &validate, py::arg("graph"), py::arg("netlist"), py::arg("solution"));
    m.def("wirelength", &wirelength, py::arg("graph"), py::arg("netlist"), py::arg("solution"));
    m.def("score", &score, py::arg("runtime_s"), py::arg("critical_path_wl"));
    m.def("save_solution", &save_solution, py::arg("netlist"), py::arg("solution"), py::arg("path"));
    m.def("load_solution", &load_solution, py::arg("path"), py::arg("graph"), py::arg("netlist"));
    m.def(
        "report_json",
        [](const RoutingGraph &g, const Netlist &nl, const RoutingResult &r) { return report_to_json(make_report(g, nl, r)); },
        py::arg("graph"), py::arg("netlist"), py::arg("result"));
}
