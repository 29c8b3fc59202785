#include <doctest.h>

#include <set>
#include <sstream>
#include <string>

#include "parroute/error.hpp"
#include "parroute/rrg.hpp"
#include "support.hpp"

using namespace parroute;
using testsupport::Rng;

namespace {

std::string serialize(const RoutingGraph &g)
{
    std::ostringstream out;
    write_rrg(g, out);
    return out.str();
}

GridParams grid(int w, int h, std::map<int, int> wires, double density, std::uint64_t seed)
{
    GridParams p;
    p.width = w;
    p.height = h;
    p.wires_per_dir_per_len = std::move(wires);
    p.switch_density = density;
    p.seed = seed;
    return p;
}

} // namespace

TEST_SUITE("rrg")
{
    TEST_CASE("single tile grid keeps every wire in tile 0,0")
    {
        const RoutingGraph g = generate_grid(grid(1, 1, {{1, 2}}, 1.0, 7));
        int wires = 0;
        for (const RrgNode &n : g.nodes()) {
            CHECK(n.x == 0);
            CHECK(n.y == 0);
            if (!n.is_pin()) {
                CHECK(n.length == 1);
                ++wires;
            }
        }
        CHECK(wires == 4 * 2);
    }

    TEST_CASE("same parameters and seed give byte-identical graphs")
    {
        for (std::uint64_t s : {1u, 2u, 99u}) {
            const auto a = serialize(generate_grid(grid(4, 4, {{1, 4}}, 1.0, s)));
            const auto b = serialize(generate_grid(grid(4, 4, {{1, 4}}, 1.0, s)));
            CHECK(a == b);
        }
    }

    TEST_CASE("determinism over random parameter draws")
    {
        Rng rng(2024);
        const int lengths[] = {1, 2, 4, 12};
        for (int draw = 0; draw < 25; ++draw) {
            GridParams p;
            p.width = rng.uniform(1, 10);
            p.height = rng.uniform(1, 10);
            p.wires_per_dir_per_len.clear();
            for (int len : lengths)
                if (rng.coin())
                    p.wires_per_dir_per_len[len] = rng.uniform(1, 4);
            if (p.wires_per_dir_per_len.empty())
                p.wires_per_dir_per_len[1] = 1;
            p.switch_density = rng.real(0.05, 1.0);
            p.pins_per_tile = rng.uniform(1, 6);
            p.seed = rng.engine();
            const RoutingGraph a = generate_grid(p);
            const RoutingGraph b = generate_grid(p);
            CHECK(a == b);
            CHECK(serialize(a) == serialize(b));
        }
    }

    TEST_CASE("switch density below 1 drops some wire-to-wire switches, seed dependent")
    {
        const auto full = generate_grid(grid(6, 6, {{1, 4}}, 1.0, 3));
        const auto half_a = generate_grid(grid(6, 6, {{1, 4}}, 0.5, 3));
        const auto half_b = generate_grid(grid(6, 6, {{1, 4}}, 0.5, 4));
        CHECK(half_a.num_edges() < full.num_edges());
        CHECK(half_a.num_nodes() == full.num_nodes());
        CHECK(serialize(half_a) != serialize(half_b));
    }

    TEST_CASE("node count matches closed form, counted from the emitted file")
    {
        const RoutingGraph g = generate_grid(grid(8, 8, {{1, 8}, {4, 4}}, 1.0, 3));
        std::istringstream in(serialize(g));
        std::string line;
        std::size_t node_lines = 0;
        while (std::getline(in, line))
            if (line.rfind("N ", 0) == 0)
                ++node_lines;
        // per tile: 8 output + 8 input pins, four directions of (8 + 4) tracks
        const std::size_t expected = 8 * 8 * (2 * 8 + 4 * (8 + 4));
        CHECK(node_lines == expected);
        CHECK(g.num_nodes() == expected);
    }

    TEST_CASE("parameter errors")
    {
        CHECK_THROWS_AS(generate_grid(grid(0, 4, {{1, 1}}, 1.0, 1)), InvalidParameter);
        CHECK_THROWS_AS(generate_grid(grid(4, 0, {{1, 1}}, 1.0, 1)), InvalidParameter);
        CHECK_THROWS_AS(generate_grid(grid(4, 4, {{3, 1}}, 1.0, 1)), InvalidParameter);
        CHECK_THROWS_AS(generate_grid(grid(4, 4, {{1, 0}}, 1.0, 1)), InvalidParameter);
        CHECK_THROWS_AS(generate_grid(grid(4, 4, {}, 1.0, 1)), InvalidParameter);
        CHECK_THROWS_AS(generate_grid(grid(4, 4, {{1, 1}}, 0.0, 1)), InvalidParameter);
        CHECK_THROWS_AS(generate_grid(grid(4, 4, {{1, 1}}, 1.5, 1)), InvalidParameter);
    }

    TEST_CASE("structural invariants")
    {
        const RoutingGraph g = generate_grid(grid(5, 4, {{1, 2}, {2, 1}, {4, 1}, {12, 1}}, 0.7, 5));
        const std::set<int> lengths{0, 1, 2, 4, 12};
        for (const RrgNode &n : g.nodes()) {
            CHECK(lengths.count(n.length) == 1);
            CHECK(RrgNode::capacity == 1);
            CHECK(n.base_cost >= 0.0);
            for (NodeId v : g.successors(n.id)) {
                CHECK(g.contains(v));
                CHECK(v != n.id);
            }
        }
    }

    TEST_CASE("base cost strictly increases with length")
    {
        const int lengths[] = {1, 2, 4, 12};
        for (int i = 0; i + 1 < 4; ++i)
            CHECK(default_base_cost(lengths[i]) < default_base_cost(lengths[i + 1]));
        CHECK(default_base_cost(0) == 0.5);
        CHECK(default_base_cost(1) == 1.0);
        CHECK(default_base_cost(12) == 3.75);
    }

    TEST_CASE("output pins reach input pins of every other tile at full density")
    {
        Rng rng(77);
        for (int trial = 0; trial < 4; ++trial) {
            const int w = rng.uniform(2, 16), h = rng.uniform(2, 16);
            std::map<int, int> wires{{1, rng.uniform(1, 3)}};
            if (rng.coin())
                wires[2] = 1;
            if (rng.coin())
                wires[4] = 1;
            GridParams p = grid(w, h, wires, 1.0, rng.engine());
            p.pins_per_tile = 2;
            const RoutingGraph g = generate_grid(p);
            const auto sinks = testsupport::sink_pins(g);
            for (NodeId s : testsupport::source_pins(g)) {
                const auto seen = testsupport::reachable_from(g, s);
                const RrgNode &sn = g.node(s);
                for (NodeId t : sinks) {
                    const RrgNode &tn = g.node(t);
                    if (tn.x == sn.x && tn.y == sn.y)
                        continue;
                    REQUIRE_MESSAGE(seen[static_cast<std::size_t>(t)], "grid ", w, "x", h, " pin ", s, " -> ", t);
                }
            }
        }
    }

    TEST_CASE("round trip of the single tile graph")
    {
        const RoutingGraph g = generate_grid(grid(1, 1, {{1, 2}}, 1.0, 7));
        std::istringstream in(serialize(g));
        CHECK(read_rrg(in) == g);
    }

    TEST_CASE("round trip of an 8x8 graph re-serializes to identical bytes")
    {
        const RoutingGraph g = generate_grid(grid(8, 8, {{1, 4}, {2, 2}, {12, 1}}, 0.8, 11));
        const std::string text = serialize(g);
        std::istringstream in(text);
        const RoutingGraph back = read_rrg(in);
        CHECK(back == g);
        CHECK(serialize(back) == text);
    }

    TEST_CASE("round trip through files")
    {
        const RoutingGraph g = generate_grid(grid(3, 3, {{1, 2}}, 1.0, 5));
        const auto path = std::filesystem::temp_directory_path() / "parroute_rrg_roundtrip.rrg";
        save_rrg(g, path);
        CHECK(load_rrg(path) == g);
        std::filesystem::remove(path);
    }

    TEST_CASE("parse errors name the line")
    {
        auto parse = [](const std::string &text) {
            std::istringstream in(text);
            return read_rrg(in);
        };
        const std::string head = "RRG v1 1 1 2 1\nN 0 0 0 0 0.5\nN 1 0 0 1 1\n";
        CHECK_NOTHROW(parse(head + "E 0 1\n"));

        try {
            parse(head + "E 0 9999\n");
            FAIL("expected a parse error");
        } catch (const ParseError &e) {
            CHECK(std::string(e.what()).find("unknown node") != std::string::npos);
            CHECK(e.line() == 4);
        }
        try {
            parse("RRG v1 1 1 2 0\nN 0 0 0 0 0.5\nN 0 0 0 1 1\n");
            FAIL("expected a parse error");
        } catch (const ParseError &e) {
            CHECK(std::string(e.what()).find("duplicate node id") != std::string::npos);
            CHECK(e.line() == 3);
        }
        CHECK_THROWS_AS(parse("GRAPH 1 1 0 0\n"), ParseError);
        CHECK_THROWS_AS(parse(""), ParseError);
        CHECK_THROWS_AS(parse("RRG v1 1 1 1 0\nN 0 0 0 3 1\n"), ParseError);
        CHECK_THROWS_AS(parse("RRG v1 1 1 1 1\nN 0 0 0 1 1\nE 0 0\n"), ParseError);
        CHECK_THROWS_AS(parse("RRG v1 1 1 2 0\nN 0 0 0 1 1\n"), ParseError);
    }
}
