#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "fixtures.hpp"
#include "m2v/motif.hpp"
#include "oracle.hpp"

using namespace m2v;

TEST_CASE("parse_motif_spec accepts the bibliographic patterns") {
    MotifPattern m2 = parse_motif_spec("nodes: 1:A 2:P 3:A; edges: 1->2 3->2");
    CHECK(m2.k() == 3);
    CHECK(m2.slot_types == std::vector<std::string>{"A", "P", "A"});
    CHECK(m2.has_edge(0, 1));
    CHECK(m2.has_edge(2, 1));
    CHECK_FALSE(m2.has_edge(1, 0));

    MotifPattern m4 =
        parse_motif_spec("name: M4\nnodes: 1:A 2:P 3:V 4:A\nedges: 1->2 4->2 2->3");
    CHECK(m4.k() == 4);
    CHECK(m4.name == "M4");
    CHECK(m4.edges.size() == 3);
}

TEST_CASE("parse_motif_spec rejects invalid patterns") {
    CHECK_THROWS_WITH_AS(parse_motif_spec("nodes: 1:A; edges:"),
                         doctest::Contains("between 2 and 5"), std::runtime_error);
    CHECK_THROWS_WITH_AS(
        parse_motif_spec("nodes: 1:A 2:B 3:C 4:A 5:B 6:C; edges: 1->2 2->3 3->4 4->5 5->6"),
        doctest::Contains("between 2 and 5"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_motif_spec("nodes: 1:A 2:B 3:C; edges: 1->2"),
                         doctest::Contains("weakly connected"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_motif_spec("nodes: 1:A 2:B; edges: 1->2 1->2"),
                         doctest::Contains("duplicate edge"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_motif_spec("nodes: 1:A 2:B; edges: 1->1 1->2"),
                         doctest::Contains("self loop"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_motif_spec("nodes: 1:A 2:B; edges: 1->9"),
                         doctest::Contains("undeclared slot"), std::runtime_error);
    std::vector<std::string> registry{"A", "P"};
    CHECK_THROWS_WITH_AS(parse_motif_spec("nodes: 1:A 2:Z; edges: 1->2", &registry),
                         doctest::Contains("unknown node type 'Z'"), std::runtime_error);
    CHECK_NOTHROW(parse_motif_spec("nodes: 1:A 2:*; edges: 1->2", &registry));
}

TEST_CASE("toy example semantics: two instances, {a,b,d} excluded") {
    HeteroGraph g = fixtures::toy_graph();
    MotifPattern m = fixtures::toy_motif();
    InstanceSet inst = enumerate_instances(g, m);
    REQUIRE(motif_frequency(inst) == 2);
    std::set<std::set<std::string>> node_sets;
    for (const MotifInstance& in : inst.instances) {
        std::set<std::string> ids;
        for (int32_t u : in.node_set) ids.insert(g.node_id(u));
        node_sets.insert(ids);
    }
    CHECK(node_sets == std::set<std::set<std::string>>{{"a", "b", "c"}, {"a", "b", "e"}});
}

TEST_CASE("edgeless graph yields an empty instance set") {
    HeteroGraph g = fixtures::build_graph({{"a", "A"}, {"b", "A"}, {"c", "A"}}, {});
    MotifPattern m = parse_motif_spec("nodes: 1:* 2:*; edges: 1->2");
    CHECK(motif_frequency(enumerate_instances(g, m)) == 0);
}

TEST_CASE("missing concrete type warns and returns empty") {
    HeteroGraph g = fixtures::build_graph({{"a", "A"}, {"b", "A"}}, {{"a", "b", "x"}});
    MotifPattern m = parse_motif_spec("nodes: 1:A 2:Q; edges: 1->2");
    CHECK(motif_frequency(enumerate_instances(g, m)) == 0);
}

TEST_CASE("enumeration matches the exhaustive oracle on random graphs") {
    for (uint64_t seed = 1; seed <= 40; ++seed) {
        HeteroGraph g = fixtures::random_typed_graph(seed);
        MotifPattern m = fixtures::random_motif(seed);
        InstanceSet inst = enumerate_instances(g, m);
        auto expected = oracle::instances(oracle::raw_graph(g), m);
        REQUIRE(motif_frequency(inst) == expected.size());
        std::set<std::vector<int32_t>> got;
        for (const MotifInstance& in : inst.instances) got.insert(in.node_set);
        CHECK(got == expected);
    }
}

TEST_CASE("every reported assignment passes an independent induced re-check") {
    for (uint64_t seed = 50; seed <= 70; ++seed) {
        HeteroGraph g = fixtures::random_typed_graph(seed);
        MotifPattern m = fixtures::random_motif(seed);
        oracle::RawGraph raw = oracle::raw_graph(g);
        for (const MotifInstance& in : enumerate_instances(g, m).instances)
            CHECK(oracle::assignment_valid(raw, m, in.assignment));
    }
}

TEST_CASE("enumeration is identical across worker counts") {
    HeteroGraph g = fixtures::random_typed_graph(99, 10, 25);
    MotifPattern m = fixtures::random_motif(99);
    InstanceSet a = enumerate_instances(g, m, 1);
    InstanceSet b = enumerate_instances(g, m, 4);
    REQUIRE(a.instances.size() == b.instances.size());
    for (size_t i = 0; i < a.instances.size(); ++i) {
        CHECK(a.instances[i].node_set == b.instances[i].node_set);
        CHECK(a.instances[i].assignment == b.instances[i].assignment);
    }
}

TEST_CASE("single-instance adjacency") {
    HeteroGraph g = fixtures::build_graph(
        {{"a1", "A"}, {"a2", "A"}, {"p", "P"}},
        {{"a1", "p", "writes"}, {"a2", "p", "writes"}});
    MotifPattern m = parse_motif_spec("nodes: 1:A 2:P 3:A; edges: 1->2 3->2");
    InstanceSet inst = enumerate_instances(g, m);
    REQUIRE(motif_frequency(inst) == 1);
    MotifAdjacency adj = build_motif_adjacency(g, m, inst, AdjacencyMode::Weighted);
    int32_t a1 = g.index_of("a1"), a2 = g.index_of("a2"), p = g.index_of("p");
    CHECK(adj.weight(a1, a2) == 1);
    CHECK(adj.weight(a1, p) == 1);
    CHECK(adj.weight(a2, p) == 1);
    CHECK(adj.weight(a2, a1) == 1);
    CHECK(adj.weight(a1, a1) == 0);
    CHECK(adj.nonzero_pairs == 3);
    CHECK(adj.isolated_nodes == 0);
}

TEST_CASE("toy adjacency weights") {
    HeteroGraph g = fixtures::toy_graph();
    MotifPattern m = fixtures::toy_motif();
    InstanceSet inst = enumerate_instances(g, m);
    MotifAdjacency adj = build_motif_adjacency(g, m, inst, AdjacencyMode::Weighted);
    auto w = [&](const char* x, const char* y) {
        return adj.weight(g.index_of(x), g.index_of(y));
    };
    CHECK(w("a", "b") == 2);
    CHECK(w("a", "c") == 1);
    CHECK(w("b", "c") == 1);
    CHECK(w("a", "e") == 1);
    CHECK(w("b", "e") == 1);
    for (const char* x : {"a", "b", "c", "e"}) CHECK(w(x, "d") == 0);
    CHECK(adj.isolated_nodes == 1);

    MotifAdjacency bin = build_motif_adjacency(g, m, inst, AdjacencyMode::Binary);
    CHECK(bin.weight(g.index_of("a"), g.index_of("b")) == 1);
}

TEST_CASE("adjacency equals the oracle pair tally; symmetric, zero diagonal") {
    for (uint64_t seed = 1; seed <= 30; ++seed) {
        HeteroGraph g = fixtures::random_typed_graph(seed);
        MotifPattern m = fixtures::random_motif(seed + 1000);
        InstanceSet inst = enumerate_instances(g, m);
        MotifAdjacency adj = build_motif_adjacency(g, m, inst, AdjacencyMode::Weighted);
        auto tally = oracle::pair_tally(oracle::instances(oracle::raw_graph(g), m));
        size_t nonzero = 0;
        int64_t total = 0;
        for (int32_t u = 0; u < g.num_nodes(); ++u) {
            CHECK(adj.weight(u, u) == 0);
            for (int32_t v = 0; v < g.num_nodes(); ++v) {
                CHECK(adj.weight(u, v) == adj.weight(v, u));
                if (u < v) {
                    auto it = tally.find({u, v});
                    int64_t expected = it == tally.end() ? 0 : it->second;
                    CHECK(adj.weight(u, v) == expected);
                    if (expected > 0) {
                        ++nonzero;
                        total += expected;
                    }
                }
            }
        }
        CHECK(adj.nonzero_pairs == nonzero);
        // Sum of upper-triangle weights counts C(k,2) per instance.
        int64_t k = m.k();
        CHECK(total == static_cast<int64_t>(motif_frequency(inst)) * k * (k - 1) / 2);
    }
}

TEST_CASE("build_motif_adjacency rejects mismatched instance sets") {
    HeteroGraph g = fixtures::toy_graph();
    MotifPattern m = fixtures::toy_motif();
    InstanceSet inst = enumerate_instances(g, m);
    MotifPattern other = parse_motif_spec("name: other; nodes: 1:* 2:*; edges: 1->2");
    CHECK_THROWS_AS(build_motif_adjacency(g, other, inst, AdjacencyMode::Weighted),
                    std::runtime_error);
}

TEST_CASE("adjacency export and reload round trip as a walk view") {
    fixtures::TempDir dir("motif_export");
    HeteroGraph g = fixtures::toy_graph();
    MotifPattern m = fixtures::toy_motif();
    InstanceSet inst = enumerate_instances(g, m);
    MotifAdjacency adj = build_motif_adjacency(g, m, inst, AdjacencyMode::Weighted);
    export_motif_adjacency(adj, g, dir.file("adj.tsv"));
    export_instances(inst, g, dir.file("inst.tsv"));

    WeightedGraphView direct = adj.as_view();
    WeightedGraphView loaded = load_adjacency_view(dir.file("adj.tsv"), g);
    direct.validate();
    loaded.validate();
    REQUIRE(direct.neighbors == loaded.neighbors);
    REQUIRE(direct.offsets == loaded.offsets);
    REQUIRE(direct.weights == loaded.weights);

    std::ifstream in(dir.file("adj.tsv"));
    std::string first_line;
    std::getline(in, first_line);
    CHECK(first_line == "a\tb\t2");
}
