#pragma once

// Shared synthetic fixtures for the unit and acceptance suites.

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "m2v/graph.hpp"
#include "m2v/motif.hpp"
#include "m2v/rng.hpp"

namespace fixtures {

// Scratch directory under the system temp root, removed on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("m2v_" + tag + "_" + std::to_string(counter_++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string str() const { return path_.string(); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

  private:
    static inline int counter_ = 0;
    std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

inline m2v::HeteroGraph build_graph(
    const std::vector<std::pair<std::string, std::string>>& nodes,
    const std::vector<std::tuple<std::string, std::string, std::string>>& edges) {
    m2v::HeteroGraph g;
    for (const auto& [id, type] : nodes) g.add_node(id, type);
    for (const auto& [src, dst, type] : edges)
        g.add_edge(g.index_of(src), g.index_of(dst), type);
    g.finalize();
    return g;
}

// The three-node toy: pattern 1<->2 plus 1->3 over a five-node graph where
// node sets {a,b,c} and {a,b,e} host instances and {a,b,d} is disqualified
// by an extra arc d->b.
inline m2v::HeteroGraph toy_graph() {
    return build_graph({{"a", "n"}, {"b", "n"}, {"c", "n"}, {"d", "n"}, {"e", "n"}},
                       {{"a", "b", "x"},
                        {"b", "a", "x"},
                        {"a", "c", "x"},
                        {"a", "e", "x"},
                        {"a", "d", "x"},
                        {"d", "b", "x"}});
}

inline m2v::MotifPattern toy_motif() {
    return m2v::parse_motif_spec("name: toy; nodes: 1:* 2:* 3:*; edges: 1->2 2->1 1->3");
}

// Random typed digraph for oracle cross-checks: up to max_nodes nodes over
// 1-3 node types, up to max_edges distinct non-self arcs over 1-2 edge types.
inline m2v::HeteroGraph random_typed_graph(uint64_t seed, int max_nodes = 10,
                                           int max_edges = 25) {
    m2v::Rng rng(m2v::mix64(seed, 0x474e4c00ULL));
    int n = 2 + static_cast<int>(rng.next_below(max_nodes - 1));
    int n_types = 1 + static_cast<int>(rng.next_below(3));
    const char* type_names[] = {"A", "B", "C"};
    std::vector<std::pair<std::string, std::string>> nodes;
    for (int i = 0; i < n; ++i)
        nodes.emplace_back("v" + std::to_string(i),
                           type_names[rng.next_below(n_types)]);
    int want_edges = static_cast<int>(rng.next_below(max_edges + 1));
    std::vector<std::tuple<std::string, std::string, std::string>> edges;
    std::set<std::pair<int, int>> seen;
    for (int attempts = 0; attempts < want_edges * 4 && static_cast<int>(edges.size()) < want_edges;
         ++attempts) {
        int u = static_cast<int>(rng.next_below(n));
        int v = static_cast<int>(rng.next_below(n));
        if (u == v || !seen.insert({u, v}).second) continue;
        edges.emplace_back("v" + std::to_string(u), "v" + std::to_string(v),
                           rng.next_below(2) == 0 ? "x" : "y");
    }
    return build_graph(nodes, edges);
}

// Random weakly connected 3- or 4-node pattern with a type/wildcard mix.
inline m2v::MotifPattern random_motif(uint64_t seed) {
    m2v::Rng rng(m2v::mix64(seed, 0x4d4f5400ULL));
    int k = 3 + static_cast<int>(rng.next_below(2));
    const char* type_names[] = {"A", "B", "C", "*"};
    for (;;) {
        std::string spec = "nodes:";
        for (int s = 0; s < k; ++s) {
            spec += " " + std::to_string(s + 1) + ":" +
                    type_names[rng.next_below(4)];
        }
        spec += "; edges:";
        int want = 1 + static_cast<int>(rng.next_below(k * (k - 1)));
        std::set<std::pair<int, int>> chosen;
        for (int e = 0; e < want; ++e) {
            int a = static_cast<int>(rng.next_below(k));
            int b = static_cast<int>(rng.next_below(k));
            if (a == b) continue;
            chosen.insert({a, b});
        }
        for (const auto& [a, b] : chosen)
            spec += " " + std::to_string(a + 1) + "->" + std::to_string(b + 1);
        try {
            return m2v::parse_motif_spec(spec);
        } catch (const std::runtime_error&) {
            continue;  // disconnected draw, try again
        }
    }
}

// Two-community heterogeneous graph: authors and papers per community with
// within-community co-authorship (the planted 3-node motif) and
// cross-community citation noise. Writes edge, node, label, and motif files.
struct CommunityFixture {
    std::string edges, nodes, labels, motif;
};

inline CommunityFixture write_community_fixture(const TempDir& dir, uint64_t seed,
                                                int authors_per_side = 40,
                                                int papers_per_side = 110,
                                                int cross_citations = 150) {
    m2v::Rng rng(m2v::mix64(seed, 0x434f4d4dULL));
    std::string nodes_text, edges_text, labels_text;
    for (int c = 0; c < 2; ++c) {
        for (int i = 0; i < authors_per_side; ++i) {
            std::string id = "a" + std::to_string(c) + "_" + std::to_string(i);
            nodes_text += id + "\tA\n";
            labels_text += id + "\tc" + std::to_string(c) + "\n";
        }
        for (int i = 0; i < papers_per_side; ++i) {
            std::string id = "p" + std::to_string(c) + "_" + std::to_string(i);
            nodes_text += id + "\tP\n";
            labels_text += id + "\tc" + std::to_string(c) + "\n";
        }
    }
    for (int c = 0; c < 2; ++c) {
        for (int i = 0; i < papers_per_side; ++i) {
            std::string paper = "p" + std::to_string(c) + "_" + std::to_string(i);
            int a1 = static_cast<int>(rng.next_below(authors_per_side));
            int a2 = static_cast<int>(rng.next_below(authors_per_side));
            while (a2 == a1) a2 = static_cast<int>(rng.next_below(authors_per_side));
            edges_text += "a" + std::to_string(c) + "_" + std::to_string(a1) + "\t" +
                          paper + "\twrites\n";
            edges_text += "a" + std::to_string(c) + "_" + std::to_string(a2) + "\t" +
                          paper + "\twrites\n";
        }
    }
    std::set<std::pair<int, int>> cited;
    int added = 0;
    while (added < cross_citations) {
        int i = static_cast<int>(rng.next_below(papers_per_side));
        int j = static_cast<int>(rng.next_below(papers_per_side));
        if (!cited.insert({i, j}).second) continue;
        // Alternate direction so both communities cite each other.
        if (added % 2 == 0)
            edges_text += "p0_" + std::to_string(i) + "\tp1_" + std::to_string(j) +
                          "\tcites\n";
        else
            edges_text += "p1_" + std::to_string(i) + "\tp0_" + std::to_string(j) +
                          "\tcites\n";
        ++added;
    }

    CommunityFixture fx;
    fx.edges = dir.file("community_edges.tsv");
    fx.nodes = dir.file("community_nodes.tsv");
    fx.labels = dir.file("community_labels.tsv");
    fx.motif = dir.file("coauth.motif");
    write_file(fx.edges, edges_text);
    write_file(fx.nodes, nodes_text);
    write_file(fx.labels, labels_text);
    write_file(fx.motif, "name: coauth\nnodes: 1:A 2:P 3:A\nedges: 1->2 3->2\n");
    return fx;
}

// User/item/category clusters for link prediction: users rate mostly within
// their cluster; items carry cluster categories.
struct LinkFixture {
    std::string edges, nodes, motif;
};

inline LinkFixture write_link_fixture(const TempDir& dir, uint64_t seed,
                                      int clusters = 10, int users_per_cluster = 20,
                                      int items_per_cluster = 25,
                                      int cats_per_cluster = 5, int ratings_per_user = 6) {
    m2v::Rng rng(m2v::mix64(seed, 0x4c4e4b00ULL));
    std::string nodes_text, edges_text;
    for (int k = 0; k < clusters; ++k) {
        for (int i = 0; i < users_per_cluster; ++i)
            nodes_text += "u" + std::to_string(k) + "_" + std::to_string(i) + "\tU\n";
        for (int i = 0; i < items_per_cluster; ++i)
            nodes_text += "r" + std::to_string(k) + "_" + std::to_string(i) + "\tR\n";
        for (int i = 0; i < cats_per_cluster; ++i)
            nodes_text += "c" + std::to_string(k) + "_" + std::to_string(i) + "\tC\n";
    }
    std::set<std::pair<std::string, std::string>> rated;
    for (int k = 0; k < clusters; ++k) {
        for (int i = 0; i < users_per_cluster; ++i) {
            std::string user = "u" + std::to_string(k) + "_" + std::to_string(i);
            int placed = 0;
            while (placed < ratings_per_user) {
                int ck = rng.next_below(10) == 0
                             ? static_cast<int>(rng.next_below(clusters))
                             : k;
                std::string item = "r" + std::to_string(ck) + "_" +
                                   std::to_string(rng.next_below(items_per_cluster));
                if (!rated.insert({user, item}).second) continue;
                edges_text += user + "\t" + item + "\trates\n";
                ++placed;
            }
        }
        for (int i = 0; i < items_per_cluster; ++i) {
            std::string item = "r" + std::to_string(k) + "_" + std::to_string(i);
            int c1 = static_cast<int>(rng.next_below(cats_per_cluster));
            int c2 = static_cast<int>(rng.next_below(cats_per_cluster));
            while (c2 == c1) c2 = static_cast<int>(rng.next_below(cats_per_cluster));
            edges_text += item + "\tc" + std::to_string(k) + "_" + std::to_string(c1) +
                          "\thas_cat\n";
            edges_text += item + "\tc" + std::to_string(k) + "_" + std::to_string(c2) +
                          "\thas_cat\n";
        }
    }

    LinkFixture fx;
    fx.edges = dir.file("link_edges.tsv");
    fx.nodes = dir.file("link_nodes.tsv");
    fx.motif = dir.file("corate.motif");
    write_file(fx.edges, edges_text);
    write_file(fx.nodes, nodes_text);
    write_file(fx.motif, "name: corate\nnodes: 1:U 2:R 3:U\nedges: 1->2 3->2\n");
    return fx;
}

// Large random typed graph for the throughput check: A->B and B->C layers.
struct ThroughputFixture {
    std::string edges, nodes, motif;
};

inline ThroughputFixture write_throughput_fixture(const TempDir& dir, uint64_t seed,
                                                  int n_a = 4000, int n_b = 4000,
                                                  int n_c = 2000, int e_ab = 20000,
                                                  int e_bc = 20000) {
    m2v::Rng rng(m2v::mix64(seed, 0x54505554ULL));
    std::string nodes_text, edges_text;
    for (int i = 0; i < n_a; ++i) nodes_text += "A" + std::to_string(i) + "\tA\n";
    for (int i = 0; i < n_b; ++i) nodes_text += "B" + std::to_string(i) + "\tB\n";
    for (int i = 0; i < n_c; ++i) nodes_text += "C" + std::to_string(i) + "\tC\n";
    std::set<std::pair<int, int>> seen;
    int added = 0;
    while (added < e_ab) {
        int a = static_cast<int>(rng.next_below(n_a));
        int b = static_cast<int>(rng.next_below(n_b));
        if (!seen.insert({a, b}).second) continue;
        edges_text += "A" + std::to_string(a) + "\tB" + std::to_string(b) + "\tab\n";
        ++added;
    }
    seen.clear();
    added = 0;
    while (added < e_bc) {
        int b = static_cast<int>(rng.next_below(n_b));
        int c = static_cast<int>(rng.next_below(n_c));
        if (!seen.insert({b, c}).second) continue;
        edges_text += "B" + std::to_string(b) + "\tC" + std::to_string(c) + "\tbc\n";
        ++added;
    }

    ThroughputFixture fx;
    fx.edges = dir.file("big_edges.tsv");
    fx.nodes = dir.file("big_nodes.tsv");
    fx.motif = dir.file("path.motif");
    write_file(fx.edges, edges_text);
    write_file(fx.nodes, nodes_text);
    write_file(fx.motif, "name: path\nnodes: 1:A 2:B 3:C\nedges: 1->2 2->3\n");
    return fx;
}

}  // namespace fixtures
