#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

namespace m2v {

enum class Direction { In, Out };

// Walk substrate shared by the original graph and motif graphs: a plain
// weighted adjacency structure over dense node indices. Immutable once built.
struct WeightedGraphView {
    int32_t num_nodes = 0;
    bool symmetric = false;
    std::vector<size_t> offsets;      // num_nodes + 1
    std::vector<int32_t> neighbors;   // sorted within each node's range
    std::vector<double> weights;      // parallel to neighbors, all > 0

    size_t out_degree(int32_t u) const { return offsets[u + 1] - offsets[u]; }
    size_t num_arcs() const { return neighbors.size(); }
    bool has_arc(int32_t u, int32_t v) const;

    // Throws if an invariant is violated (weights > 0, symmetry when flagged).
    void validate() const;
};

// Builds a view from (src, dst, weight) triples. When symmetric is set the
// triples are interpreted as undirected and stored in both directions.
WeightedGraphView make_view(int32_t num_nodes,
                            const std::vector<std::tuple<int32_t, int32_t, double>>& arcs,
                            bool symmetric);

// Directed multi-type graph. External node ids are opaque strings mapped to
// dense indices at load time; everything downstream works on the indices.
class HeteroGraph {
  public:
    struct Edge {
        int32_t src;
        int32_t dst;
        int16_t type;
    };

    // -- node table -----------------------------------------------------
    int32_t num_nodes() const { return static_cast<int32_t>(node_ids_.size()); }
    const std::string& node_id(int32_t u) const { return node_ids_[u]; }
    const std::vector<std::string>& node_ids() const { return node_ids_; }
    int32_t index_of(const std::string& id) const;  // -1 if unknown
    int16_t node_type(int32_t u) const { return node_type_[u]; }
    const std::string& node_type_name(int16_t t) const { return node_type_names_[t]; }
    const std::vector<std::string>& node_type_names() const { return node_type_names_; }
    int16_t node_type_index(const std::string& name) const;  // -1 if unknown

    // -- typed edge set ---------------------------------------------------
    size_t num_edges() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<std::string>& edge_type_names() const { return edge_type_names_; }
    int16_t edge_type_index(const std::string& name) const;

    // -- type-erased arcs (parallel typed edges collapsed) ----------------
    size_t num_arcs() const { return arc_count_; }
    const std::vector<int32_t>& out_neighbors(int32_t u) const { return out_adj_[u]; }
    const std::vector<int32_t>& in_neighbors(int32_t u) const { return in_adj_[u]; }
    bool has_arc(int32_t u, int32_t v) const;  // binary search on out_adj_

    size_t degree(int32_t u, Direction dir) const;
    size_t degree(const std::string& id, Direction dir) const;  // throws on unknown id

    // Adds a node/edge during construction. add_edge returns false on a
    // duplicate (src, dst, type) triple; throws on self loops.
    int32_t add_node(const std::string& id, const std::string& type);
    bool add_edge(int32_t src, int32_t dst, const std::string& type);
    void finalize();  // builds adjacency indexes; call once after all adds

    // Copy of this graph without the given edge indexes (same node table).
    HeteroGraph without_edges(const std::vector<size_t>& edge_indexes) const;

    void write_stats(std::ostream& os) const;  // tab-separated stats rows

  private:
    std::vector<std::string> node_ids_;
    std::unordered_map<std::string, int32_t> id_index_;
    std::vector<int16_t> node_type_;
    std::vector<std::string> node_type_names_;
    std::unordered_map<std::string, int16_t> node_type_index_;
    std::vector<std::string> edge_type_names_;
    std::unordered_map<std::string, int16_t> edge_type_index_;
    std::vector<Edge> edges_;
    std::unordered_map<int64_t, std::vector<int16_t>> edge_keys_;  // (src,dst) -> types
    std::vector<std::vector<int32_t>> out_adj_, in_adj_;           // sorted, deduped
    size_t arc_count_ = 0;
    bool finalized_ = false;
};

struct LoadReport {
    size_t duplicate_edges = 0;  // input lines dropped by (src, dst, type) dedup
    bool homogeneous_nodes = false;
    bool homogeneous_edges = false;
};

// Edge file rows: `src <TAB> dst <TAB> edge_type`. Node file rows:
// `node <TAB> node_type`. One record per line, '#' comments skipped.
HeteroGraph load_graph(const std::string& edge_file, const std::string& node_type_file,
                       LoadReport* report = nullptr);

// Inverse of load_graph; reloading the two files yields an identical graph.
void save_graph(const HeteroGraph& g, const std::string& edge_file,
                const std::string& node_type_file);

// Type-blind directed view of g: every arc with weight 1.
WeightedGraphView as_walk_view(const HeteroGraph& g);

}  // namespace m2v
