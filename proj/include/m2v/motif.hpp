#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "m2v/graph.hpp"

namespace m2v {

// Small directed typed pattern graph defining an induced-subgraph query.
// Slots are stored in declaration order; a type of "*" matches any node type.
struct MotifPattern {
    std::string name = "motif";
    std::vector<int> slot_labels;          // labels as written in the spec text
    std::vector<std::string> slot_types;   // parallel to slot_labels, "*" = wildcard
    std::vector<std::pair<int, int>> edges;  // (src_slot, dst_slot), 0-based slots

    int k() const { return static_cast<int>(slot_types.size()); }
    bool has_edge(int src_slot, int dst_slot) const;
    size_t out_degree(int slot) const;
    size_t in_degree(int slot) const;
};

// Parses the motif DSL: a `name:` line (optional), a `nodes:` line of
// `slot:TYPE` tokens and an `edges:` line of `src->dst` tokens. Newlines and
// ';' both separate sections. Throws std::runtime_error on invalid patterns
// (k outside [2,5], disconnected, duplicate edges, self loops, bad tokens,
// or a type missing from `registry` when one is supplied).
MotifPattern parse_motif_spec(const std::string& text,
                              const std::vector<std::string>* registry = nullptr);

MotifPattern load_motif_spec(const std::string& path,
                             const std::vector<std::string>* registry = nullptr);

// One injective, type-consistent, induced occurrence of a pattern.
struct MotifInstance {
    std::vector<int32_t> assignment;  // slot -> node index
    std::vector<int32_t> node_set;    // assignment sorted ascending
};

// Deduplicated instances: assignments over the same node set count once.
// Instances are ordered by their canonical key (sorted external node ids).
struct InstanceSet {
    std::string pattern_name;
    int k = 0;
    std::vector<MotifInstance> instances;
};

inline size_t motif_frequency(const InstanceSet& inst) { return inst.instances.size(); }

// Backtracking search over slot assignments with degree/type candidate
// filtering and an incremental induced check against every placed slot.
// The search is partitioned over root-slot candidates when workers > 1;
// results are identical for any worker count.
InstanceSet enumerate_instances(const HeteroGraph& g, const MotifPattern& m,
                                int workers = 1);

enum class AdjacencyMode { Weighted, Binary };

// Symmetric motif co-occurrence matrix over dense node indices: entry (i, j)
// counts deduplicated instances containing both i and j (weighted mode) or
// flags their existence (binary mode). Zero diagonal by construction.
struct MotifAdjacency {
    std::string pattern_name;
    AdjacencyMode mode = AdjacencyMode::Weighted;
    int32_t num_nodes = 0;
    std::vector<std::vector<std::pair<int32_t, int64_t>>> rows;  // sorted by neighbor
    size_t nonzero_pairs = 0;   // unordered pairs with positive weight
    size_t isolated_nodes = 0;  // nodes participating in no instance

    int64_t weight(int32_t i, int32_t j) const;
    WeightedGraphView as_view() const;  // undirected walk substrate
};

MotifAdjacency build_motif_adjacency(const HeteroGraph& g, const MotifPattern& m,
                                     const InstanceSet& inst, AdjacencyMode mode);

// Instance list: one instance per line, node ids sorted, tab-separated.
void export_instances(const InstanceSet& inst, const HeteroGraph& g,
                      const std::string& path);

// Adjacency export: `node_id_i <TAB> node_id_j <TAB> weight` with i < j under
// external string ids, lines sorted.
void export_motif_adjacency(const MotifAdjacency& adj, const HeteroGraph& g,
                            const std::string& path);

// Reads an adjacency export back as a symmetric walk view over g's indices.
WeightedGraphView load_adjacency_view(const std::string& path, const HeteroGraph& g);

}  // namespace m2v
