#pragma once

// Test-side oracles. These recompute expected results from the raw node and
// edge tables by exhaustive search, independently of the library's search
// and tally code paths.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "m2v/graph.hpp"
#include "m2v/motif.hpp"

namespace oracle {

struct RawGraph {
    int n = 0;
    std::vector<std::string> types;              // node index -> type name
    std::set<std::pair<int32_t, int32_t>> arcs;  // type-erased arc set
};

inline RawGraph raw_graph(const m2v::HeteroGraph& g) {
    RawGraph raw;
    raw.n = g.num_nodes();
    for (int32_t u = 0; u < g.num_nodes(); ++u)
        raw.types.push_back(g.node_type_name(g.node_type(u)));
    for (const auto& e : g.edges()) raw.arcs.insert({e.src, e.dst});
    return raw;
}

// Checks one injective assignment for type consistency and the induced
// condition: an arc exists between assigned nodes exactly when the
// corresponding pattern edge exists.
inline bool assignment_valid(const RawGraph& g, const m2v::MotifPattern& m,
                             const std::vector<int32_t>& assignment) {
    int k = m.k();
    for (int s = 0; s < k; ++s) {
        if (m.slot_types[s] != "*" && g.types[assignment[s]] != m.slot_types[s])
            return false;
        for (int t = 0; t < k; ++t) {
            if (s == t) continue;
            bool arc = g.arcs.count({assignment[s], assignment[t]}) > 0;
            if (arc != m.has_edge(s, t)) return false;
        }
    }
    return true;
}

// Every injective slot assignment, deduplicated by node set.
inline std::set<std::vector<int32_t>> instances(const RawGraph& g,
                                                const m2v::MotifPattern& m) {
    std::set<std::vector<int32_t>> found;
    int k = m.k();
    std::vector<int32_t> assignment(k, -1);
    std::vector<bool> used(g.n, false);

    auto recurse = [&](auto&& self, int slot) -> void {
        if (slot == k) {
            if (assignment_valid(g, m, assignment)) {
                std::vector<int32_t> key = assignment;
                std::sort(key.begin(), key.end());
                found.insert(key);
            }
            return;
        }
        for (int32_t u = 0; u < g.n; ++u) {
            if (used[u]) continue;
            used[u] = true;
            assignment[slot] = u;
            self(self, slot + 1);
            used[u] = false;
        }
    };
    recurse(recurse, 0);
    return found;
}

// Pair-count tally over an instance list, the Eq.-style adjacency recomputed
// without the library's builder.
inline std::map<std::pair<int32_t, int32_t>, int64_t> pair_tally(
    const std::set<std::vector<int32_t>>& instance_sets) {
    std::map<std::pair<int32_t, int32_t>, int64_t> tally;
    for (const auto& nodes : instance_sets) {
        for (size_t i = 0; i < nodes.size(); ++i)
            for (size_t j = i + 1; j < nodes.size(); ++j)
                tally[{nodes[i], nodes[j]}] += 1;
    }
    return tally;
}

}  // namespace oracle
