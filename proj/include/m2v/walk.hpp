#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "m2v/alias.hpp"
#include "m2v/graph.hpp"
#include "m2v/rng.hpp"

namespace m2v {

struct WalkConfig {
    int r = 10;      // walks per node
    int l = 80;      // walk length in nodes
    double p = 1.0;  // return parameter
    double q = 1.0;  // in-out parameter
    uint64_t seed = 1;
    size_t alias_budget = 20'000'000;  // max precomputed second-order entries
    int workers = 1;

    void validate() const;  // r >= 1, l >= 2, p > 0, q > 0
};

struct WalkCorpus {
    std::vector<std::vector<int32_t>> sequences;
    std::vector<int32_t> sources;  // per-walk source view tag; dropped by shuffle

    size_t size() const { return sequences.size(); }
};

// Transition kernel of the (p, q)-biased second-order walk over one view.
// From previous node t at current node v, neighbor x is drawn proportionally
// to alpha(t, x) * w(v, x) with alpha = 1/p if x == t, 1 if t has an arc to x,
// 1/q otherwise; the first step is plain weight-proportional. Precomputes
// per-arc alias tables when their total size fits alias_budget, otherwise
// samples on the fly from the cumulative distribution.
class WalkSampler {
  public:
    WalkSampler(const WeightedGraphView& view, double p, double q, size_t alias_budget);

    int32_t first_step(int32_t cur, Rng& rng) const;                // -1 at dead ends
    int32_t next_step(int32_t prev, int32_t cur, Rng& rng) const;   // -1 at dead ends
    bool using_alias_tables() const { return second_order_ready_; }

  private:
    int32_t sample_on_the_fly(int32_t prev, int32_t cur, Rng& rng) const;

    const WeightedGraphView& view_;
    double p_, q_;
    std::vector<AliasTable> first_order_;   // per node, over out-arcs
    std::vector<AliasTable> second_order_;  // per arc (t -> v), over v's out-arcs
    bool uniform_bias_ = false;             // p == q == 1: second order degenerates
    bool second_order_ready_ = false;
};

// r walks from every node of the view; walk w of node u draws from a
// generator seeded by (cfg.seed, u, w), so output does not depend on the
// worker count. Dead ends truncate; isolated start nodes yield singletons.
WalkCorpus generate_walks(const WeightedGraphView& view, const WalkConfig& cfg,
                          int32_t source_tag = 0);

// Multiset union of the inputs in a seeded uniform random order. Provenance
// tags are dropped from the result.
WalkCorpus aggregate_and_shuffle(std::vector<WalkCorpus> corpora, uint64_t seed);

// One walk per line, space-separated external node ids.
void save_corpus(const WalkCorpus& corpus, const std::vector<std::string>& names,
                 const std::string& path);

struct LoadedCorpus {
    WalkCorpus corpus;
    std::vector<std::string> names;  // token id (first appearance order) -> name
};
LoadedCorpus load_corpus(const std::string& path);

}  // namespace m2v
