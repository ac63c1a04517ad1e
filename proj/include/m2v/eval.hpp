#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "m2v/graph.hpp"
#include "m2v/rng.hpp"
#include "m2v/trainer.hpp"

namespace m2v {

// Per-run seed of the 5-run evaluation protocol.
inline uint64_t eval_run_seed(uint64_t seed, int run) {
    return mix64(seed, 0x52554e00ULL, static_cast<uint64_t>(run));
}

struct LabeledNodeSet {
    std::vector<std::pair<std::string, std::string>> pairs;  // (node id, class label)
    std::vector<std::string> classes;                        // sorted unique labels

    size_t size() const { return pairs.size(); }
};

LabeledNodeSet make_labels(std::vector<std::pair<std::string, std::string>> pairs);
LabeledNodeSet load_labels(const std::string& path);  // `node_id <TAB> class_label`

// Seeded stratified split; per-class train size is round(ratio * n). Classes
// with a single member stay whole in train (with a warning).
std::pair<LabeledNodeSet, LabeledNodeSet> split_labels(const LabeledNodeSet& labels,
                                                       double ratio, uint64_t seed);

// One-vs-rest linear classifier trained with hinge loss + L2 regularization
// by seeded stochastic subgradient descent (Pegasos schedule), fixed
// hyperparameters, no tuning.
struct LinearModel {
    std::vector<std::string> classes;
    int d = 0;
    std::vector<double> weights;  // classes x d, row-major
    std::vector<double> bias;

    int32_t predict(std::span<const double> x) const;
};

LinearModel train_classifier(const EmbeddingMatrix& X, const LabeledNodeSet& train,
                             double C = 1.0, int passes = 100, uint64_t seed = 1);

double classification_accuracy(const LinearModel& model, const EmbeddingMatrix& X,
                               const LabeledNodeSet& test);

struct LinkEvalSplit {
    std::string edge_type;
    uint64_t seed = 0;
    std::vector<size_t> test_edge_indexes;  // into the original graph's edge list
    std::vector<std::pair<std::string, std::string>> test_edges;
    std::vector<std::pair<std::string, std::string>> fake_edges;  // absent pairs
};

// Removes a seeded (1 - ratio) share of the target-type edges from g and
// samples an equal number of fake links: uniformly drawn absent pairs whose
// endpoint types match an observed (src type, dst type) signature of the
// target edge type.
std::pair<HeteroGraph, LinkEvalSplit> make_link_split(const HeteroGraph& g,
                                                      const std::string& edge_type,
                                                      double ratio, uint64_t seed);

// Additional fake links for threshold selection, disjoint from `exclude`.
std::vector<std::pair<std::string, std::string>> sample_fake_links(
    const HeteroGraph& g, const std::string& edge_type, size_t count, uint64_t seed,
    const std::vector<std::pair<std::string, std::string>>& exclude = {});

// u.v / (|u||v|); zero-norm input scores 0 with a warning.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

// Fraction of correct decisions over test + fake pairs: a pair is predicted
// to link iff cosine similarity > threshold. Pairs with an unembedded
// endpoint score 0 (counted in *missing when given).
double link_prediction_accuracy(const EmbeddingMatrix& X, const LinkEvalSplit& split,
                                double threshold, size_t* missing = nullptr);

// Accuracy-maximizing threshold over a labeled validation set of positive and
// negative pairs (lowest such threshold on ties).
double select_threshold(const EmbeddingMatrix& X,
                        const std::vector<std::pair<std::string, std::string>>& positives,
                        const std::vector<std::pair<std::string, std::string>>& negatives);

struct EvalRun {
    int run = 0;
    uint64_t seed = 0;
    double value = 0.0;
};

struct EvalReport {
    std::string task;
    std::vector<EvalRun> runs;
    double mean = 0.0;
};

// Mean over `runs` seeded splits of a 70:30-style protocol on fixed
// embeddings; per-run values are retained in the report.
EvalReport evaluate_node_classification(const EmbeddingMatrix& X,
                                        const LabeledNodeSet& labels, double ratio,
                                        int runs, uint64_t seed);

// Tab-separated rows `task run seed value mean` (with a header line).
void write_metrics(const EvalReport& report, const std::string& path);
void print_metrics(const EvalReport& report, std::ostream& os);

}  // namespace m2v
