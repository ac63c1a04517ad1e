#include "m2v/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "m2v/rng.hpp"

namespace m2v {

namespace {
constexpr uint64_t kSplitTag = 0x53504c54ULL;
constexpr uint64_t kFakeTag = 0x46414b45ULL;

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}
}  // namespace

LabeledNodeSet make_labels(std::vector<std::pair<std::string, std::string>> pairs) {
    LabeledNodeSet labels;
    labels.pairs = std::move(pairs);
    std::set<std::string> seen_nodes;
    std::set<std::string> classes;
    for (const auto& [node, cls] : labels.pairs) {
        if (!seen_nodes.insert(node).second)
            throw std::runtime_error("node '" + node + "' labeled more than once");
        classes.insert(cls);
    }
    labels.classes.assign(classes.begin(), classes.end());
    return labels;
}

LabeledNodeSet load_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open label file '" + path + "'");
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream iss(line);
        std::string node, cls;
        if (!(iss >> node >> cls))
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected `node_id <TAB> class_label`");
        pairs.emplace_back(node, cls);
    }
    return make_labels(std::move(pairs));
}

std::pair<LabeledNodeSet, LabeledNodeSet> split_labels(const LabeledNodeSet& labels,
                                                       double ratio, uint64_t seed) {
    if (ratio <= 0.0 || ratio >= 1.0)
        throw std::runtime_error("split ratio must lie in (0, 1)");
    Rng rng(mix64(seed, kSplitTag));
    std::vector<std::pair<std::string, std::string>> train, test;
    for (const std::string& cls : labels.classes) {
        std::vector<size_t> members;
        for (size_t i = 0; i < labels.pairs.size(); ++i)
            if (labels.pairs[i].second == cls) members.push_back(i);
        if (members.size() < 2) {
            std::cerr << "warning: class '" << cls
                      << "' has fewer than 2 members; kept whole in train\n";
            for (size_t i : members) train.push_back(labels.pairs[i]);
            continue;
        }
        rng.shuffle(members);
        size_t n_train = static_cast<size_t>(
            std::lround(ratio * static_cast<double>(members.size())));
        n_train = std::clamp<size_t>(n_train, 1, members.size() - 1);
        for (size_t i = 0; i < members.size(); ++i)
            (i < n_train ? train : test).push_back(labels.pairs[members[i]]);
    }
    return {make_labels(std::move(train)), make_labels(std::move(test))};
}

int32_t LinearModel::predict(std::span<const double> x) const {
    int32_t best = 0;
    double best_score = 0.0;
    for (size_t k = 0; k < classes.size(); ++k) {
        double score = bias[k];
        const double* w = weights.data() + k * d;
        for (int i = 0; i < d; ++i) score += w[i] * x[i];
        if (k == 0 || score > best_score) {
            best = static_cast<int32_t>(k);
            best_score = score;
        }
    }
    return best;
}

namespace {

// Gathers the embedding rows for every labeled node; throws listing the
// nodes that have no embedding.
std::vector<int32_t> embedding_rows(const EmbeddingMatrix& X, const LabeledNodeSet& set) {
    std::vector<int32_t> rows;
    std::string missing;
    for (const auto& [node, cls] : set.pairs) {
        int32_t r = X.row_index(node);
        if (r < 0) {
            if (!missing.empty()) missing += ", ";
            missing += node;
        }
        rows.push_back(r);
    }
    if (!missing.empty())
        throw std::runtime_error("labeled nodes missing from the embedding: " + missing);
    return rows;
}

}  // namespace

LinearModel train_classifier(const EmbeddingMatrix& X, const LabeledNodeSet& train,
                             double C, int passes, uint64_t seed) {
    if (train.classes.size() < 2)
        throw std::runtime_error("classifier needs at least 2 classes, got " +
                                 std::to_string(train.classes.size()));
    std::vector<int32_t> rows = embedding_rows(X, train);

    size_t n = train.pairs.size();
    size_t n_classes = train.classes.size();
    std::vector<int32_t> class_of(n);
    for (size_t i = 0; i < n; ++i) {
        auto it = std::lower_bound(train.classes.begin(), train.classes.end(),
                                   train.pairs[i].second);
        class_of[i] = static_cast<int32_t>(it - train.classes.begin());
    }

    LinearModel model;
    model.classes = train.classes;
    model.d = X.d;
    model.weights.assign(n_classes * X.d, 0.0);
    model.bias.assign(n_classes, 0.0);

    const double lambda = 1.0 / (C * static_cast<double>(n));
    Rng rng(mix64(seed, 0x53564d00ULL));
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;

    int64_t t = 0;
    for (int pass = 0; pass < passes; ++pass) {
        rng.shuffle(order);
        for (size_t idx : order) {
            ++t;
            double eta = 1.0 / (lambda * static_cast<double>(t));
            std::span<const double> x = X.row(rows[idx]);
            double shrink = 1.0 - 1.0 / static_cast<double>(t);  // 1 - eta*lambda
            for (size_t k = 0; k < n_classes; ++k) {
                double y = class_of[idx] == static_cast<int32_t>(k) ? 1.0 : -1.0;
                double* w = model.weights.data() + k * X.d;
                double margin = model.bias[k];
                for (int i = 0; i < X.d; ++i) margin += w[i] * x[i];
                margin *= y;
                for (int i = 0; i < X.d; ++i) w[i] *= shrink;
                if (margin < 1.0) {
                    double step = eta * y;
                    for (int i = 0; i < X.d; ++i) w[i] += step * x[i];
                    model.bias[k] += step;
                }
            }
        }
    }
    return model;
}

double classification_accuracy(const LinearModel& model, const EmbeddingMatrix& X,
                               const LabeledNodeSet& test) {
    if (test.pairs.empty()) throw std::runtime_error("empty test set");
    std::vector<int32_t> rows = embedding_rows(X, test);
    size_t correct = 0;
    for (size_t i = 0; i < test.pairs.size(); ++i) {
        int32_t pred = model.predict(X.row(rows[i]));
        if (model.classes[pred] == test.pairs[i].second) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test.pairs.size());
}

namespace {

struct FakeSampler {
    const HeteroGraph& g;
    // Signatures observed for the target edge type, weighted by edge count.
    std::vector<std::pair<int16_t, int16_t>> signatures;
    std::vector<double> signature_cumulative;
    std::vector<std::vector<int32_t>> nodes_by_type;

    FakeSampler(const HeteroGraph& graph, const std::vector<size_t>& typed_edges)
        : g(graph) {
        std::map<std::pair<int16_t, int16_t>, size_t> counts;
        for (size_t e : typed_edges) {
            const auto& edge = g.edges()[e];
            counts[{g.node_type(edge.src), g.node_type(edge.dst)}]++;
        }
        double total = 0.0;
        for (const auto& [sig, count] : counts) {
            signatures.push_back(sig);
            total += static_cast<double>(count);
            signature_cumulative.push_back(total);
        }
        nodes_by_type.resize(g.node_type_names().size());
        for (int32_t u = 0; u < g.num_nodes(); ++u)
            nodes_by_type[g.node_type(u)].push_back(u);
    }

    // Draws one absent, type-consistent pair; returns false when the attempt
    // collides with an existing arc or a previously drawn fake.
    bool try_draw(Rng& rng, std::set<std::pair<int32_t, int32_t>>& used,
                  std::pair<int32_t, int32_t>& out) const {
        double pick = rng.next_double() * signature_cumulative.back();
        size_t s = std::lower_bound(signature_cumulative.begin(),
                                    signature_cumulative.end(), pick) -
                   signature_cumulative.begin();
        if (s >= signatures.size()) s = signatures.size() - 1;
        const auto& srcs = nodes_by_type[signatures[s].first];
        const auto& dsts = nodes_by_type[signatures[s].second];
        int32_t src = srcs[rng.next_below(srcs.size())];
        int32_t dst = dsts[rng.next_below(dsts.size())];
        if (src == dst || g.has_arc(src, dst)) return false;
        if (!used.insert({src, dst}).second) return false;
        out = {src, dst};
        return true;
    }
};

}  // namespace

std::pair<HeteroGraph, LinkEvalSplit> make_link_split(const HeteroGraph& g,
                                                      const std::string& edge_type,
                                                      double ratio, uint64_t seed) {
    if (ratio <= 0.0 || ratio >= 1.0)
        throw std::runtime_error("split ratio must lie in (0, 1)");
    int16_t type = g.edge_type_index(edge_type);
    if (type < 0) throw std::runtime_error("unknown edge type '" + edge_type + "'");
    std::vector<size_t> typed_edges;
    for (size_t e = 0; e < g.num_edges(); ++e)
        if (g.edges()[e].type == type) typed_edges.push_back(e);
    if (typed_edges.size() < 2)
        throw std::runtime_error("edge type '" + edge_type + "' has too few edges to split");

    Rng rng(mix64(seed, kSplitTag));
    rng.shuffle(typed_edges);
    size_t n_keep = static_cast<size_t>(
        std::lround(ratio * static_cast<double>(typed_edges.size())));
    n_keep = std::clamp<size_t>(n_keep, 1, typed_edges.size() - 1);

    LinkEvalSplit split;
    split.edge_type = edge_type;
    split.seed = seed;
    split.test_edge_indexes.assign(typed_edges.begin() + n_keep, typed_edges.end());
    std::sort(split.test_edge_indexes.begin(), split.test_edge_indexes.end());
    for (size_t e : split.test_edge_indexes) {
        const auto& edge = g.edges()[e];
        split.test_edges.emplace_back(g.node_id(edge.src), g.node_id(edge.dst));
    }

    FakeSampler sampler(g, typed_edges);
    Rng fake_rng(mix64(seed, kFakeTag));
    std::set<std::pair<int32_t, int32_t>> used;
    size_t need = split.test_edges.size();
    size_t attempts_left = std::max<size_t>(1000, 200 * need);
    while (split.fake_edges.size() < need) {
        if (attempts_left-- == 0)
            throw std::runtime_error(
                "could not sample enough fake links for edge type '" + edge_type +
                "' (graph too dense for the requested split)");
        std::pair<int32_t, int32_t> fake;
        if (sampler.try_draw(fake_rng, used, fake))
            split.fake_edges.emplace_back(g.node_id(fake.first), g.node_id(fake.second));
    }

    return {g.without_edges(split.test_edge_indexes), std::move(split)};
}

std::vector<std::pair<std::string, std::string>> sample_fake_links(
    const HeteroGraph& g, const std::string& edge_type, size_t count, uint64_t seed,
    const std::vector<std::pair<std::string, std::string>>& exclude) {
    int16_t type = g.edge_type_index(edge_type);
    if (type < 0) throw std::runtime_error("unknown edge type '" + edge_type + "'");
    std::vector<size_t> typed_edges;
    for (size_t e = 0; e < g.num_edges(); ++e)
        if (g.edges()[e].type == type) typed_edges.push_back(e);

    FakeSampler sampler(g, typed_edges);
    std::set<std::pair<int32_t, int32_t>> used;
    for (const auto& [a, b] : exclude) {
        int32_t u = g.index_of(a), v = g.index_of(b);
        if (u >= 0 && v >= 0) used.insert({u, v});
    }
    Rng rng(mix64(seed, kFakeTag));
    std::vector<std::pair<std::string, std::string>> fakes;
    size_t attempts_left = std::max<size_t>(1000, 200 * count);
    while (fakes.size() < count) {
        if (attempts_left-- == 0)
            throw std::runtime_error("could not sample enough fake links");
        std::pair<int32_t, int32_t> fake;
        if (sampler.try_draw(rng, used, fake))
            fakes.emplace_back(g.node_id(fake.first), g.node_id(fake.second));
    }
    return fakes;
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) {
        std::cerr << "warning: cosine of a zero vector, scoring 0\n";
        return 0.0;
    }
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

namespace {

double pair_similarity(const EmbeddingMatrix& X, const std::string& a,
                       const std::string& b, size_t* missing) {
    int32_t ra = X.row_index(a), rb = X.row_index(b);
    if (ra < 0 || rb < 0) {
        if (missing) ++*missing;
        return 0.0;
    }
    return cosine_similarity(X.row(ra), X.row(rb));
}

}  // namespace

double link_prediction_accuracy(const EmbeddingMatrix& X, const LinkEvalSplit& split,
                                double threshold, size_t* missing) {
    size_t total = split.test_edges.size() + split.fake_edges.size();
    if (total == 0) throw std::runtime_error("empty link evaluation split");
    size_t local_missing = 0;
    size_t correct = 0;
    for (const auto& [a, b] : split.test_edges)
        if (pair_similarity(X, a, b, &local_missing) > threshold) ++correct;
    for (const auto& [a, b] : split.fake_edges)
        if (!(pair_similarity(X, a, b, &local_missing) > threshold)) ++correct;
    if (local_missing > 0)
        std::cerr << "warning: " << local_missing
                  << " evaluation pair(s) with an unembedded endpoint scored 0\n";
    if (missing) *missing = local_missing;
    return static_cast<double>(correct) / static_cast<double>(total);
}

double select_threshold(const EmbeddingMatrix& X,
                        const std::vector<std::pair<std::string, std::string>>& positives,
                        const std::vector<std::pair<std::string, std::string>>& negatives) {
    if (positives.empty() || negatives.empty())
        throw std::runtime_error("threshold selection needs positives and negatives");
    std::vector<std::pair<double, int>> scored;  // (similarity, label)
    for (const auto& [a, b] : positives)
        scored.emplace_back(pair_similarity(X, a, b, nullptr), 1);
    for (const auto& [a, b] : negatives)
        scored.emplace_back(pair_similarity(X, a, b, nullptr), 0);
    std::sort(scored.begin(), scored.end());

    std::vector<double> candidates{-1.0};
    for (size_t i = 0; i + 1 < scored.size(); ++i)
        candidates.push_back(0.5 * (scored[i].first + scored[i + 1].first));
    candidates.push_back(1.0);

    double best_threshold = candidates.front();
    size_t best_correct = 0;
    for (double th : candidates) {
        size_t correct = 0;
        for (const auto& [score, label] : scored) {
            bool predicted = score > th;
            if (predicted == (label == 1)) ++correct;
        }
        if (correct > best_correct) {
            best_correct = correct;
            best_threshold = th;
        }
    }
    return best_threshold;
}

EvalReport evaluate_node_classification(const EmbeddingMatrix& X,
                                        const LabeledNodeSet& labels, double ratio,
                                        int runs, uint64_t seed) {
    EvalReport report;
    report.task = "node-classification";
    for (int run = 0; run < runs; ++run) {
        uint64_t run_seed = eval_run_seed(seed, run);
        auto [train, test] = split_labels(labels, ratio, run_seed);
        LinearModel model = train_classifier(X, train, 1.0, 100, run_seed);
        double acc = classification_accuracy(model, X, test);
        report.runs.push_back({run + 1, run_seed, acc});
        report.mean += acc;
    }
    if (!report.runs.empty()) report.mean /= static_cast<double>(report.runs.size());
    return report;
}

void write_metrics(const EvalReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write metrics '" + path + "'");
    out << "task\trun\tseed\tvalue\tmean\n";
    for (const EvalRun& r : report.runs)
        out << report.task << "\t" << r.run << "\t" << r.seed << "\t"
            << format_value(r.value) << "\t" << format_value(report.mean) << "\n";
}

void print_metrics(const EvalReport& report, std::ostream& os) {
    for (const EvalRun& r : report.runs)
        os << report.task << " run " << r.run << " (seed " << r.seed
           << "): " << format_value(r.value) << "\n";
    os << report.task << " mean over " << report.runs.size()
       << " runs: " << format_value(report.mean) << "\n";
}

}  // namespace m2v
