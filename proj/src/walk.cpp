#include "m2v/walk.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace m2v {

namespace {
constexpr uint64_t kWalkTag = 0x57414c4bULL;  // per-walk generator domain
}

void WalkConfig::validate() const {
    if (r < 1) throw std::runtime_error("walk config: r must be >= 1");
    if (l < 2) throw std::runtime_error("walk config: l must be >= 2");
    if (p <= 0.0) throw std::runtime_error("walk config: p must be > 0");
    if (q <= 0.0) throw std::runtime_error("walk config: q must be > 0");
}

WalkSampler::WalkSampler(const WeightedGraphView& view, double p, double q,
                         size_t alias_budget)
    : view_(view), p_(p), q_(q) {
    first_order_.resize(view.num_nodes);
    for (int32_t u = 0; u < view.num_nodes; ++u) {
        size_t deg = view.out_degree(u);
        if (deg == 0) continue;
        first_order_[u].build(
            std::span<const double>(view.weights.data() + view.offsets[u], deg));
    }

    uniform_bias_ = (p == 1.0 && q == 1.0);
    if (uniform_bias_) return;

    size_t total_entries = 0;
    for (size_t a = 0; a < view.neighbors.size(); ++a)
        total_entries += view.out_degree(view.neighbors[a]);
    if (total_entries > alias_budget) return;

    second_order_.resize(view.neighbors.size());
    std::vector<double> scores;
    for (int32_t t = 0; t < view.num_nodes; ++t) {
        for (size_t a = view.offsets[t]; a < view.offsets[t + 1]; ++a) {
            int32_t v = view.neighbors[a];
            size_t deg = view.out_degree(v);
            if (deg == 0) continue;
            scores.resize(deg);
            for (size_t i = 0; i < deg; ++i) {
                int32_t x = view.neighbors[view.offsets[v] + i];
                double alpha = x == t ? 1.0 / p_ : (view_.has_arc(t, x) ? 1.0 : 1.0 / q_);
                scores[i] = view.weights[view.offsets[v] + i] * alpha;
            }
            second_order_[a].build(scores);
        }
    }
    second_order_ready_ = true;
}

int32_t WalkSampler::first_step(int32_t cur, Rng& rng) const {
    if (view_.out_degree(cur) == 0) return -1;
    return view_.neighbors[view_.offsets[cur] + first_order_[cur].sample(rng)];
}

int32_t WalkSampler::sample_on_the_fly(int32_t prev, int32_t cur, Rng& rng) const {
    size_t deg = view_.out_degree(cur);
    thread_local std::vector<double> cumulative;
    cumulative.resize(deg);
    double total = 0.0;
    for (size_t i = 0; i < deg; ++i) {
        int32_t x = view_.neighbors[view_.offsets[cur] + i];
        double alpha = x == prev ? 1.0 / p_ : (view_.has_arc(prev, x) ? 1.0 : 1.0 / q_);
        total += view_.weights[view_.offsets[cur] + i] * alpha;
        cumulative[i] = total;
    }
    double target = rng.next_double() * total;
    size_t pick = std::lower_bound(cumulative.begin(), cumulative.end(), target) -
                  cumulative.begin();
    if (pick >= deg) pick = deg - 1;
    return view_.neighbors[view_.offsets[cur] + pick];
}

int32_t WalkSampler::next_step(int32_t prev, int32_t cur, Rng& rng) const {
    if (view_.out_degree(cur) == 0) return -1;
    if (uniform_bias_)
        return view_.neighbors[view_.offsets[cur] + first_order_[cur].sample(rng)];
    if (second_order_ready_) {
        auto begin = view_.neighbors.begin() + view_.offsets[prev];
        auto end = view_.neighbors.begin() + view_.offsets[prev + 1];
        size_t arc = std::lower_bound(begin, end, cur) - view_.neighbors.begin();
        return view_.neighbors[view_.offsets[cur] + second_order_[arc].sample(rng)];
    }
    return sample_on_the_fly(prev, cur, rng);
}

WalkCorpus generate_walks(const WeightedGraphView& view, const WalkConfig& cfg,
                          int32_t source_tag) {
    cfg.validate();
    WalkSampler sampler(view, cfg.p, cfg.q, cfg.alias_budget);

    size_t total = static_cast<size_t>(view.num_nodes) * cfg.r;
    WalkCorpus corpus;
    corpus.sequences.resize(total);
    corpus.sources.assign(total, source_tag);

    auto walk_slot = [&](size_t slot) {
        int32_t u = static_cast<int32_t>(slot / cfg.r);
        int32_t w = static_cast<int32_t>(slot % cfg.r);
        Rng rng(mix64(mix64(cfg.seed, kWalkTag), static_cast<uint64_t>(u),
                      static_cast<uint64_t>(w)));
        std::vector<int32_t>& seq = corpus.sequences[slot];
        seq.reserve(cfg.l);
        seq.push_back(u);
        int32_t step = sampler.first_step(u, rng);
        if (step < 0) return;
        seq.push_back(step);
        int32_t prev = u, cur = step;
        while (seq.size() < static_cast<size_t>(cfg.l)) {
            int32_t nxt = sampler.next_step(prev, cur, rng);
            if (nxt < 0) break;
            seq.push_back(nxt);
            prev = cur;
            cur = nxt;
        }
    };

    int n_workers = std::max(1, cfg.workers);
    if (n_workers == 1 || total < 2) {
        for (size_t slot = 0; slot < total; ++slot) walk_slot(slot);
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < n_workers; ++w) {
            threads.emplace_back([&, w]() {
                for (size_t slot = w; slot < total; slot += n_workers) walk_slot(slot);
            });
        }
        for (auto& t : threads) t.join();
    }
    return corpus;
}

WalkCorpus aggregate_and_shuffle(std::vector<WalkCorpus> corpora, uint64_t seed) {
    if (corpora.empty())
        throw std::runtime_error("aggregate_and_shuffle: no corpora given");
    WalkCorpus merged;
    for (WalkCorpus& c : corpora) {
        for (auto& seq : c.sequences) merged.sequences.push_back(std::move(seq));
    }
    std::vector<size_t> perm(merged.sequences.size());
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    Rng rng(mix64(seed, 0x53485546ULL));
    rng.shuffle(perm);
    std::vector<std::vector<int32_t>> shuffled(merged.sequences.size());
    for (size_t i = 0; i < perm.size(); ++i)
        shuffled[i] = std::move(merged.sequences[perm[i]]);
    merged.sequences = std::move(shuffled);
    merged.sources.clear();  // provenance ends at the shuffle
    return merged;
}

void save_corpus(const WalkCorpus& corpus, const std::vector<std::string>& names,
                 const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write corpus '" + path + "'");
    for (const auto& seq : corpus.sequences) {
        for (size_t i = 0; i < seq.size(); ++i) {
            if (i) out << ' ';
            out << names[seq[i]];
        }
        out << '\n';
    }
}

LoadedCorpus load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus '" + path + "'");
    LoadedCorpus loaded;
    std::unordered_map<std::string, int32_t> id_of;
    std::string line, token;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream iss(line);
        std::vector<int32_t> seq;
        while (iss >> token) {
            auto [it, inserted] =
                id_of.try_emplace(token, static_cast<int32_t>(loaded.names.size()));
            if (inserted) loaded.names.push_back(token);
            seq.push_back(it->second);
        }
        if (!seq.empty()) loaded.corpus.sequences.push_back(std::move(seq));
    }
    return loaded;
}

}  // namespace m2v
