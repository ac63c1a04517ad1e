#include "m2v/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "m2v/alias.hpp"

namespace m2v {

namespace {

constexpr double kClamp = 30.0;
constexpr uint64_t kInitTag = 0x494e4954ULL;
constexpr uint64_t kSgdTag = 0x53474400ULL;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double clamped_dot(const double* a, const double* b, int d) {
    double dot = 0.0;
    for (int i = 0; i < d; ++i) dot += a[i] * b[i];
    return std::clamp(dot, -kClamp, kClamp);
}

}  // namespace

void TrainConfig::validate() const {
    if (d < 1) throw std::runtime_error("train config: d must be >= 1");
    if (c < 1) throw std::runtime_error("train config: c must be >= 1");
    if (negatives < 1) throw std::runtime_error("train config: negatives must be >= 1");
    if (lr_initial <= 0.0) throw std::runtime_error("train config: lr must be > 0");
    if (epochs < 1) throw std::runtime_error("train config: epochs must be >= 1");
    if (min_count < 0) throw std::runtime_error("train config: min_count must be >= 0");
}

Vocab build_vocab(const WalkCorpus& corpus, const std::vector<std::string>& token_names,
                  int min_count) {
    if (corpus.sequences.empty()) throw std::runtime_error("vocabulary: empty corpus");
    std::vector<int64_t> counts(token_names.size(), 0);
    int64_t total = 0;
    for (const auto& seq : corpus.sequences) {
        for (int32_t t : seq) counts[t]++;
        total += static_cast<int64_t>(seq.size());
    }

    std::vector<int32_t> kept;
    for (size_t t = 0; t < counts.size(); ++t)
        if (counts[t] >= min_count && counts[t] > 0) kept.push_back(static_cast<int32_t>(t));
    if (kept.empty())
        throw std::runtime_error("vocabulary is empty after the min_count filter");

    std::sort(kept.begin(), kept.end(), [&](int32_t a, int32_t b) {
        if (counts[a] != counts[b]) return counts[a] > counts[b];
        return token_names[a] < token_names[b];
    });

    Vocab vocab;
    vocab.total_tokens = total;
    double norm = 0.0;
    for (int32_t t : kept) {
        vocab.row_of.emplace(token_names[t], static_cast<int32_t>(vocab.names.size()));
        vocab.names.push_back(token_names[t]);
        vocab.counts.push_back(counts[t]);
        double u = std::pow(static_cast<double>(counts[t]), 0.75);
        vocab.unigram.push_back(u);
        norm += u;
    }
    for (double& u : vocab.unigram) u /= norm;
    return vocab;
}

int32_t EmbeddingMatrix::row_index(const std::string& name) const {
    auto it = row_of.find(name);
    return it == row_of.end() ? -1 : it->second;
}

EmbeddingMatrix init_embeddings(const Vocab& vocab, int d, uint64_t seed) {
    EmbeddingMatrix X;
    X.d = d;
    X.names = vocab.names;
    X.row_of = vocab.row_of;
    X.input.resize(vocab.size() * static_cast<size_t>(d));
    X.output.assign(vocab.size() * static_cast<size_t>(d), 0.0);
    Rng rng(mix64(seed, kInitTag));
    for (double& x : X.input) x = (rng.next_double() - 0.5) / d;
    return X;
}

PairGrad sgns_pair_loss_and_grad(std::span<const double> zu, std::span<const double> zv,
                                 const std::vector<std::vector<double>>& negatives) {
    int d = static_cast<int>(zu.size());
    PairGrad g;
    g.grad_center.assign(d, 0.0);
    g.grad_context.assign(d, 0.0);

    double s = sigmoid(clamped_dot(zu.data(), zv.data(), d));
    g.loss = -std::log(s);
    double factor = s - 1.0;
    for (int i = 0; i < d; ++i) {
        g.grad_center[i] += factor * zv[i];
        g.grad_context[i] = factor * zu[i];
    }
    for (const auto& zn : negatives) {
        double sn = sigmoid(clamped_dot(zu.data(), zn.data(), d));
        g.loss += -std::log(1.0 - sn);
        std::vector<double> grad_n(d);
        for (int i = 0; i < d; ++i) {
            g.grad_center[i] += sn * zn[i];
            grad_n[i] = sn * zu[i];
        }
        g.grad_negatives.push_back(std::move(grad_n));
    }
    return g;
}

double train_pair(EmbeddingMatrix& X, int32_t input_row, int32_t output_row,
                  std::span<const int32_t> negative_rows, double lr) {
    int d = X.d;
    double* zu = X.input_row(input_row);
    thread_local std::vector<double> accum;
    accum.assign(d, 0.0);

    double loss = 0.0;
    {
        double* zv = X.output_row(output_row);
        double s = sigmoid(clamped_dot(zu, zv, d));
        loss += -std::log(s);
        double step = lr * (1.0 - s);
        for (int i = 0; i < d; ++i) {
            accum[i] += step * zv[i];
            zv[i] += step * zu[i];
        }
    }
    for (int32_t n : negative_rows) {
        double* zn = X.output_row(n);
        double sn = sigmoid(clamped_dot(zu, zn, d));
        loss += -std::log(1.0 - sn);
        double step = -lr * sn;
        for (int i = 0; i < d; ++i) {
            accum[i] += step * zn[i];
            zn[i] += step * zu[i];
        }
    }
    for (int i = 0; i < d; ++i) zu[i] += accum[i];
    return loss;
}

EmbeddingMatrix train(const WalkCorpus& corpus, const std::vector<std::string>& token_names,
                      const TrainConfig& cfg, std::vector<EpochStats>* stats,
                      std::ostream* progress) {
    cfg.validate();
    Vocab vocab = build_vocab(corpus, token_names, cfg.min_count);
    EmbeddingMatrix X = init_embeddings(vocab, cfg.d, cfg.seed);
    AliasTable negative_table(vocab.unigram);

    // Remap sequences to vocab rows, dropping filtered tokens.
    std::vector<int32_t> token_to_row(token_names.size(), -1);
    for (size_t t = 0; t < token_names.size(); ++t) {
        auto it = vocab.row_of.find(token_names[t]);
        if (it != vocab.row_of.end()) token_to_row[t] = it->second;
    }
    std::vector<std::vector<int32_t>> rows;
    rows.reserve(corpus.sequences.size());
    int64_t kept_tokens = 0;
    for (const auto& seq : corpus.sequences) {
        std::vector<int32_t> r;
        r.reserve(seq.size());
        for (int32_t t : seq)
            if (token_to_row[t] >= 0) r.push_back(token_to_row[t]);
        kept_tokens += static_cast<int64_t>(r.size());
        rows.push_back(std::move(r));
    }

    const double lr_floor = cfg.lr_initial * 1e-4;
    const double total_progress =
        static_cast<double>(kept_tokens) * cfg.epochs + 1.0;
    std::atomic<int64_t> tokens_done{0};

    int n_workers = std::max(1, cfg.workers);
    n_workers = static_cast<int>(
        std::min<size_t>(n_workers, std::max<size_t>(rows.size(), 1)));

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::vector<double> loss_sum(n_workers, 0.0);
        std::vector<uint64_t> pair_count(n_workers, 0);

        auto run_worker = [&](int w) {
            Rng rng(mix64(mix64(cfg.seed, kSgdTag, static_cast<uint64_t>(epoch)),
                          static_cast<uint64_t>(w)));
            std::vector<int32_t> negs(cfg.negatives);
            std::vector<int32_t> sent;
            size_t begin = rows.size() * w / n_workers;
            size_t end = rows.size() * (w + 1) / n_workers;
            for (size_t s = begin; s < end; ++s) {
                const auto& seq = rows[s];
                sent.clear();
                for (int32_t row : seq) {
                    if (cfg.subsample > 0.0) {
                        double f = static_cast<double>(vocab.counts[row]);
                        double cut = cfg.subsample * static_cast<double>(kept_tokens);
                        double keep = (std::sqrt(f / cut) + 1.0) * cut / f;
                        if (keep < 1.0 && rng.next_double() >= keep) continue;
                    }
                    sent.push_back(row);
                }
                int64_t done = tokens_done.fetch_add(static_cast<int64_t>(seq.size()),
                                                     std::memory_order_relaxed);
                double lr = cfg.lr_initial *
                            (1.0 - static_cast<double>(done) / total_progress);
                lr = std::max(lr, lr_floor);

                int len = static_cast<int>(sent.size());
                for (int i = 0; i < len; ++i) {
                    int width =
                        cfg.fixed_window ? cfg.c : 1 + static_cast<int>(rng.next_below(cfg.c));
                    int lo = std::max(0, i - width);
                    int hi = std::min(len - 1, i + width);
                    for (int j = lo; j <= hi; ++j) {
                        if (j == i) continue;
                        int n_negs = 0;
                        for (int n = 0; n < cfg.negatives; ++n) {
                            int32_t cand = static_cast<int32_t>(negative_table.sample(rng));
                            if (cand == sent[i]) continue;  // skip the positive target
                            negs[n_negs++] = cand;
                        }
                        loss_sum[w] += train_pair(
                            X, sent[j], sent[i],
                            std::span<const int32_t>(negs.data(), n_negs), lr);
                        pair_count[w]++;
                    }
                }
            }
        };

        if (n_workers == 1) {
            run_worker(0);
        } else {
            std::vector<std::thread> threads;
            for (int w = 0; w < n_workers; ++w) threads.emplace_back(run_worker, w);
            for (auto& t : threads) t.join();
        }

        EpochStats es;
        es.epoch = epoch + 1;
        for (int w = 0; w < n_workers; ++w) {
            es.pairs += pair_count[w];
            es.mean_loss += loss_sum[w];
        }
        es.mean_loss = es.pairs > 0 ? es.mean_loss / static_cast<double>(es.pairs) : 0.0;
        if (stats) stats->push_back(es);
        if (progress)
            *progress << "epoch " << es.epoch << " pairs " << es.pairs << " mean_loss "
                      << es.mean_loss << "\n";
    }
    return X;
}

void save_embeddings(const EmbeddingMatrix& X, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write embeddings '" + path + "'");
    out << X.rows() << ' ' << X.d << '\n';
    char buf[64];
    for (size_t r = 0; r < X.rows(); ++r) {
        out << X.names[r];
        const double* row = X.input.data() + r * X.d;
        for (int i = 0; i < X.d; ++i) {
            std::snprintf(buf, sizeof(buf), " %.9g", row[i]);
            out << buf;
        }
        out << '\n';
    }
}

EmbeddingMatrix load_embeddings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open embeddings '" + path + "'");
    size_t count = 0;
    int d = 0;
    std::string header;
    if (!std::getline(in, header))
        throw std::runtime_error(path + ": missing header line");
    {
        std::istringstream iss(header);
        if (!(iss >> count >> d) || d <= 0)
            throw std::runtime_error(path + ": bad header '" + header + "'");
    }
    EmbeddingMatrix X;
    X.d = d;
    X.input.reserve(count * static_cast<size_t>(d));
    std::string line;
    size_t rows = 0;
    while (rows < count && std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream iss(line);
        std::string name;
        iss >> name;
        for (int i = 0; i < d; ++i) {
            double v;
            if (!(iss >> v))
                throw std::runtime_error(path + ": row " + std::to_string(rows + 1) +
                                         " ('" + name + "') has fewer than " +
                                         std::to_string(d) + " values");
            X.input.push_back(v);
        }
        X.row_of.emplace(name, static_cast<int32_t>(X.names.size()));
        X.names.push_back(std::move(name));
        ++rows;
    }
    if (rows < count)
        throw std::runtime_error(path + ": header promises " + std::to_string(count) +
                                 " rows but only " + std::to_string(rows) + " found");
    X.output.assign(X.input.size(), 0.0);
    return X;
}

}  // namespace m2v
