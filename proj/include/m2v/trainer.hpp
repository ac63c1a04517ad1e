#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "m2v/walk.hpp"

namespace m2v {

struct TrainConfig {
    int d = 128;        // embedding dimension
    int c = 10;         // context window
    int negatives = 5;  // negative samples per positive pair
    double lr_initial = 0.025;
    int epochs = 1;
    uint64_t seed = 1;
    int min_count = 0;       // vocabulary frequency floor
    double subsample = 0.0;  // frequent-token subsampling threshold, 0 = off
    bool fixed_window = false;
    int workers = 1;

    void validate() const;
};

struct Vocab {
    std::vector<std::string> names;  // row -> token, ordered (count desc, name asc)
    std::vector<int64_t> counts;
    std::unordered_map<std::string, int32_t> row_of;
    std::vector<double> unigram;  // negative-sampling distribution, count^0.75
    int64_t total_tokens = 0;     // pre-filter token count

    size_t size() const { return names.size(); }
};

// Counts token frequencies and keeps tokens with count >= min_count; throws
// if nothing survives the filter.
Vocab build_vocab(const WalkCorpus& corpus, const std::vector<std::string>& token_names,
                  int min_count);

struct EmbeddingMatrix {
    int d = 0;
    std::vector<std::string> names;
    std::unordered_map<std::string, int32_t> row_of;
    std::vector<double> input;   // |V| x d, row-major; the published embedding
    std::vector<double> output;  // context-side parameters

    size_t rows() const { return names.size(); }
    int32_t row_index(const std::string& name) const;  // -1 if absent
    std::span<const double> row(int32_t r) const {
        return {input.data() + static_cast<size_t>(r) * d, static_cast<size_t>(d)};
    }
    double* input_row(int32_t r) { return input.data() + static_cast<size_t>(r) * d; }
    double* output_row(int32_t r) { return output.data() + static_cast<size_t>(r) * d; }
};

// Input rows uniform in [-0.5/d, 0.5/d], output rows zero.
EmbeddingMatrix init_embeddings(const Vocab& vocab, int d, uint64_t seed);

// Loss and gradients of one skip-gram negative-sampling pair:
//   loss = -log sigma(zu . zv) - sum_n log sigma(-(zu . zn))
// Dot products are clamped to [-30, 30] before the sigmoid; the clamp is part
// of the contract.
struct PairGrad {
    double loss = 0.0;
    std::vector<double> grad_center;                 // d loss / d zu
    std::vector<double> grad_context;                // d loss / d zv
    std::vector<std::vector<double>> grad_negatives; // d loss / d zn
};
PairGrad sgns_pair_loss_and_grad(std::span<const double> zu, std::span<const double> zv,
                                 const std::vector<std::vector<double>>& negatives);

// One SGD step on X for the pair (input_row from the input matrix, output_row
// and negative rows from the output matrix). Returns the pair loss before the
// update. Exactly the update train() applies.
double train_pair(EmbeddingMatrix& X, int32_t input_row, int32_t output_row,
                  std::span<const int32_t> negative_rows, double lr);

struct EpochStats {
    int epoch = 0;
    uint64_t pairs = 0;
    double mean_loss = 0.0;
};

// Skip-gram with negative sampling over the walk corpus. Positives are pairs
// within a per-center window drawn uniformly from [1, c] (fixed at c when
// cfg.fixed_window). The learning rate decays linearly to lr_initial/1e4 over
// token progress. Single-worker runs are bit-reproducible for a fixed seed;
// multi-worker runs update shared matrices without locks.
EmbeddingMatrix train(const WalkCorpus& corpus, const std::vector<std::string>& token_names,
                      const TrainConfig& cfg, std::vector<EpochStats>* stats = nullptr,
                      std::ostream* progress = nullptr);

// word2vec text format: header `<count> <d>`, then `name v1 ... vd` per row.
void save_embeddings(const EmbeddingMatrix& X, const std::string& path);
EmbeddingMatrix load_embeddings(const std::string& path);

}  // namespace m2v
