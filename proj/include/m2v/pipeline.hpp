#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "m2v/eval.hpp"
#include "m2v/motif.hpp"
#include "m2v/trainer.hpp"
#include "m2v/walk.hpp"

namespace m2v {

// Stage seed derivation shared by run_pipeline and the stage subcommands so
// stage-wise execution reproduces the end-to-end run byte for byte.
inline uint64_t walk_stage_seed(uint64_t seed, int view_index) {
    return mix64(seed, 0x77616c6bULL, static_cast<uint64_t>(view_index));
}
inline uint64_t shuffle_stage_seed(uint64_t seed) { return mix64(seed, 0x73687566ULL); }
inline uint64_t train_stage_seed(uint64_t seed) { return mix64(seed, 0x7472616eULL); }
inline uint64_t eval_stage_seed(uint64_t seed) { return mix64(seed, 0x6576616cULL); }

// Flat key-value configuration; every key has a CLI flag. Defaults follow the
// usual node2vec-style settings (d=128, l=80, r=10, c=10, p=q=1, one epoch).
struct PipelineConfig {
    std::string edges_path;
    std::string nodes_path;
    std::vector<std::string> motif_paths;
    std::string adjacency_mode = "weighted";  // weighted | binary

    int walks_per_node = 10;  // r
    int walk_length = 80;     // l
    double p = 1.0;
    double q = 1.0;
    size_t alias_budget = 20'000'000;

    int dim = 128;       // d
    int context = 10;    // c
    int negatives = 5;
    double lr = 0.025;
    int epochs = 1;
    int min_count = 0;
    double subsample = 0.0;
    bool fixed_window = false;

    std::string task = "none";  // none | node | link
    std::string labels_path;
    std::string edge_type;
    double ratio = 0.7;
    double threshold = 0.5;
    bool tune_threshold = false;
    int runs = 5;

    uint64_t seed = 1;
    int workers = 1;
    std::string out_dir = "out";

    void set(const std::string& key, const std::string& value);  // throws on bad key
    void load_file(const std::string& path);  // `key = value` lines, '#' comments
    std::string effective_text() const;       // sorted `key = value` lines
    void validate() const;

    WalkConfig walk_config(int view_index) const;
    TrainConfig train_config() const;
    AdjacencyMode adjacency() const;
};

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct PipelineResult {
    EmbeddingMatrix embeddings;
    std::optional<EvalReport> metrics;
    std::vector<StageTiming> timings;
};

// Full run: load, enumerate + motif adjacency per motif, walks over the
// original and every motif view, aggregate + shuffle, train, optional
// evaluation. Persists every intermediate artifact plus per-stage timings to
// cfg.out_dir; files being written carry a .partial suffix until complete.
// Stage failures rethrow tagged with the stage name.
PipelineResult run_pipeline(const PipelineConfig& cfg);

// Writes `content` to path via path.partial + rename.
void write_artifact(const std::string& path, const std::string& content);

}  // namespace m2v
