#include "m2v/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace m2v {

namespace {

constexpr uint64_t kValTag = 0x56414c00ULL;

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

int to_int(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (...) {
        throw std::runtime_error("config: key '" + key + "' wants an integer, got '" +
                                 value + "'");
    }
}

double to_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (...) {
        throw std::runtime_error("config: key '" + key + "' wants a number, got '" +
                                 value + "'");
    }
}

uint64_t to_u64(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        uint64_t v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (...) {
        throw std::runtime_error("config: key '" + key +
                                 "' wants a nonnegative integer, got '" + value + "'");
    }
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::runtime_error("config: key '" + key + "' wants true/false, got '" +
                             value + "'");
}

std::vector<std::string> split_csv(const std::string& value) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream iss(value);
    while (std::getline(iss, item, ',')) {
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

std::string join_csv(const std::vector<std::string>& parts) {
    std::string joined;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) joined += ",";
        joined += parts[i];
    }
    return joined;
}

}  // namespace

void PipelineConfig::set(const std::string& key, const std::string& value) {
    if (key == "graph.edges") edges_path = value;
    else if (key == "graph.nodes") nodes_path = value;
    else if (key == "motifs") motif_paths = split_csv(value);
    else if (key == "adjacency.mode") adjacency_mode = value;
    else if (key == "walk.r") walks_per_node = to_int(key, value);
    else if (key == "walk.l") walk_length = to_int(key, value);
    else if (key == "walk.p") p = to_double(key, value);
    else if (key == "walk.q") q = to_double(key, value);
    else if (key == "walk.alias_budget") alias_budget = to_u64(key, value);
    else if (key == "train.d") dim = to_int(key, value);
    else if (key == "train.c") context = to_int(key, value);
    else if (key == "train.negatives") negatives = to_int(key, value);
    else if (key == "train.lr") lr = to_double(key, value);
    else if (key == "train.epochs") epochs = to_int(key, value);
    else if (key == "train.min_count") min_count = to_int(key, value);
    else if (key == "train.subsample") subsample = to_double(key, value);
    else if (key == "train.fixed_window") fixed_window = to_bool(key, value);
    else if (key == "eval.task") task = value;
    else if (key == "eval.labels") labels_path = value;
    else if (key == "eval.edge_type") edge_type = value;
    else if (key == "eval.ratio") ratio = to_double(key, value);
    else if (key == "eval.threshold") threshold = to_double(key, value);
    else if (key == "eval.tune_threshold") tune_threshold = to_bool(key, value);
    else if (key == "eval.runs") runs = to_int(key, value);
    else if (key == "seed") seed = to_u64(key, value);
    else if (key == "workers") workers = to_int(key, value);
    else if (key == "out") out_dir = value;
    else throw std::runtime_error("config: unknown key '" + key + "'");
}

void PipelineConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected `key = value`");
        auto trim = [](std::string s) {
            size_t b = s.find_first_not_of(" \t\r");
            size_t e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        try {
            set(key, value);
        } catch (const std::runtime_error& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " +
                                     e.what());
        }
    }
}

std::string PipelineConfig::effective_text() const {
    std::ostringstream os;
    os << "adjacency.mode = " << adjacency_mode << "\n";
    if (!edge_type.empty()) os << "eval.edge_type = " << edge_type << "\n";
    if (!labels_path.empty()) os << "eval.labels = " << labels_path << "\n";
    os << "eval.ratio = " << format_number(ratio) << "\n";
    os << "eval.runs = " << runs << "\n";
    os << "eval.task = " << task << "\n";
    os << "eval.threshold = " << format_number(threshold) << "\n";
    os << "eval.tune_threshold = " << (tune_threshold ? "true" : "false") << "\n";
    os << "graph.edges = " << edges_path << "\n";
    os << "graph.nodes = " << nodes_path << "\n";
    if (!motif_paths.empty()) os << "motifs = " << join_csv(motif_paths) << "\n";
    os << "out = " << out_dir << "\n";
    os << "seed = " << seed << "\n";
    os << "train.c = " << context << "\n";
    os << "train.d = " << dim << "\n";
    os << "train.epochs = " << epochs << "\n";
    os << "train.fixed_window = " << (fixed_window ? "true" : "false") << "\n";
    os << "train.lr = " << format_number(lr) << "\n";
    os << "train.min_count = " << min_count << "\n";
    os << "train.negatives = " << negatives << "\n";
    os << "train.subsample = " << format_number(subsample) << "\n";
    os << "walk.alias_budget = " << alias_budget << "\n";
    os << "walk.l = " << walk_length << "\n";
    os << "walk.p = " << format_number(p) << "\n";
    os << "walk.q = " << format_number(q) << "\n";
    os << "walk.r = " << walks_per_node << "\n";
    os << "workers = " << workers << "\n";
    return os.str();
}

void PipelineConfig::validate() const {
    if (edges_path.empty() || nodes_path.empty())
        throw std::runtime_error("config: graph.edges and graph.nodes are required");
    for (const std::string& path : {edges_path, nodes_path}) {
        if (!fs::exists(path))
            throw std::runtime_error("config: file not found: " + path);
    }
    for (const std::string& path : motif_paths) {
        if (!fs::exists(path))
            throw std::runtime_error("config: motif spec not found: " + path);
    }
    if (adjacency_mode != "weighted" && adjacency_mode != "binary")
        throw std::runtime_error("config: adjacency.mode must be weighted or binary");
    if (task != "none" && task != "node" && task != "link")
        throw std::runtime_error("config: eval.task must be none, node, or link");
    if (task == "node" && labels_path.empty())
        throw std::runtime_error("config: eval.task=node requires eval.labels");
    if (task == "node" && !fs::exists(labels_path))
        throw std::runtime_error("config: label file not found: " + labels_path);
    if (task == "link" && edge_type.empty())
        throw std::runtime_error("config: eval.task=link requires eval.edge_type");
    if (task != "none" && (ratio <= 0.0 || ratio >= 1.0))
        throw std::runtime_error("config: eval.ratio must lie in (0, 1)");
    if (task != "none" && runs < 1)
        throw std::runtime_error("config: eval.runs must be >= 1");
    if (workers < 1) throw std::runtime_error("config: workers must be >= 1");
    walk_config(0).validate();
    train_config().validate();
}

WalkConfig PipelineConfig::walk_config(int view_index) const {
    WalkConfig wc;
    wc.r = walks_per_node;
    wc.l = walk_length;
    wc.p = p;
    wc.q = q;
    wc.seed = walk_stage_seed(seed, view_index);
    wc.alias_budget = alias_budget;
    wc.workers = workers;
    return wc;
}

TrainConfig PipelineConfig::train_config() const {
    TrainConfig tc;
    tc.d = dim;
    tc.c = context;
    tc.negatives = negatives;
    tc.lr_initial = lr;
    tc.epochs = epochs;
    tc.seed = train_stage_seed(seed);
    tc.min_count = min_count;
    tc.subsample = subsample;
    tc.fixed_window = fixed_window;
    tc.workers = workers;
    return tc;
}

AdjacencyMode PipelineConfig::adjacency() const {
    return adjacency_mode == "binary" ? AdjacencyMode::Binary : AdjacencyMode::Weighted;
}

void write_artifact(const std::string& path, const std::string& content) {
    std::string tmp = path + ".partial";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
        out << content;
    }
    fs::rename(tmp, path);
}

namespace {

class StageClock {
  public:
    explicit StageClock(std::vector<StageTiming>* timings) : timings_(timings) {}

    template <typename Fn>
    auto run(const std::string& stage, Fn&& fn) {
        auto t0 = std::chrono::steady_clock::now();
        try {
            if constexpr (std::is_void_v<decltype(fn())>) {
                fn();
                record(stage, t0);
            } else {
                auto result = fn();
                record(stage, t0);
                return result;
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("stage '" + stage + "' failed: " + e.what());
        }
    }

  private:
    void record(const std::string& stage, std::chrono::steady_clock::time_point t0) {
        if (!timings_) return;
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                          .count();
        timings_->push_back({stage, secs});
    }

    std::vector<StageTiming>* timings_;
};

// Persists through a temp file so aborted stages leave `.partial` behind.
template <typename Fn>
void persist(const std::string& path, Fn&& writer) {
    std::string tmp = path + ".partial";
    writer(tmp);
    fs::rename(tmp, path);
}

// Shared embedding flow: enumerate/build per motif, walk every view,
// aggregate + shuffle, train. `out_dir` empty skips persistence.
EmbeddingMatrix core_run(const HeteroGraph& g, const std::vector<MotifPattern>& patterns,
                         const PipelineConfig& cfg, uint64_t seed,
                         const std::string& out_dir, StageClock& clock) {
    std::vector<WeightedGraphView> views;
    views.push_back(as_walk_view(g));

    for (const MotifPattern& m : patterns) {
        InstanceSet inst = clock.run("enumerate:" + m.name, [&] {
            return enumerate_instances(g, m, cfg.workers);
        });
        MotifAdjacency adj = clock.run("adjacency:" + m.name, [&] {
            MotifAdjacency a = build_motif_adjacency(g, m, inst, cfg.adjacency());
            if (!out_dir.empty()) {
                persist(out_dir + "/instances_" + m.name + ".tsv",
                        [&](const std::string& tmp) { export_instances(inst, g, tmp); });
                persist(out_dir + "/adjacency_" + m.name + ".tsv",
                        [&](const std::string& tmp) { export_motif_adjacency(a, g, tmp); });
            }
            return a;
        });
        views.push_back(adj.as_view());
    }

    WalkCorpus corpus = clock.run("walk", [&] {
        std::vector<WalkCorpus> corpora;
        for (size_t i = 0; i < views.size(); ++i) {
            WalkConfig wc = cfg.walk_config(static_cast<int>(i));
            wc.seed = walk_stage_seed(seed, static_cast<int>(i));
            corpora.push_back(generate_walks(views[i], wc, static_cast<int32_t>(i)));
        }
        WalkCorpus merged = aggregate_and_shuffle(std::move(corpora),
                                                  shuffle_stage_seed(seed));
        if (!out_dir.empty())
            persist(out_dir + "/corpus.txt", [&](const std::string& tmp) {
                save_corpus(merged, g.node_ids(), tmp);
            });
        return merged;
    });

    return clock.run("train", [&] {
        TrainConfig tc = cfg.train_config();
        tc.seed = train_stage_seed(seed);
        std::vector<EpochStats> stats;
        EmbeddingMatrix X = train(corpus, g.node_ids(), tc, &stats, &std::cerr);
        if (!out_dir.empty())
            persist(out_dir + "/embeddings.txt",
                    [&](const std::string& tmp) { save_embeddings(X, tmp); });
        return X;
    });
}

EvalReport evaluate_link_prediction(const HeteroGraph& g,
                                    const std::vector<MotifPattern>& patterns,
                                    const PipelineConfig& cfg) {
    EvalReport report;
    report.task = "link-prediction";
    StageClock discard(nullptr);  // per-run embedding stages stay out of timings
    uint64_t eval_seed = eval_stage_seed(cfg.seed);
    for (int run = 0; run < cfg.runs; ++run) {
        uint64_t run_seed = eval_run_seed(eval_seed, run);
        auto [pruned, split] = make_link_split(g, cfg.edge_type, cfg.ratio, run_seed);

        std::vector<std::pair<std::string, std::string>> val_pos, val_fakes;
        HeteroGraph train_graph = std::move(pruned);
        if (cfg.tune_threshold) {
            // Hold a further 10% of the train edges out of the embedding
            // graph to pick the decision threshold on.
            int16_t type = train_graph.edge_type_index(cfg.edge_type);
            std::vector<size_t> train_edges;
            for (size_t e = 0; e < train_graph.num_edges(); ++e)
                if (train_graph.edges()[e].type == type) train_edges.push_back(e);
            Rng rng(mix64(run_seed, kValTag));
            rng.shuffle(train_edges);
            size_t n_val = std::max<size_t>(
                1, static_cast<size_t>(std::lround(0.1 * train_edges.size())));
            n_val = std::min(n_val, train_edges.size() - 1);
            std::vector<size_t> val(train_edges.begin(), train_edges.begin() + n_val);
            for (size_t e : val) {
                const auto& edge = train_graph.edges()[e];
                val_pos.emplace_back(train_graph.node_id(edge.src),
                                     train_graph.node_id(edge.dst));
            }
            train_graph = train_graph.without_edges(val);
            val_fakes = sample_fake_links(g, cfg.edge_type, val_pos.size(),
                                          mix64(run_seed, kValTag, 1), split.fake_edges);
        }

        EmbeddingMatrix X = core_run(train_graph, patterns, cfg, run_seed, "", discard);
        double th = cfg.threshold;
        if (cfg.tune_threshold) th = select_threshold(X, val_pos, val_fakes);
        double acc = link_prediction_accuracy(X, split, th);
        report.runs.push_back({run + 1, run_seed, acc});
        report.mean += acc;
    }
    if (!report.runs.empty()) report.mean /= static_cast<double>(report.runs.size());
    return report;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg) {
    cfg.validate();
    fs::create_directories(cfg.out_dir);
    write_artifact(cfg.out_dir + "/effective.cfg", cfg.effective_text());

    PipelineResult result;
    StageClock clock(&result.timings);
    auto t0 = std::chrono::steady_clock::now();

    HeteroGraph g = clock.run("load", [&] {
        return load_graph(cfg.edges_path, cfg.nodes_path);
    });

    std::vector<MotifPattern> patterns = clock.run("parse-motifs", [&] {
        std::vector<MotifPattern> ps;
        std::set<std::string> names;
        for (const std::string& path : cfg.motif_paths) {
            ps.push_back(load_motif_spec(path));
            if (!names.insert(ps.back().name).second)
                throw std::runtime_error("duplicate motif name '" + ps.back().name + "'");
        }
        return ps;
    });

    result.embeddings = core_run(g, patterns, cfg, cfg.seed, cfg.out_dir, clock);

    if (cfg.task == "node") {
        result.metrics = clock.run("eval", [&] {
            LabeledNodeSet labels = load_labels(cfg.labels_path);
            return evaluate_node_classification(result.embeddings, labels, cfg.ratio,
                                                cfg.runs, eval_stage_seed(cfg.seed));
        });
    } else if (cfg.task == "link") {
        result.metrics = clock.run("eval", [&] {
            return evaluate_link_prediction(g, patterns, cfg);
        });
    }

    if (result.metrics) {
        persist(cfg.out_dir + "/metrics.tsv", [&](const std::string& tmp) {
            write_metrics(*result.metrics, tmp);
        });
    }

    result.timings.push_back(
        {"total",
         std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()});
    std::ostringstream timing_text;
    for (const StageTiming& t : result.timings) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f", t.seconds);
        timing_text << t.stage << "\t" << buf << "\n";
    }
    write_artifact(cfg.out_dir + "/timings.tsv", timing_text.str());
    return result;
}

}  // namespace m2v
