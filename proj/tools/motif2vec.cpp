#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "m2v/eval.hpp"
#include "m2v/graph.hpp"
#include "m2v/motif.hpp"
#include "m2v/pipeline.hpp"
#include "m2v/trainer.hpp"
#include "m2v/walk.hpp"

namespace fs = std::filesystem;
using namespace m2v;

namespace {

// Flag values are buffered as (config key, value) pairs and applied after an
// optional --config file, so command-line flags always win.
struct Options {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;
    std::vector<std::string> motifs;           // --motif occurrences
    std::vector<std::string> adjacency_paths;  // walk subcommand inputs
    std::string corpus_path;
    std::string embeddings_path;
    std::string source = "all";

    PipelineConfig resolve() const {
        PipelineConfig cfg;
        if (!config_path.empty()) cfg.load_file(config_path);
        for (const auto& [key, value] : overrides) cfg.set(key, value);
        if (!motifs.empty()) {
            cfg.motif_paths = motifs;
        }
        return cfg;
    }
};

void add_kv(CLI::App* cmd, Options& opt, const std::string& flag, const std::string& key,
            const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [&opt, key](const std::string& v) { opt.overrides.emplace_back(key, v); },
        help);
}

void add_bool(CLI::App* cmd, Options& opt, const std::string& flag, const std::string& key,
              const std::string& help) {
    cmd->add_flag_callback(
        flag, [&opt, key]() { opt.overrides.emplace_back(key, "true"); }, help);
}

void add_graph_opts(CLI::App* cmd, Options& opt) {
    add_kv(cmd, opt, "--edges", "graph.edges", "edge file: src <TAB> dst <TAB> edge_type");
    add_kv(cmd, opt, "--nodes", "graph.nodes", "node file: node_id <TAB> node_type");
}

void add_motif_opts(CLI::App* cmd, Options& opt) {
    cmd->add_option("--motif", opt.motifs, "motif spec file (repeatable)");
    add_kv(cmd, opt, "--mode", "adjacency.mode", "motif adjacency mode: weighted|binary");
}

void add_walk_opts(CLI::App* cmd, Options& opt) {
    add_kv(cmd, opt, "--walks-per-node", "walk.r", "walks started per node (r)");
    add_kv(cmd, opt, "--walk-length", "walk.l", "walk length in nodes (l)");
    add_kv(cmd, opt, "--p", "walk.p", "return parameter");
    add_kv(cmd, opt, "--q", "walk.q", "in-out parameter");
    add_kv(cmd, opt, "--alias-budget", "walk.alias_budget",
           "max precomputed second-order alias entries");
}

void add_train_opts(CLI::App* cmd, Options& opt) {
    add_kv(cmd, opt, "--dim", "train.d", "embedding dimension (d)");
    add_kv(cmd, opt, "--context", "train.c", "context window size (c)");
    add_kv(cmd, opt, "--negatives", "train.negatives", "negative samples per pair");
    add_kv(cmd, opt, "--lr", "train.lr", "initial learning rate");
    add_kv(cmd, opt, "--epochs", "train.epochs", "training epochs");
    add_kv(cmd, opt, "--min-count", "train.min_count", "vocabulary frequency floor");
    add_kv(cmd, opt, "--subsample", "train.subsample",
           "frequent-token subsampling threshold (0 = off)");
    add_bool(cmd, opt, "--fixed-window", "train.fixed_window",
             "use a fixed context window instead of uniform shrinking");
}

void add_common_opts(CLI::App* cmd, Options& opt) {
    add_kv(cmd, opt, "--seed", "seed", "global seed");
    add_kv(cmd, opt, "--workers", "workers", "worker threads (1 = deterministic)");
    add_kv(cmd, opt, "--out", "out", "output directory");
}

int cmd_stats(const PipelineConfig& cfg) {
    HeteroGraph g = load_graph(cfg.edges_path, cfg.nodes_path);
    g.write_stats(std::cout);
    return 0;
}

int cmd_transform(const PipelineConfig& cfg) {
    HeteroGraph g = load_graph(cfg.edges_path, cfg.nodes_path);
    fs::create_directories(cfg.out_dir);
    for (const std::string& path : cfg.motif_paths) {
        MotifPattern m = load_motif_spec(path);
        InstanceSet inst = enumerate_instances(g, m, cfg.workers);
        MotifAdjacency adj = build_motif_adjacency(g, m, inst, cfg.adjacency());
        export_instances(inst, g, cfg.out_dir + "/instances_" + m.name + ".tsv");
        export_motif_adjacency(adj, g, cfg.out_dir + "/adjacency_" + m.name + ".tsv");
        std::cout << "motif " << m.name << ": " << motif_frequency(inst)
                  << " instances, " << adj.nonzero_pairs << " adjacency pairs, "
                  << adj.isolated_nodes << " isolated nodes\n";
    }
    return 0;
}

int cmd_walk(const PipelineConfig& cfg, const Options& opt) {
    HeteroGraph g = load_graph(cfg.edges_path, cfg.nodes_path);
    std::vector<WeightedGraphView> views;
    views.push_back(as_walk_view(g));
    if (opt.source != "original") {
        for (const std::string& path : opt.adjacency_paths)
            views.push_back(load_adjacency_view(path, g));
    }
    std::vector<WalkCorpus> corpora;
    for (size_t i = 0; i < views.size(); ++i)
        corpora.push_back(
            generate_walks(views[i], cfg.walk_config(static_cast<int>(i)),
                           static_cast<int32_t>(i)));
    WalkCorpus corpus =
        aggregate_and_shuffle(std::move(corpora), shuffle_stage_seed(cfg.seed));
    fs::create_directories(cfg.out_dir);
    save_corpus(corpus, g.node_ids(), cfg.out_dir + "/corpus.txt");
    std::cout << "wrote " << corpus.size() << " walks over " << views.size()
              << " view(s) to " << cfg.out_dir << "/corpus.txt\n";
    return 0;
}

int cmd_train(const PipelineConfig& cfg, const Options& opt) {
    if (opt.corpus_path.empty())
        throw std::runtime_error("train: --corpus is required");
    LoadedCorpus loaded = load_corpus(opt.corpus_path);
    TrainConfig tc = cfg.train_config();
    std::vector<EpochStats> stats;
    EmbeddingMatrix X = train(loaded.corpus, loaded.names, tc, &stats, &std::cerr);
    fs::create_directories(cfg.out_dir);
    save_embeddings(X, cfg.out_dir + "/embeddings.txt");
    std::cout << "wrote " << X.rows() << " x " << X.d << " embeddings to "
              << cfg.out_dir << "/embeddings.txt\n";
    return 0;
}

int cmd_eval_node(const PipelineConfig& cfg, const Options& opt) {
    if (opt.embeddings_path.empty())
        throw std::runtime_error("eval-node: --embeddings is required");
    EmbeddingMatrix X = load_embeddings(opt.embeddings_path);
    LabeledNodeSet labels = load_labels(cfg.labels_path);
    EvalReport report = evaluate_node_classification(X, labels, cfg.ratio, cfg.runs,
                                                     eval_stage_seed(cfg.seed));
    fs::create_directories(cfg.out_dir);
    write_metrics(report, cfg.out_dir + "/metrics.tsv");
    print_metrics(report, std::cout);
    return 0;
}

// Scores a fixed embedding file against seeded link splits. Note the
// embeddings may have seen the held-out edges; the leakage-free protocol
// (retraining per split on the pruned graph) is `run` with eval.task=link.
int cmd_eval_link(const PipelineConfig& cfg, const Options& opt) {
    if (opt.embeddings_path.empty())
        throw std::runtime_error("eval-link: --embeddings is required");
    EmbeddingMatrix X = load_embeddings(opt.embeddings_path);
    HeteroGraph g = load_graph(cfg.edges_path, cfg.nodes_path);
    EvalReport report;
    report.task = "link-prediction";
    uint64_t eval_seed = eval_stage_seed(cfg.seed);
    for (int run = 0; run < cfg.runs; ++run) {
        uint64_t run_seed = eval_run_seed(eval_seed, run);
        auto [pruned, split] = make_link_split(g, cfg.edge_type, cfg.ratio, run_seed);
        double th = cfg.threshold;
        if (cfg.tune_threshold) {
            std::vector<std::pair<std::string, std::string>> val_pos;
            int16_t type = pruned.edge_type_index(cfg.edge_type);
            for (size_t e = 0; e < pruned.num_edges() && val_pos.size() < split.test_edges.size();
                 ++e) {
                const auto& edge = pruned.edges()[e];
                if (edge.type == type)
                    val_pos.emplace_back(pruned.node_id(edge.src), pruned.node_id(edge.dst));
            }
            auto val_fakes = sample_fake_links(g, cfg.edge_type, val_pos.size(),
                                               mix64(run_seed, 0x56414c00ULL, 1),
                                               split.fake_edges);
            th = select_threshold(X, val_pos, val_fakes);
        }
        double acc = link_prediction_accuracy(X, split, th);
        report.runs.push_back({run + 1, run_seed, acc});
        report.mean += acc;
    }
    if (!report.runs.empty()) report.mean /= static_cast<double>(report.runs.size());
    fs::create_directories(cfg.out_dir);
    write_metrics(report, cfg.out_dir + "/metrics.tsv");
    print_metrics(report, std::cout);
    return 0;
}

int cmd_run(const PipelineConfig& cfg) {
    PipelineResult result = run_pipeline(cfg);
    std::cout << "embeddings: " << result.embeddings.rows() << " x "
              << result.embeddings.d << " -> " << cfg.out_dir << "/embeddings.txt\n";
    if (result.metrics) print_metrics(*result.metrics, std::cout);
    for (const StageTiming& t : result.timings)
        std::cerr << "timing " << t.stage << " " << t.seconds << "s\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"motif2vec: motif-aware node embeddings for heterogeneous networks"};
    app.require_subcommand(1);
    Options opt;

    CLI::App* run = app.add_subcommand("run", "run the full pipeline from a config");
    run->add_option("--config", opt.config_path, "flat key = value config file");
    add_graph_opts(run, opt);
    add_motif_opts(run, opt);
    add_walk_opts(run, opt);
    add_train_opts(run, opt);
    add_kv(run, opt, "--task", "eval.task", "evaluation task: none|node|link");
    add_kv(run, opt, "--labels", "eval.labels", "label file for eval.task=node");
    add_kv(run, opt, "--edge-type", "eval.edge_type", "target edge type for eval.task=link");
    add_kv(run, opt, "--ratio", "eval.ratio", "train fraction of the evaluation split");
    add_kv(run, opt, "--threshold", "eval.threshold", "link decision threshold");
    add_bool(run, opt, "--tune-threshold", "eval.tune_threshold",
             "pick the threshold on a validation slice of train edges");
    add_kv(run, opt, "--runs", "eval.runs", "seeded evaluation runs to average");
    add_common_opts(run, opt);

    CLI::App* stats = app.add_subcommand("stats", "print graph statistics");
    add_graph_opts(stats, opt);

    CLI::App* transform = app.add_subcommand(
        "transform", "enumerate motif instances and build motif adjacency exports");
    add_graph_opts(transform, opt);
    add_motif_opts(transform, opt);
    add_common_opts(transform, opt);

    CLI::App* walk = app.add_subcommand(
        "walk", "generate the aggregated, shuffled walk corpus");
    add_graph_opts(walk, opt);
    walk->add_option("--adjacency", opt.adjacency_paths,
                     "motif adjacency export from `transform` (repeatable, in motif order)");
    walk->add_option("--source", opt.source,
                     "walk sources: all (original + motif views) or original only")
        ->check(CLI::IsMember({"all", "original"}));
    add_walk_opts(walk, opt);
    add_common_opts(walk, opt);

    CLI::App* train_cmd = app.add_subcommand("train", "train embeddings from a corpus");
    train_cmd->add_option("--corpus", opt.corpus_path, "corpus file from `walk`");
    add_train_opts(train_cmd, opt);
    add_common_opts(train_cmd, opt);

    CLI::App* eval_node = app.add_subcommand(
        "eval-node", "node classification accuracy of an embedding file");
    eval_node->add_option("--embeddings", opt.embeddings_path,
                          "word2vec text format embeddings");
    add_kv(eval_node, opt, "--labels", "eval.labels", "label file: node_id <TAB> class");
    add_kv(eval_node, opt, "--ratio", "eval.ratio", "train fraction per split");
    add_kv(eval_node, opt, "--runs", "eval.runs", "seeded runs to average");
    add_common_opts(eval_node, opt);

    CLI::App* eval_link = app.add_subcommand(
        "eval-link", "link prediction accuracy of an embedding file");
    eval_link->add_option("--embeddings", opt.embeddings_path,
                          "word2vec text format embeddings");
    add_graph_opts(eval_link, opt);
    add_kv(eval_link, opt, "--edge-type", "eval.edge_type", "target edge type");
    add_kv(eval_link, opt, "--ratio", "eval.ratio", "retained fraction of target edges");
    add_kv(eval_link, opt, "--threshold", "eval.threshold", "link decision threshold");
    add_bool(eval_link, opt, "--tune-threshold", "eval.tune_threshold",
             "pick the threshold on a validation slice of train edges");
    add_kv(eval_link, opt, "--runs", "eval.runs", "seeded runs to average");
    add_common_opts(eval_link, opt);

    CLI11_PARSE(app, argc, argv);

    try {
        PipelineConfig cfg = opt.resolve();
        if (run->parsed()) return cmd_run(cfg);
        if (stats->parsed()) return cmd_stats(cfg);
        if (transform->parsed()) return cmd_transform(cfg);
        if (walk->parsed()) return cmd_walk(cfg, opt);
        if (train_cmd->parsed()) return cmd_train(cfg, opt);
        if (eval_node->parsed()) return cmd_eval_node(cfg, opt);
        if (eval_link->parsed()) return cmd_eval_link(cfg, opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
