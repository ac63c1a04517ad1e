#include "m2v/graph.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace m2v {

namespace {

int64_t arc_key(int32_t src, int32_t dst) {
    return (static_cast<int64_t>(src) << 32) | static_cast<uint32_t>(dst);
}

}  // namespace

bool WeightedGraphView::has_arc(int32_t u, int32_t v) const {
    auto begin = neighbors.begin() + offsets[u];
    auto end = neighbors.begin() + offsets[u + 1];
    return std::binary_search(begin, end, v);
}

void WeightedGraphView::validate() const {
    if (offsets.size() != static_cast<size_t>(num_nodes) + 1)
        throw std::logic_error("view: offset table size mismatch");
    for (size_t i = 0; i < neighbors.size(); ++i) {
        if (weights[i] <= 0.0) throw std::logic_error("view: non-positive arc weight");
    }
    if (symmetric) {
        for (int32_t u = 0; u < num_nodes; ++u) {
            for (size_t i = offsets[u]; i < offsets[u + 1]; ++i) {
                int32_t v = neighbors[i];
                auto begin = neighbors.begin() + offsets[v];
                auto end = neighbors.begin() + offsets[v + 1];
                auto it = std::lower_bound(begin, end, u);
                if (it == end || *it != u)
                    throw std::logic_error("view: missing symmetric arc");
                if (weights[it - neighbors.begin()] != weights[i])
                    throw std::logic_error("view: asymmetric weights");
            }
        }
    }
}

WeightedGraphView make_view(int32_t num_nodes,
                            const std::vector<std::tuple<int32_t, int32_t, double>>& arcs,
                            bool symmetric) {
    std::vector<std::tuple<int32_t, int32_t, double>> all;
    all.reserve(symmetric ? arcs.size() * 2 : arcs.size());
    for (const auto& [u, v, w] : arcs) {
        all.emplace_back(u, v, w);
        if (symmetric) all.emplace_back(v, u, w);
    }
    std::sort(all.begin(), all.end());

    WeightedGraphView view;
    view.num_nodes = num_nodes;
    view.symmetric = symmetric;
    view.offsets.assign(static_cast<size_t>(num_nodes) + 1, 0);
    view.neighbors.reserve(all.size());
    view.weights.reserve(all.size());
    for (const auto& [u, v, w] : all) {
        view.offsets[u + 1]++;
        view.neighbors.push_back(v);
        view.weights.push_back(w);
    }
    for (int32_t u = 0; u < num_nodes; ++u) view.offsets[u + 1] += view.offsets[u];
    return view;
}

int32_t HeteroGraph::index_of(const std::string& id) const {
    auto it = id_index_.find(id);
    return it == id_index_.end() ? -1 : it->second;
}

int16_t HeteroGraph::node_type_index(const std::string& name) const {
    auto it = node_type_index_.find(name);
    return it == node_type_index_.end() ? -1 : it->second;
}

int16_t HeteroGraph::edge_type_index(const std::string& name) const {
    auto it = edge_type_index_.find(name);
    return it == edge_type_index_.end() ? -1 : it->second;
}

int32_t HeteroGraph::add_node(const std::string& id, const std::string& type) {
    auto it = id_index_.find(id);
    if (it != id_index_.end()) {
        if (node_type_names_[node_type_[it->second]] != type)
            throw std::runtime_error("node '" + id + "' declared with two types");
        return it->second;
    }
    int16_t t;
    auto tt = node_type_index_.find(type);
    if (tt == node_type_index_.end()) {
        t = static_cast<int16_t>(node_type_names_.size());
        node_type_names_.push_back(type);
        node_type_index_.emplace(type, t);
    } else {
        t = tt->second;
    }
    int32_t idx = static_cast<int32_t>(node_ids_.size());
    node_ids_.push_back(id);
    id_index_.emplace(id, idx);
    node_type_.push_back(t);
    return idx;
}

bool HeteroGraph::add_edge(int32_t src, int32_t dst, const std::string& type) {
    if (src == dst)
        throw std::runtime_error("self loop on node '" + node_ids_[src] + "'");
    int16_t t;
    auto tt = edge_type_index_.find(type);
    if (tt == edge_type_index_.end()) {
        t = static_cast<int16_t>(edge_type_names_.size());
        edge_type_names_.push_back(type);
        edge_type_index_.emplace(type, t);
    } else {
        t = tt->second;
    }
    auto& types = edge_keys_[arc_key(src, dst)];
    if (std::find(types.begin(), types.end(), t) != types.end()) return false;
    types.push_back(t);
    edges_.push_back({src, dst, t});
    return true;
}

void HeteroGraph::finalize() {
    out_adj_.assign(node_ids_.size(), {});
    in_adj_.assign(node_ids_.size(), {});
    for (const Edge& e : edges_) {
        out_adj_[e.src].push_back(e.dst);
        in_adj_[e.dst].push_back(e.src);
    }
    arc_count_ = 0;
    for (auto* adj : {&out_adj_, &in_adj_}) {
        for (auto& list : *adj) {
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
        }
    }
    for (const auto& list : out_adj_) arc_count_ += list.size();
    finalized_ = true;
}

bool HeteroGraph::has_arc(int32_t u, int32_t v) const {
    const auto& list = out_adj_[u];
    return std::binary_search(list.begin(), list.end(), v);
}

size_t HeteroGraph::degree(int32_t u, Direction dir) const {
    return dir == Direction::Out ? out_adj_[u].size() : in_adj_[u].size();
}

size_t HeteroGraph::degree(const std::string& id, Direction dir) const {
    int32_t u = index_of(id);
    if (u < 0) throw std::runtime_error("unknown node '" + id + "'");
    return degree(u, dir);
}

HeteroGraph HeteroGraph::without_edges(const std::vector<size_t>& edge_indexes) const {
    std::vector<bool> drop(edges_.size(), false);
    for (size_t i : edge_indexes) drop[i] = true;
    HeteroGraph g;
    for (int32_t u = 0; u < num_nodes(); ++u)
        g.add_node(node_ids_[u], node_type_names_[node_type_[u]]);
    for (size_t i = 0; i < edges_.size(); ++i) {
        if (!drop[i])
            g.add_edge(edges_[i].src, edges_[i].dst, edge_type_names_[edges_[i].type]);
    }
    g.finalize();
    return g;
}

void HeteroGraph::write_stats(std::ostream& os) const {
    os << "nodes\t" << num_nodes() << "\n";
    os << "edges\t" << num_edges() << "\n";
    os << "node_types\t" << node_type_names_.size() << "\n";
    os << "edge_types\t" << edge_type_names_.size() << "\n";
    std::vector<size_t> node_counts(node_type_names_.size(), 0);
    for (int16_t t : node_type_) node_counts[t]++;
    for (size_t t = 0; t < node_type_names_.size(); ++t)
        os << "node_type\t" << node_type_names_[t] << "\t" << node_counts[t] << "\n";
    std::vector<size_t> edge_counts(edge_type_names_.size(), 0);
    for (const Edge& e : edges_) edge_counts[e.type]++;
    for (size_t t = 0; t < edge_type_names_.size(); ++t)
        os << "edge_type\t" << edge_type_names_[t] << "\t" << edge_counts[t] << "\n";
}

namespace {

// Splits a record line on tabs (falling back to runs of spaces so hand-made
// fixtures are accepted). Returns false for blank and comment lines.
bool split_record(const std::string& line, std::vector<std::string>& fields) {
    fields.clear();
    size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') return false;
    std::string token;
    std::istringstream iss(line);
    while (iss >> token) fields.push_back(token);
    return !fields.empty();
}

}  // namespace

HeteroGraph load_graph(const std::string& edge_file, const std::string& node_type_file,
                       LoadReport* report) {
    std::ifstream nodes(node_type_file);
    if (!nodes) throw std::runtime_error("cannot open node file '" + node_type_file + "'");
    HeteroGraph g;
    std::string line;
    std::vector<std::string> fields;
    size_t line_no = 0;
    while (std::getline(nodes, line)) {
        ++line_no;
        if (!split_record(line, fields)) continue;
        if (fields.size() != 2)
            throw std::runtime_error(node_type_file + ":" + std::to_string(line_no) +
                                     ": expected `node_id <TAB> node_type`, got: " + line);
        g.add_node(fields[0], fields[1]);
    }
    if (g.num_nodes() == 0)
        throw std::runtime_error("node file '" + node_type_file + "' declares no nodes");

    std::ifstream edges(edge_file);
    if (!edges) throw std::runtime_error("cannot open edge file '" + edge_file + "'");
    size_t duplicates = 0;
    line_no = 0;
    while (std::getline(edges, line)) {
        ++line_no;
        if (!split_record(line, fields)) continue;
        if (fields.size() != 3)
            throw std::runtime_error(edge_file + ":" + std::to_string(line_no) +
                                     ": expected `src <TAB> dst <TAB> edge_type`, got: " + line);
        int32_t src = g.index_of(fields[0]);
        int32_t dst = g.index_of(fields[1]);
        if (src < 0 || dst < 0)
            throw std::runtime_error(edge_file + ":" + std::to_string(line_no) +
                                     ": edge references undeclared node: " + line);
        try {
            if (!g.add_edge(src, dst, fields[2])) ++duplicates;
        } catch (const std::runtime_error& e) {
            throw std::runtime_error(edge_file + ":" + std::to_string(line_no) + ": " +
                                     e.what());
        }
    }
    g.finalize();

    LoadReport rep;
    rep.duplicate_edges = duplicates;
    rep.homogeneous_nodes = g.node_type_names().size() < 2;
    rep.homogeneous_edges = g.edge_type_names().size() < 2;
    if (duplicates > 0)
        std::cerr << "warning: dropped " << duplicates << " duplicate edge line(s)\n";
    if (rep.homogeneous_nodes)
        std::cerr << "warning: graph has a single node type (|T_V| = "
                  << g.node_type_names().size() << ")\n";
    if (rep.homogeneous_edges && g.num_edges() > 0)
        std::cerr << "warning: graph has a single edge type (|T_E| = "
                  << g.edge_type_names().size() << ")\n";
    if (report) *report = rep;
    return g;
}

void save_graph(const HeteroGraph& g, const std::string& edge_file,
                const std::string& node_type_file) {
    std::ofstream nodes(node_type_file);
    if (!nodes) throw std::runtime_error("cannot write '" + node_type_file + "'");
    for (int32_t u = 0; u < g.num_nodes(); ++u)
        nodes << g.node_id(u) << "\t" << g.node_type_name(g.node_type(u)) << "\n";

    std::ofstream edges(edge_file);
    if (!edges) throw std::runtime_error("cannot write '" + edge_file + "'");
    for (const auto& e : g.edges())
        edges << g.node_id(e.src) << "\t" << g.node_id(e.dst) << "\t"
              << g.edge_type_names()[e.type] << "\n";
}

WeightedGraphView as_walk_view(const HeteroGraph& g) {
    std::vector<std::tuple<int32_t, int32_t, double>> arcs;
    arcs.reserve(g.num_arcs());
    for (int32_t u = 0; u < g.num_nodes(); ++u)
        for (int32_t v : g.out_neighbors(u)) arcs.emplace_back(u, v, 1.0);
    return make_view(g.num_nodes(), arcs, /*symmetric=*/false);
}

}  // namespace m2v
