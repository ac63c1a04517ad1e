#include "m2v/motif.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace m2v {

bool MotifPattern::has_edge(int src_slot, int dst_slot) const {
    for (const auto& [s, d] : edges)
        if (s == src_slot && d == dst_slot) return true;
    return false;
}

size_t MotifPattern::out_degree(int slot) const {
    size_t n = 0;
    for (const auto& [s, d] : edges)
        if (s == slot) ++n;
    return n;
}

size_t MotifPattern::in_degree(int slot) const {
    size_t n = 0;
    for (const auto& [s, d] : edges)
        if (d == slot) ++n;
    return n;
}

namespace {

[[noreturn]] void parse_error(const std::string& msg) {
    throw std::runtime_error("motif spec: " + msg);
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool weakly_connected(const MotifPattern& m) {
    int k = m.k();
    if (k == 0) return false;
    std::vector<int> comp(k);
    for (int i = 0; i < k; ++i) comp[i] = i;
    // Tiny union-find, path halving not worth it at k <= 5.
    auto root = [&](int x) {
        while (comp[x] != x) x = comp[x];
        return x;
    };
    for (const auto& [s, d] : m.edges) comp[root(s)] = root(d);
    for (int i = 1; i < k; ++i)
        if (root(i) != root(0)) return false;
    return true;
}

}  // namespace

MotifPattern parse_motif_spec(const std::string& text,
                              const std::vector<std::string>* registry) {
    // Sections may be separated by newlines or ';'.
    std::vector<std::string> sections;
    std::string current;
    for (char c : text) {
        if (c == '\n' || c == ';') {
            sections.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    sections.push_back(current);

    MotifPattern m;
    std::map<int, int> slot_of_label;
    bool saw_nodes = false, saw_edges = false;
    std::vector<std::string> edge_tokens;

    for (const std::string& raw : sections) {
        std::string sec = trim(raw);
        if (sec.empty() || sec[0] == '#') continue;
        size_t colon = sec.find(':');
        if (colon == std::string::npos) parse_error("expected `key: ...`, got: " + sec);
        std::string key = trim(sec.substr(0, colon));
        std::string rest = trim(sec.substr(colon + 1));
        if (key == "name") {
            if (rest.empty()) parse_error("empty name");
            m.name = rest;
        } else if (key == "nodes") {
            if (saw_nodes) parse_error("duplicate nodes section");
            saw_nodes = true;
            std::istringstream iss(rest);
            std::string tok;
            while (iss >> tok) {
                size_t sep = tok.find(':');
                if (sep == std::string::npos || sep == 0 || sep + 1 >= tok.size())
                    parse_error("bad node token '" + tok + "' (want slot:TYPE)");
                int label = 0;
                auto [p, ec] = std::from_chars(tok.data(), tok.data() + sep, label);
                if (ec != std::errc() || p != tok.data() + sep)
                    parse_error("bad slot label in '" + tok + "'");
                if (slot_of_label.count(label))
                    parse_error("duplicate slot label " + std::to_string(label));
                slot_of_label[label] = m.k();
                m.slot_labels.push_back(label);
                m.slot_types.push_back(tok.substr(sep + 1));
            }
        } else if (key == "edges") {
            if (saw_edges) parse_error("duplicate edges section");
            saw_edges = true;
            std::istringstream iss(rest);
            std::string tok;
            while (iss >> tok) edge_tokens.push_back(tok);
        } else {
            parse_error("unknown section '" + key + "'");
        }
    }

    if (!saw_nodes) parse_error("missing nodes section");
    if (m.k() < 2 || m.k() > 5)
        parse_error("pattern must have between 2 and 5 nodes, got " +
                    std::to_string(m.k()));

    for (const std::string& tok : edge_tokens) {
        size_t arrow = tok.find("->");
        if (arrow == std::string::npos)
            parse_error("bad edge token '" + tok + "' (want src->dst)");
        int a = 0, b = 0;
        auto [p1, e1] = std::from_chars(tok.data(), tok.data() + arrow, a);
        const char* bstart = tok.data() + arrow + 2;
        auto [p2, e2] = std::from_chars(bstart, tok.data() + tok.size(), b);
        if (e1 != std::errc() || e2 != std::errc() || p1 != tok.data() + arrow ||
            p2 != tok.data() + tok.size())
            parse_error("bad edge token '" + tok + "'");
        auto sa = slot_of_label.find(a), sb = slot_of_label.find(b);
        if (sa == slot_of_label.end() || sb == slot_of_label.end())
            parse_error("edge '" + tok + "' references an undeclared slot");
        if (sa->second == sb->second) parse_error("self loop in '" + tok + "'");
        if (m.has_edge(sa->second, sb->second))
            parse_error("duplicate edge '" + tok + "'");
        m.edges.emplace_back(sa->second, sb->second);
    }

    if (!weakly_connected(m)) parse_error("pattern is not weakly connected");

    if (registry) {
        for (const std::string& t : m.slot_types) {
            if (t != "*" &&
                std::find(registry->begin(), registry->end(), t) == registry->end())
                parse_error("unknown node type '" + t + "'");
        }
    }
    return m;
}

MotifPattern load_motif_spec(const std::string& path,
                             const std::vector<std::string>* registry) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open motif spec '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_motif_spec(buf.str(), registry);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

namespace {

// Precomputed search plan: slot visit order plus, per step, the pattern
// edges between the new slot and every already-placed slot.
struct SearchPlan {
    struct Step {
        int slot;
        int anchor = -1;          // placed-slot position whose adjacency seeds candidates
        bool anchor_out = false;  // true: pattern edge anchor->slot, follow out-arcs
        // Induced-check rows against placed slots: (position, fwd, back) where
        // fwd = pattern edge placed->slot, back = pattern edge slot->placed.
        std::vector<std::tuple<int, bool, bool>> checks;
    };
    std::vector<Step> steps;
};

SearchPlan make_plan(const MotifPattern& m) {
    int k = m.k();
    std::vector<int> degree(k);
    for (int i = 0; i < k; ++i)
        degree[i] = static_cast<int>(m.out_degree(i) + m.in_degree(i));

    std::vector<bool> placed(k, false);
    std::vector<int> order;
    order.reserve(k);

    auto score = [&](int slot) {
        int connected = 0;
        for (int p : order)
            if (m.has_edge(p, slot) || m.has_edge(slot, p)) ++connected;
        bool concrete = m.slot_types[slot] != "*";
        // (connectivity to placed, concrete type, degree, stable index order)
        return std::tuple(connected, concrete ? 1 : 0, degree[slot], -slot);
    };

    for (int step = 0; step < k; ++step) {
        int best = -1;
        for (int s = 0; s < k; ++s) {
            if (placed[s]) continue;
            if (best < 0 || score(s) > score(best)) best = s;
        }
        placed[best] = true;
        order.push_back(best);
    }

    SearchPlan plan;
    for (int pos = 0; pos < k; ++pos) {
        SearchPlan::Step st;
        st.slot = order[pos];
        for (int prev = 0; prev < pos; ++prev) {
            bool fwd = m.has_edge(order[prev], st.slot);
            bool back = m.has_edge(st.slot, order[prev]);
            st.checks.emplace_back(prev, fwd, back);
            if (st.anchor < 0 && (fwd || back)) {
                st.anchor = prev;
                st.anchor_out = fwd;
            }
        }
        plan.steps.push_back(std::move(st));
    }
    return plan;
}

struct Matcher {
    const HeteroGraph& g;
    const MotifPattern& m;
    const SearchPlan& plan;
    std::vector<int16_t> slot_type_ids;  // -1 = wildcard
    std::vector<int32_t> assigned;       // per plan position
    std::vector<std::vector<int32_t>>* out;

    bool candidate_ok(int pos, int32_t cand) const {
        const auto& st = plan.steps[pos];
        int16_t want = slot_type_ids[st.slot];
        if (want >= 0 && g.node_type(cand) != want) return false;
        if (g.degree(cand, Direction::Out) < m.out_degree(st.slot)) return false;
        if (g.degree(cand, Direction::In) < m.in_degree(st.slot)) return false;
        for (const auto& [prev, fwd, back] : st.checks) {
            int32_t other = assigned[prev];
            if (other == cand) return false;
            if (g.has_arc(other, cand) != fwd) return false;
            if (g.has_arc(cand, other) != back) return false;
        }
        return true;
    }

    void extend(int pos) {
        if (pos == m.k()) {
            out->push_back(assigned);
            return;
        }
        const auto& st = plan.steps[pos];
        const auto& pool = st.anchor_out ? g.out_neighbors(assigned[st.anchor])
                                         : g.in_neighbors(assigned[st.anchor]);
        for (int32_t cand : pool) {
            if (!candidate_ok(pos, cand)) continue;
            assigned[pos] = cand;
            extend(pos + 1);
        }
    }
};

}  // namespace

InstanceSet enumerate_instances(const HeteroGraph& g, const MotifPattern& m,
                                int workers) {
    InstanceSet result;
    result.pattern_name = m.name;
    result.k = m.k();

    std::vector<int16_t> slot_type_ids(m.k());
    for (int s = 0; s < m.k(); ++s) {
        if (m.slot_types[s] == "*") {
            slot_type_ids[s] = -1;
        } else {
            int16_t t = g.node_type_index(m.slot_types[s]);
            if (t < 0) {
                std::cerr << "warning: motif '" << m.name << "' uses node type '"
                          << m.slot_types[s] << "' absent from the graph; no instances\n";
                return result;
            }
            slot_type_ids[s] = t;
        }
    }

    SearchPlan plan = make_plan(m);

    // Root candidates, partitioned across workers.
    std::vector<int32_t> roots;
    {
        Matcher probe{g, m, plan, slot_type_ids, std::vector<int32_t>(m.k(), -1), nullptr};
        for (int32_t u = 0; u < g.num_nodes(); ++u)
            if (probe.candidate_ok(0, u)) roots.push_back(u);
    }

    int n_workers = std::max(1, workers);
    n_workers = static_cast<int>(std::min<size_t>(n_workers, roots.size()));
    if (n_workers == 0) n_workers = 1;

    std::vector<std::vector<std::vector<int32_t>>> found(n_workers);
    auto run_chunk = [&](int w) {
        Matcher matcher{g, m, plan, slot_type_ids, std::vector<int32_t>(m.k(), -1),
                        &found[w]};
        for (size_t i = w; i < roots.size(); i += n_workers) {
            matcher.assigned[0] = roots[i];
            matcher.extend(1);
        }
    };
    if (n_workers == 1) {
        run_chunk(0);
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < n_workers; ++w) threads.emplace_back(run_chunk, w);
        for (auto& t : threads) t.join();
    }

    // Merge: dedup by node set, keeping the lexicographically smallest
    // plan-order assignment so the survivor is worker-count independent.
    std::map<std::vector<int32_t>, std::vector<int32_t>> dedup;
    for (auto& chunk : found) {
        for (auto& assigned : chunk) {
            std::vector<int32_t> key = assigned;
            std::sort(key.begin(), key.end());
            auto [it, inserted] = dedup.try_emplace(std::move(key), assigned);
            if (!inserted && assigned < it->second) it->second = assigned;
        }
    }

    result.instances.reserve(dedup.size());
    for (auto& [key, assigned_by_pos] : dedup) {
        MotifInstance inst;
        // Undo the plan ordering: slot s was assigned at plan position of s.
        inst.assignment.resize(m.k());
        for (int pos = 0; pos < m.k(); ++pos)
            inst.assignment[plan.steps[pos].slot] = assigned_by_pos[pos];
        inst.node_set = key;
        result.instances.push_back(std::move(inst));
    }

    // Canonical order: sorted external-id tuples.
    std::sort(result.instances.begin(), result.instances.end(),
              [&](const MotifInstance& a, const MotifInstance& b) {
                  std::vector<std::string> ka, kb;
                  for (int32_t u : a.node_set) ka.push_back(g.node_id(u));
                  for (int32_t u : b.node_set) kb.push_back(g.node_id(u));
                  std::sort(ka.begin(), ka.end());
                  std::sort(kb.begin(), kb.end());
                  return ka < kb;
              });
    return result;
}

int64_t MotifAdjacency::weight(int32_t i, int32_t j) const {
    const auto& row = rows[i];
    auto it = std::lower_bound(row.begin(), row.end(), std::pair<int32_t, int64_t>{j, 0},
                               [](const auto& a, const auto& b) { return a.first < b.first; });
    if (it == row.end() || it->first != j) return 0;
    return it->second;
}

WeightedGraphView MotifAdjacency::as_view() const {
    std::vector<std::tuple<int32_t, int32_t, double>> arcs;
    arcs.reserve(nonzero_pairs);
    for (int32_t u = 0; u < num_nodes; ++u)
        for (const auto& [v, w] : rows[u])
            if (u < v) arcs.emplace_back(u, v, static_cast<double>(w));
    return make_view(num_nodes, arcs, /*symmetric=*/true);
}

MotifAdjacency build_motif_adjacency(const HeteroGraph& g, const MotifPattern& m,
                                     const InstanceSet& inst, AdjacencyMode mode) {
    if (inst.pattern_name != m.name || inst.k != m.k())
        throw std::runtime_error("instance set for pattern '" + inst.pattern_name +
                                 "' does not match motif '" + m.name + "'");

    std::map<std::pair<int32_t, int32_t>, int64_t> pairs;
    for (const MotifInstance& in : inst.instances) {
        const auto& ns = in.node_set;
        for (size_t i = 0; i < ns.size(); ++i)
            for (size_t j = i + 1; j < ns.size(); ++j) pairs[{ns[i], ns[j]}] += 1;
    }

    MotifAdjacency adj;
    adj.pattern_name = m.name;
    adj.mode = mode;
    adj.num_nodes = g.num_nodes();
    adj.rows.assign(g.num_nodes(), {});
    adj.nonzero_pairs = pairs.size();
    for (const auto& [key, count] : pairs) {
        int64_t w = mode == AdjacencyMode::Binary ? 1 : count;
        adj.rows[key.first].emplace_back(key.second, w);
        adj.rows[key.second].emplace_back(key.first, w);
    }
    for (auto& row : adj.rows) std::sort(row.begin(), row.end());
    for (const auto& row : adj.rows)
        if (row.empty()) adj.isolated_nodes++;
    return adj;
}

void export_instances(const InstanceSet& inst, const HeteroGraph& g,
                      const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    std::vector<std::string> lines;
    lines.reserve(inst.instances.size());
    for (const MotifInstance& in : inst.instances) {
        std::vector<std::string> ids;
        for (int32_t u : in.node_set) ids.push_back(g.node_id(u));
        std::sort(ids.begin(), ids.end());
        std::string line = ids[0];
        for (size_t i = 1; i < ids.size(); ++i) line += "\t" + ids[i];
        lines.push_back(std::move(line));
    }
    std::sort(lines.begin(), lines.end());
    for (const std::string& line : lines) out << line << "\n";
}

void export_motif_adjacency(const MotifAdjacency& adj, const HeteroGraph& g,
                            const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    std::vector<std::string> lines;
    lines.reserve(adj.nonzero_pairs);
    for (int32_t u = 0; u < adj.num_nodes; ++u) {
        for (const auto& [v, w] : adj.rows[u]) {
            if (u >= v) continue;
            const std::string &a = g.node_id(u), &b = g.node_id(v);
            if (a < b)
                lines.push_back(a + "\t" + b + "\t" + std::to_string(w));
            else
                lines.push_back(b + "\t" + a + "\t" + std::to_string(w));
        }
    }
    std::sort(lines.begin(), lines.end());
    for (const std::string& line : lines) out << line << "\n";
}

WeightedGraphView load_adjacency_view(const std::string& path, const HeteroGraph& g) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open adjacency file '" + path + "'");
    std::vector<std::tuple<int32_t, int32_t, double>> arcs;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream iss(line);
        std::string a, b;
        double w;
        if (!(iss >> a >> b >> w))
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected `id_i id_j weight`");
        int32_t u = g.index_of(a), v = g.index_of(b);
        if (u < 0 || v < 0)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": unknown node id");
        arcs.emplace_back(u, v, w);
    }
    return make_view(g.num_nodes(), arcs, /*symmetric=*/true);
}

}  // namespace m2v
