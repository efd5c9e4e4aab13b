#include "simforge/clustop.hpp"

#include "simforge/error.hpp"
#include "simforge/random.hpp"
#include "simforge/vector_metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace simforge {

// ---------------------------------------------------------------------------
// WordGraph

NodeId WordGraph::add_node(const std::string& label) {
    auto it = index_.find(label);
    if (it != index_.end()) return it->second;
    NodeId id = labels_.size();
    labels_.push_back(label);
    index_.emplace(label, id);
    return id;
}

std::optional<NodeId> WordGraph::find(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void WordGraph::add_weight(NodeId u, NodeId v, double weight) {
    if (u >= labels_.size() || v >= labels_.size()) throw InvalidArgument("unknown graph node");
    if (!(weight > 0.0) || !std::isfinite(weight)) {
        throw InvalidArgument("edge weights must be positive and finite");
    }
    if (u == v) {
        loops_[u] += weight;
    } else {
        edges_[{std::min(u, v), std::max(u, v)}] += weight;
    }
}

void WordGraph::add_weight(const std::string& u, const std::string& v, double weight) {
    NodeId a = add_node(u);
    NodeId b = add_node(v);
    add_weight(a, b, weight);
}

void WordGraph::set_weight(NodeId u, NodeId v, double weight) {
    if (u >= labels_.size() || v >= labels_.size()) throw InvalidArgument("unknown graph node");
    if (!std::isfinite(weight)) throw InvalidArgument("edge weights must be finite");
    if (u == v) {
        if (weight > 0.0) loops_[u] = weight; else loops_.erase(u);
        return;
    }
    std::pair<NodeId, NodeId> key{std::min(u, v), std::max(u, v)};
    if (weight > 0.0) edges_[key] = weight; else edges_.erase(key);
}

double WordGraph::weight(NodeId u, NodeId v) const {
    if (u == v) {
        auto it = loops_.find(u);
        return it == loops_.end() ? 0.0 : it->second;
    }
    auto it = edges_.find({std::min(u, v), std::max(u, v)});
    return it == edges_.end() ? 0.0 : it->second;
}

double WordGraph::total_weight() const {
    double m = 0.0;
    for (const auto& kv : edges_) m += kv.second;
    for (const auto& kv : loops_) m += kv.second;
    return m;
}

std::vector<double> WordGraph::degrees() const {
    std::vector<double> k(labels_.size(), 0.0);
    for (const auto& [e, w] : edges_) {
        k[e.first] += w;
        k[e.second] += w;
    }
    for (const auto& [u, w] : loops_) k[u] += 2.0 * w;
    return k;
}

double WordGraph::strength(NodeId id) const {
    double s = weight(id, id);
    for (const auto& [e, w] : edges_) {
        if (e.first == id || e.second == id) s += w;
    }
    return s;
}

void WordGraph::save_tsv(std::ostream& out) const {
    char buf[64];
    auto emit = [&](NodeId u, NodeId v, double w) {
        auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), w);
        out << labels_[u] << '\t' << labels_[v] << '\t'
            << std::string_view(buf, static_cast<std::size_t>(end - buf)) << '\n';
    };
    for (const auto& [e, w] : edges_) emit(e.first, e.second, w);
    for (const auto& [u, w] : loops_) emit(u, u, w);
}

WordGraph WordGraph::load_tsv(std::istream& in) {
    WordGraph g;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, '\t')) fields.push_back(f);
        if (fields.size() != 3) throw ParseError("graph: expected u<TAB>v<TAB>weight", line_no);
        double w = 0.0;
        auto [ptr, ec] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), w);
        if (ec != std::errc() || ptr != fields[2].data() + fields[2].size() || !(w > 0.0)) {
            throw ParseError("graph: weight must be a positive number", line_no);
        }
        g.add_weight(fields[0], fields[1], w);
    }
    return g;
}

// ---------------------------------------------------------------------------
// Graph construction

namespace {

bool starts_with(const Token& t, char c) { return t.size() > 1 && t[0] == c; }

struct Dsu {
    std::vector<std::size_t> parent;
    explicit Dsu(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

using PairSet = std::set<std::pair<Token, Token>>;

void link(PairSet& pairs, const Token& a, const Token& b) {
    if (a == b) return;
    pairs.insert(a < b ? std::pair{a, b} : std::pair{b, a});
}

// Tokens at most `span` positions apart, within each segment.
void link_windowed(PairSet& pairs, const TokenSequence& seq, std::size_t span) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
        for (std::size_t j = i + 1; j < seq.size() && j - i <= span; ++j) link(pairs, seq[i], seq[j]);
    }
}

void link_all(PairSet& pairs, const TokenSequence& seq) { link_windowed(pairs, seq, seq.size()); }

PairSet pseudo_document_pairs(const std::vector<TokenSequence>& segments, const BuildConfig& cfg) {
    PairSet pairs;
    TokenSequence flat;
    TokenSequence hashtags;
    for (const auto& seg : segments) {
        for (const auto& t : seg) {
            if (is_empty_token(t)) continue;
            flat.push_back(t);
            if (starts_with(t, '#')) hashtags.push_back(t);
        }
    }
    auto segment_pairs = [&](std::size_t span) {
        for (const auto& seg : segments) link_windowed(pairs, strip_empty(seg), span);
    };
    switch (cfg.vertex_mode) {
    case VertexMode::word:
        if (cfg.window) {
            link_windowed(pairs, flat, *cfg.window);
        } else {
            link_all(pairs, flat);
        }
        break;
    case VertexMode::bigram:
        segment_pairs(1);
        break;
    case VertexMode::trigram:
        segment_pairs(2);
        break;
    case VertexMode::hashtag:
        link_all(pairs, hashtags);
        break;
    case VertexMode::biha:
        segment_pairs(1);
        link_all(pairs, hashtags);
        break;
    }
    return pairs;
}

} // namespace

std::vector<std::vector<TokenSequence>> aggregate_documents(const std::vector<TokenSequence>& docs,
                                                            AggregationMode mode) {
    std::vector<std::vector<TokenSequence>> out;
    if (mode == AggregationMode::none) {
        for (const auto& d : docs) out.push_back({d});
        return out;
    }
    const char marker = mode == AggregationMode::by_hashtag ? '#' : '@';
    Dsu dsu(docs.size());
    std::map<Token, std::size_t> first_doc;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        for (const auto& t : docs[i]) {
            if (!starts_with(t, marker)) continue;
            auto [it, inserted] = first_doc.emplace(t, i);
            if (!inserted) dsu.unite(it->second, i);
        }
    }
    std::map<std::size_t, std::size_t> group_slot;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        std::size_t root = dsu.find(i);
        auto [it, inserted] = group_slot.emplace(root, out.size());
        if (inserted) out.emplace_back();
        out[it->second].push_back(docs[i]);
    }
    return out;
}

WordGraph build_word_graph(const std::vector<TokenSequence>& docs, const BuildConfig& config) {
    if (config.edge_mode == EdgeMode::embed_cosine && config.embeddings == nullptr) {
        throw InvalidArgument("embed_cosine edges require an embedding table");
    }
    WordGraph graph;
    // Vertices are registered in first-appearance order so ids are stable.
    auto register_nodes = [&](const TokenSequence& seq) {
        for (const auto& t : seq) {
            if (is_empty_token(t)) continue;
            bool keep = config.vertex_mode != VertexMode::hashtag || starts_with(t, '#');
            if (keep) graph.add_node(t);
        }
    };
    for (const auto& d : docs) register_nodes(d);

    for (const auto& pseudo : aggregate_documents(docs, config.agg_mode)) {
        for (const auto& [a, b] : pseudo_document_pairs(pseudo, config)) {
            NodeId u = graph.add_node(a);
            NodeId v = graph.add_node(b);
            if (config.edge_mode == EdgeMode::cooccur) {
                graph.add_weight(u, v, 1.0);
            } else if (graph.weight(u, v) == 0.0) {
                const Vector ea = config.embeddings->lookup(a);
                const Vector eb = config.embeddings->lookup(b);
                const double na = l2_norm(ea), nb = l2_norm(eb);
                const double cos = (na > 0 && nb > 0) ? inner(ea, eb) / (na * nb) : 0.0;
                if (cos > 0.0) graph.set_weight(u, v, cos);
            }
        }
    }
    return graph;
}

// ---------------------------------------------------------------------------
// Partition / modularity

Partition::Partition(std::vector<std::size_t> community_of) : community_of_(std::move(community_of)) {
    for (NodeId i = 0; i < community_of_.size(); ++i) communities_[community_of_[i]].insert(i);
}

Partition Partition::singletons(std::size_t n) {
    std::vector<std::size_t> c(n);
    std::iota(c.begin(), c.end(), 0);
    return Partition(std::move(c));
}

void Partition::move(NodeId node, std::size_t community) {
    std::size_t old = community_of_.at(node);
    if (old == community) return;
    auto it = communities_.find(old);
    it->second.erase(node);
    if (it->second.empty()) communities_.erase(it);
    communities_[community].insert(node);
    community_of_[node] = community;
}

Partition Partition::normalized() const {
    std::map<std::size_t, std::size_t> relabel;
    std::vector<std::size_t> out(community_of_.size());
    for (NodeId i = 0; i < community_of_.size(); ++i) {
        auto [it, inserted] = relabel.emplace(community_of_[i], relabel.size());
        out[i] = it->second;
    }
    return Partition(std::move(out));
}

double modularity(const WordGraph& graph, const Partition& partition) {
    if (partition.size() != graph.node_count()) {
        throw InvalidArgument("partition does not cover the graph");
    }
    const double m = graph.total_weight();
    if (!(m > 0.0)) throw UndefinedValue("modularity undefined for a graph with no weight");
    const auto k = graph.degrees();
    std::map<std::size_t, double> in, tot;
    for (const auto& [e, w] : graph.edges()) {
        if (partition.community_of(e.first) == partition.community_of(e.second)) {
            in[partition.community_of(e.first)] += 2.0 * w;
        }
    }
    for (const auto& [u, w] : graph.self_loops()) in[partition.community_of(u)] += 2.0 * w;
    for (NodeId i = 0; i < k.size(); ++i) tot[partition.community_of(i)] += k[i];
    double q = 0.0;
    for (const auto& [c, t] : tot) {
        const double frac = t / (2.0 * m);
        q += in[c] / (2.0 * m) - frac * frac;
    }
    return q;
}

double modularity_gain(const WordGraph& graph, const Partition& partition, NodeId node,
                       std::size_t target) {
    if (node >= graph.node_count() || partition.size() != graph.node_count()) {
        throw InvalidArgument("unknown node for modularity gain");
    }
    const std::size_t source = partition.community_of(node);
    if (source == target) return 0.0;
    const double m = graph.total_weight();
    if (!(m > 0.0)) throw UndefinedValue("modularity undefined for a graph with no weight");
    const auto k = graph.degrees();

    double k_in_source = 0.0, k_in_target = 0.0;  // links from node, self excluded
    for (const auto& [e, w] : graph.edges()) {
        if (e.first != node && e.second != node) continue;
        NodeId other = e.first == node ? e.second : e.first;
        std::size_t c = partition.community_of(other);
        if (c == source) k_in_source += w;
        if (c == target) k_in_target += w;
    }
    double tot_source = 0.0, tot_target = 0.0;
    for (NodeId i = 0; i < k.size(); ++i) {
        if (i == node) continue;
        std::size_t c = partition.community_of(i);
        if (c == source) tot_source += k[i];
        if (c == target) tot_target += k[i];
    }
    const double ki = k[node];
    return (k_in_target - k_in_source) / m - ki * (tot_target - tot_source) / (2.0 * m * m);
}

// ---------------------------------------------------------------------------
// Louvain

namespace {

struct LevelGraph {
    std::vector<std::vector<std::pair<std::size_t, double>>> adj;  // no self entries
    std::vector<double> loop;
    std::vector<double> degree;
    double m = 0.0;

    std::size_t size() const { return adj.size(); }

    static LevelGraph from(const WordGraph& g) {
        LevelGraph lg;
        const std::size_t n = g.node_count();
        lg.adj.resize(n);
        lg.loop.assign(n, 0.0);
        for (const auto& [e, w] : g.edges()) {
            lg.adj[e.first].emplace_back(e.second, w);
            lg.adj[e.second].emplace_back(e.first, w);
        }
        for (const auto& [u, w] : g.self_loops()) lg.loop[u] = w;
        lg.finish();
        return lg;
    }

    void finish() {
        degree.assign(size(), 0.0);
        m = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            for (const auto& [j, w] : adj[i]) degree[i] += w;
            degree[i] += 2.0 * loop[i];
            m += loop[i];
        }
        double half = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            for (const auto& [j, w] : adj[i]) half += w;
        }
        m += half / 2.0;
    }
};

// One level of local moving. Returns the community of each node, relabelled
// 0..k-1, and whether anything moved.
std::pair<std::vector<std::size_t>, bool> local_moves(const LevelGraph& g, Rng& rng) {
    const std::size_t n = g.size();
    std::vector<std::size_t> comm(n);
    std::iota(comm.begin(), comm.end(), 0);
    std::vector<double> tot = g.degree;
    std::vector<double> link_w(n, 0.0);
    std::vector<std::size_t> touched;
    const double m = g.m;
    // Moves must beat staying by more than rounding noise so Q strictly rises.
    const double tol = 1e-12;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    bool any_move = false;
    bool moved = true;
    while (moved) {
        moved = false;
        rng.shuffle(order);
        for (std::size_t i : order) {
            const std::size_t home = comm[i];
            touched.clear();
            touched.push_back(home);
            link_w[home] = 0.0;
            for (const auto& [j, w] : g.adj[i]) {
                std::size_t c = comm[j];
                if (link_w[c] == 0.0 && std::find(touched.begin(), touched.end(), c) == touched.end()) {
                    touched.push_back(c);
                }
                link_w[c] += w;
            }
            tot[home] -= g.degree[i];
            const double ki = g.degree[i];
            auto gain = [&](std::size_t c) { return link_w[c] / m - ki * tot[c] / (2.0 * m * m); };
            std::size_t best = home;
            double best_gain = gain(home);
            for (std::size_t c : touched) {
                double gc = gain(c);
                if (gc > best_gain + tol) {
                    best = c;
                    best_gain = gc;
                }
            }
            tot[best] += ki;
            comm[i] = best;
            if (best != home) {
                moved = true;
                any_move = true;
            }
            for (std::size_t c : touched) link_w[c] = 0.0;
        }
    }
    std::map<std::size_t, std::size_t> relabel;
    for (auto& c : comm) {
        auto [it, inserted] = relabel.emplace(c, relabel.size());
        c = it->second;
    }
    return {comm, any_move};
}

LevelGraph aggregate(const LevelGraph& g, const std::vector<std::size_t>& comm, std::size_t k) {
    LevelGraph out;
    out.adj.resize(k);
    out.loop.assign(k, 0.0);
    std::vector<std::map<std::size_t, double>> acc(k);
    for (std::size_t i = 0; i < g.size(); ++i) {
        out.loop[comm[i]] += g.loop[i];
        for (const auto& [j, w] : g.adj[i]) {
            if (j < i) continue;
            if (comm[i] == comm[j]) {
                out.loop[comm[i]] += w;
            } else {
                acc[comm[i]][comm[j]] += w;
                acc[comm[j]][comm[i]] += w;
            }
        }
    }
    for (std::size_t c = 0; c < k; ++c) {
        for (const auto& [d, w] : acc[c]) out.adj[c].emplace_back(d, w);
    }
    out.finish();
    return out;
}

} // namespace

LouvainResult louvain(const WordGraph& graph, std::uint64_t seed, std::size_t max_passes) {
    if (graph.node_count() == 0) throw InvalidArgument("louvain: empty graph");
    LouvainResult result;
    std::vector<std::size_t> membership(graph.node_count());
    std::iota(membership.begin(), membership.end(), 0);
    result.partition = Partition(membership);
    if (!(graph.total_weight() > 0.0)) {
        // No edges: every node stays alone and Q is undefined.
        return result;
    }
    result.q_trace.push_back(modularity(graph, result.partition));

    Rng rng(seed);
    LevelGraph level = LevelGraph::from(graph);
    for (std::size_t pass = 0; pass < max_passes; ++pass) {
        auto [comm, moved] = local_moves(level, rng);
        if (!moved) break;
        const std::size_t k = *std::max_element(comm.begin(), comm.end()) + 1;
        for (auto& c : membership) c = comm[c];
        Partition p(membership);
        result.q_trace.push_back(modularity(graph, p));
        result.partition = std::move(p);
        if (k == level.size()) break;
        level = aggregate(level, comm, k);
    }
    result.partition = result.partition.normalized();
    return result;
}

// ---------------------------------------------------------------------------
// Topics

std::vector<Topic> extract_topics(const WordGraph& graph, const Partition& partition,
                                  std::size_t top_k) {
    if (partition.size() != graph.node_count()) {
        throw InvalidArgument("partition does not cover the graph");
    }
    std::vector<double> strength(graph.node_count(), 0.0);
    for (const auto& [e, w] : graph.edges()) {
        strength[e.first] += w;
        strength[e.second] += w;
    }
    for (const auto& [u, w] : graph.self_loops()) strength[u] += w;

    std::vector<Topic> topics;
    for (const auto& [id, members] : partition.communities()) {
        Topic t;
        t.id = id;
        for (NodeId u : members) t.keywords.emplace_back(graph.label(u), strength[u]);
        std::sort(t.keywords.begin(), t.keywords.end(), [](const auto& a, const auto& b) {
            return a.second != b.second ? a.second > b.second : a.first < b.first;
        });
        if (top_k > 0 && t.keywords.size() > top_k) t.keywords.resize(top_k);
        topics.push_back(std::move(t));
    }
    return topics;
}

std::optional<std::size_t> assign_topic(const TokenSequence& doc, const std::vector<Topic>& topics) {
    std::optional<std::size_t> best;
    double best_score = 0.0;
    for (const auto& topic : topics) {
        std::map<std::string, double> weight(topic.keywords.begin(), topic.keywords.end());
        double score = 0.0;
        for (const auto& t : doc) {
            auto it = weight.find(t);
            if (it != weight.end()) score += it->second;
        }
        if (score <= 0.0) continue;
        if (!best || score > best_score || (score == best_score && topic.id < *best)) {
            best = topic.id;
            best_score = score;
        }
    }
    return best;
}

namespace {

struct DocCounts {
    std::vector<std::string> words;
    std::vector<double> single;
    std::vector<std::vector<double>> joint;
};

DocCounts count_documents(const Topic& topic, const std::vector<TokenSequence>& corpus,
                          std::size_t top_k) {
    if (top_k < 2) throw InvalidArgument("topic scoring needs top_k >= 2");
    DocCounts dc;
    for (std::size_t i = 0; i < topic.keywords.size() && i < top_k; ++i) {
        dc.words.push_back(topic.keywords[i].first);
    }
    const std::size_t n = dc.words.size();
    dc.single.assign(n, 0.0);
    dc.joint.assign(n, std::vector<double>(n, 0.0));
    for (const auto& doc : corpus) {
        std::set<Token> present(doc.begin(), doc.end());
        std::vector<bool> has(n);
        for (std::size_t i = 0; i < n; ++i) has[i] = present.count(dc.words[i]) > 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!has[i]) continue;
            dc.single[i] += 1;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i && has[j]) dc.joint[i][j] += 1;
            }
        }
    }
    return dc;
}

constexpr double kEpsilon = 1.0;

} // namespace

double topic_coherence(const Topic& topic, const std::vector<TokenSequence>& corpus, std::size_t top_k) {
    const DocCounts dc = count_documents(topic, corpus, top_k);
    double tc = 0.0;
    for (std::size_t i = 0; i < dc.words.size(); ++i) {
        for (std::size_t j = 0; j < dc.words.size(); ++j) {
            if (i == j) continue;
            tc += std::log((dc.joint[i][j] + kEpsilon) / (dc.single[j] + kEpsilon));
        }
    }
    return tc;
}

double topic_pmi(const Topic& topic, const std::vector<TokenSequence>& corpus, std::size_t top_k) {
    if (corpus.empty()) throw InvalidArgument("topic_pmi: corpus is empty");
    const DocCounts dc = count_documents(topic, corpus, top_k);
    const double n = static_cast<double>(corpus.size());
    double pmi = 0.0;
    for (std::size_t i = 0; i < dc.words.size(); ++i) {
        for (std::size_t j = 0; j < dc.words.size(); ++j) {
            if (i == j) continue;
            const double pij = (dc.joint[i][j] + kEpsilon) / n;
            const double pi = (dc.single[i] + kEpsilon) / n;
            const double pj = (dc.single[j] + kEpsilon) / n;
            pmi += std::log(pij / (pi * pj));
        }
    }
    return pmi;
}

PrfScores topic_prf(const std::vector<std::string>& detected, const std::vector<std::string>& truth,
                    std::size_t k) {
    if (k == 0) throw InvalidArgument("topic_prf: k must be >= 1");
    if (truth.empty()) throw InvalidArgument("topic_prf: ground truth is empty");
    std::set<std::string> d(detected.begin(), detected.begin() + static_cast<std::ptrdiff_t>(std::min(k, detected.size())));
    std::set<std::string> g(truth.begin(), truth.end());
    std::size_t inter = 0;
    for (const auto& w : d) inter += g.count(w);
    PrfScores s;
    if (inter == 0) return s;
    s.precision = static_cast<double>(inter) / static_cast<double>(d.size());
    s.recall = static_cast<double>(inter) / static_cast<double>(g.size());
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
    return s;
}

nlohmann::json topics_to_json(const std::vector<Topic>& topics) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : topics) {
        nlohmann::json kw = nlohmann::json::array();
        for (const auto& [word, weight] : t.keywords) kw.push_back({word, weight});
        arr.push_back({{"id", t.id}, {"keywords", kw}});
    }
    return arr;
}

std::vector<Topic> topics_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw ParseError("topics JSON must be an array", 0);
    std::vector<Topic> topics;
    for (const auto& item : j) {
        Topic t;
        t.id = item.at("id").get<std::size_t>();
        for (const auto& kw : item.at("keywords")) {
            t.keywords.emplace_back(kw.at(0).get<std::string>(), kw.at(1).get<double>());
        }
        topics.push_back(std::move(t));
    }
    return topics;
}

} // namespace simforge
