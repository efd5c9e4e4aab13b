// Graph-based topic modelling: build a weighted unigram graph from documents, detect
// communities with Louvain, turn communities into ranked keyword topics, assign
// documents, and score topics.
#pragma once

#include "simforge/embeddings.hpp"
#include "simforge/text.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace simforge {

using NodeId = std::size_t;

/// Undirected weighted graph over labelled nodes. Edge keys are (lo, hi).
class WordGraph {
public:
    /// Returns the id of `label`, adding it if new.
    NodeId add_node(const std::string& label);
    std::optional<NodeId> find(const std::string& label) const;

    /// Adds `weight` (> 0) to edge {u, v}; u == v adds to the self-loop.
    void add_weight(NodeId u, NodeId v, double weight);
    void add_weight(const std::string& u, const std::string& v, double weight);
    /// Replaces the weight of {u, v}; weight <= 0 removes the edge.
    void set_weight(NodeId u, NodeId v, double weight);

    double weight(NodeId u, NodeId v) const;

    std::size_t node_count() const noexcept { return labels_.size(); }
    const std::string& label(NodeId id) const { return labels_.at(id); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    const std::map<std::pair<NodeId, NodeId>, double>& edges() const noexcept { return edges_; }
    const std::map<NodeId, double>& self_loops() const noexcept { return loops_; }

    /// m = Σ edge weights + Σ self-loop weights.
    double total_weight() const;

    /// k_i = Σ_{j≠i} w_ij + 2·loop_i, so Σ k_i = 2m.
    std::vector<double> degrees() const;

    /// Total weight of links touching the node, self-loop counted once.
    double strength(NodeId id) const;

    /// "u<TAB>v<TAB>weight" lines in key order.
    void save_tsv(std::ostream& out) const;
    static WordGraph load_tsv(std::istream& in);

private:
    std::vector<std::string> labels_;
    std::map<std::string, NodeId> index_;
    std::map<std::pair<NodeId, NodeId>, double> edges_;
    std::map<NodeId, double> loops_;
};

enum class VertexMode { word, bigram, trigram, hashtag, biha };
enum class EdgeMode { cooccur, embed_cosine };
enum class AggregationMode { none, by_hashtag, by_mention };

struct BuildConfig {
    VertexMode vertex_mode = VertexMode::word;
    EdgeMode edge_mode = EdgeMode::cooccur;
    AggregationMode agg_mode = AggregationMode::none;
    /// word mode: link only tokens at most this many positions apart.
    std::optional<std::size_t> window;
    /// Required for embed_cosine.
    const EmbeddingTable* embeddings = nullptr;
};

/// Pseudo-documents after aggregation: each is a list of the original
/// documents merged into it (union over shared '#'/'@' tokens).
std::vector<std::vector<TokenSequence>> aggregate_documents(const std::vector<TokenSequence>& docs,
                                                            AggregationMode mode);

/// Each distinct unordered pair linked within a (pseudo-)document adds 1
/// (cooccur) or sets max(0, cosine) (embed_cosine). Pairs of identical
/// tokens are not linked.
WordGraph build_word_graph(const std::vector<TokenSequence>& docs, const BuildConfig& config);

/// community_of[node] = community id; ids need not be contiguous.
class Partition {
public:
    Partition() = default;
    explicit Partition(std::vector<std::size_t> community_of);

    static Partition singletons(std::size_t n);

    std::size_t size() const noexcept { return community_of_.size(); }
    std::size_t community_of(NodeId node) const { return community_of_.at(node); }
    const std::vector<std::size_t>& assignment() const noexcept { return community_of_; }
    const std::map<std::size_t, std::set<NodeId>>& communities() const noexcept { return communities_; }

    void move(NodeId node, std::size_t community);

    /// Relabels communities 0..k-1 in order of their smallest member.
    Partition normalized() const;

    friend bool operator==(const Partition& a, const Partition& b) {
        return a.community_of_ == b.community_of_;
    }

private:
    std::vector<std::size_t> community_of_;
    std::map<std::size_t, std::set<NodeId>> communities_;
};

/// Q = Σ_c [Σ_in(c)/2m − (Σ_tot(c)/2m)²]. Throws UndefinedValue when m = 0,
/// InvalidArgument when the partition does not cover the graph.
double modularity(const WordGraph& graph, const Partition& partition);

/// Incremental ΔQ of moving `node` into `target` (0 if already there).
/// Throws InvalidArgument on an unknown node.
double modularity_gain(const WordGraph& graph, const Partition& partition, NodeId node,
                       std::size_t target);

struct LouvainResult {
    Partition partition;        ///< normalized
    std::vector<double> q_trace;  ///< singleton Q, then Q after each level
};

/// Multi-level Louvain. Node visit order is shuffled with `seed`.
LouvainResult louvain(const WordGraph& graph, std::uint64_t seed = 0, std::size_t max_passes = 32);

struct Topic {
    std::size_t id = 0;
    std::vector<std::pair<std::string, double>> keywords;  ///< descending k_u, ties lexicographic
};

/// One topic per community (id = community id). top_k = 0 keeps everything.
std::vector<Topic> extract_topics(const WordGraph& graph, const Partition& partition,
                                  std::size_t top_k = 0);

/// argmax_c Σ_{tokens in doc} k_u·[u ∈ c]; ties -> lowest id; no overlap -> nullopt.
std::optional<std::size_t> assign_topic(const TokenSequence& doc, const std::vector<Topic>& topics);

/// Σ_i Σ_{j≠i} log((D(u_i,u_j)+1) / (D(u_j)+1)) over the first top_k keywords.
double topic_coherence(const Topic& topic, const std::vector<TokenSequence>& corpus, std::size_t top_k);

/// Σ_i Σ_{j≠i} log(P(u_i,u_j) / (P(u_i)P(u_j))), P(·) = (D(·)+1)/N.
double topic_pmi(const Topic& topic, const std::vector<TokenSequence>& corpus, std::size_t top_k);

struct PrfScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Set overlap of the first k detected keywords against the truth set.
PrfScores topic_prf(const std::vector<std::string>& detected, const std::vector<std::string>& truth,
                    std::size_t k);

nlohmann::json topics_to_json(const std::vector<Topic>& topics);
std::vector<Topic> topics_from_json(const nlohmann::json& j);

} // namespace simforge
