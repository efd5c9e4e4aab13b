// Similarity, distance, divergence and correlation kernels over real vectors, plus the
// token-vector metrics built on them: greedy matching, BERTScore-style F1, Word Mover's
// Distance and SIMILE.
#pragma once

#include "simforge/embeddings.hpp"
#include "simforge/metric_result.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace simforge {

using VectorView = std::span<const double>;

double inner(VectorView a, VectorView b);
double l2_norm(VectorView a);

enum class SimilarityKind { cosine, jaccard_vec, dice_vec, overlap_vec, inner };

/// cosine: <a,b>/(|a||b|); jaccard_vec: <a,b>/(|a|²+|b|²-<a,b>);
/// dice_vec: 2<a,b>/(|a|²+|b|²); overlap_vec: <a,b>/min(|a|²,|b|²).
/// Throws InvalidArgument on a dim mismatch, UndefinedValue on zero norms.
double vector_similarity(SimilarityKind kind, VectorView a, VectorView b);

enum class DistanceFamily { lp, chebyshev, canberra, chi_square, cosine_distance };

struct DistanceKind {
    DistanceFamily family = DistanceFamily::lp;
    double p = 2.0;  ///< lp only, >= 1

    static DistanceKind minkowski(double p) { return {DistanceFamily::lp, p}; }
};

/// canberra: Σ|a-b|/(|a|+|b|); chi_square: Σ(a-b)²/(a+b). Terms with a zero
/// denominator contribute 0. Both require nonnegative components.
double vector_distance(const DistanceKind& kind, VectorView a, VectorView b);

enum class DivergenceKind { kl, js, js_distance };

/// Natural log. p and q must be probability vectors (sum 1 within 1e-9).
/// KL throws UndefinedValue where p > 0 and q == 0.
double divergence(DivergenceKind kind, VectorView p, VectorView q);

enum class CorrelationKind { pearson, spearman, kendall };

/// spearman = pearson on average ranks; kendall is tau-b.
/// Throws UndefinedValue on zero variance, InvalidArgument on dim < 2.
double correlation(CorrelationKind kind, VectorView x, VectorView y);

/// Average ranks (1-based), ties share the mean of their positions.
std::vector<double> average_ranks(VectorView x);

/// ½(mean_a max_b cos + mean_b max_a cos). Throws InvalidArgument on an empty side.
double greedy_match_similarity(const std::vector<Vector>& a, const std::vector<Vector>& b);

/// recall = mean over a of max-cos against b, precision = mean over b of
/// max-cos against a, value = harmonic mean.
MetricResult embed_f1(const std::vector<Vector>& a, const std::vector<Vector>& b);

/// Transport plan between two weighted supports, flows keyed by
/// (source index, target index). Zero flows are omitted.
struct TransportPlan {
    std::map<std::pair<std::size_t, std::size_t>, double> flows;
    double cost = 0.0;
};

/// Exact balanced transportation problem. supply and demand must be
/// nonnegative with equal sums (within 1e-9); cost is row-major
/// supply.size() x demand.size().
TransportPlan solve_transport(std::span<const double> supply, std::span<const double> demand,
                              std::span<const double> cost);

using WordMass = std::map<Token, double>;

struct WmdResult {
    double distance = 0.0;
    TransportPlan plan;
    std::vector<Token> source_words;  ///< plan row order
    std::vector<Token> target_words;  ///< plan column order
    bool relaxed = false;
};

constexpr std::size_t kWmdExactSupportCap = 64;

/// Word Mover's Distance under the L2 ground metric. Exact when both supports
/// have at most kWmdExactSupportCap words; otherwise the larger of the two
/// one-sided nearest-neighbour relaxations, with relaxed = true.
WmdResult wmd(const WordMass& a, const WordMass& b, const EmbeddingTable& table);

/// Normalised bag of words: each non-EMPTY token weighted by count / length.
WordMass word_mass(const TokenSequence& tokens);

/// exp(1 - max(len)/min(len)).
double length_penalty(std::size_t len_a, std::size_t len_b);

/// LP(len_a, len_b)^k · <a,b>. Vectors are used as given.
double simile(VectorView a, VectorView b, std::size_t len_a, std::size_t len_b, double k);

} // namespace simforge
