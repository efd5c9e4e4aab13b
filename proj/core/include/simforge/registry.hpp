// Metric ids shared by the CLI and the test suites.
#pragma once

#include "simforge/embeddings.hpp"
#include "simforge/metric_result.hpp"
#include "simforge/set_metrics.hpp"
#include "simforge/text.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace simforge {

struct MetricInfo {
    std::string id;
    Orientation orientation;
    bool needs_embeddings = false;
    bool needs_counts = false;
};

struct MetricContext {
    const EmbeddingTable* embeddings = nullptr;
    const CountIndex* counts = nullptr;
    double tversky_alpha = 0.5;
    double tversky_beta = 0.5;
    double simile_k = 0.25;
    std::optional<std::size_t> rouge_s_skip;  ///< unlimited when unset
};

/// rouge1 rouge2 rougeL rougeS wer per ter meteor chrf gtm jaccard dice
/// ochiai overlap tversky cosine embedf1 greedy wmd simile ngd.
const std::vector<MetricInfo>& metric_catalog();

/// Throws InvalidArgument on an unknown id.
const MetricInfo& metric_info(std::string_view id);

/// Scores hyp against ref. Set coefficients work on unigram bags; cosine
/// and simile use unit-length mean token vectors; ngd is the symmetric mean
/// of each token's nearest NGD on the other side. chrf re-splits the
/// rendered text into characters.
MetricResult score_pair(std::string_view id, const TokenSequence& hyp, const TokenSequence& ref,
                        const MetricContext& ctx = {});

} // namespace simforge
