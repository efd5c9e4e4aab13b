// Surface-overlap metrics: ROUGE-N/L/S, WER, PER, TER, a staged METEOR-style F, chrF and
// GTM. Argument order follows the usual evaluation convention. The ROUGE family and GTM
// take (reference, candidate); the edit-rate family, METEOR and chrF take (hypothesis,
// reference). EMPTY tokens are stripped on entry.
#pragma once

#include "simforge/metric_result.hpp"
#include "simforge/text.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace simforge {

/// F over n-gram bags: 2|b(n,s1)∩b(n,s2)| / (|b(n,s1)| + |b(n,s2)|).
/// precision = |∩|/|b(n,s2)|, recall = |∩|/|b(n,s1)|.
MetricResult rouge_n(std::size_t n, const TokenSequence& s1, const TokenSequence& s2);

/// 2·LCS / (|s1| + |s2|); detail["lcs_length"].
MetricResult rouge_l(const TokenSequence& s1, const TokenSequence& s2);

/// Ordered in-sentence pairs (i < j) with j - i <= max_skip (unbounded when
/// absent). max_skip = 1 gives plain bigrams.
NGramBag skip_bigrams(const TokenSequence& seq, std::optional<std::size_t> max_skip = std::nullopt);

MetricResult rouge_s(const TokenSequence& s1, const TokenSequence& s2,
                     std::optional<std::size_t> max_skip = std::nullopt);

/// levenshtein / |ref|. Throws InvalidArgument on empty ref.
MetricResult wer(const TokenSequence& hyp, const TokenSequence& ref);

/// (max(|hyp|,|ref|) - |bag(hyp)∩bag(ref)|) / |ref|.
MetricResult per(const TokenSequence& hyp, const TokenSequence& ref);

/// Greedy block-shift approximation of TER; detail["shift_count"],
/// detail["edit_distance"].
MetricResult ter_greedy(const TokenSequence& hyp, const TokenSequence& ref,
                        std::size_t max_shift_iters = 50);

enum class MeteorStage { exact, stem, synonym };

using Stemmer = std::function<Token(const Token&)>;
using SynonymTable = std::map<Token, std::set<Token>>;

struct MeteorConfig {
    double recall_weight = 0.9;
    std::vector<MeteorStage> stages{MeteorStage::exact};
    double penalty_gamma = 0.5;
    double penalty_power = 3.0;
    std::optional<SynonymTable> synonyms;
    Stemmer stemmer;  ///< identity when empty

    /// Throws InvalidArgument unless stages is non-empty, starts with exact
    /// and recall_weight is in (0, 1).
    void validate() const;
};

/// Small English suffix stripper usable as MeteorConfig::stemmer.
Token suffix_stem(const Token& word);

/// detail: matches, chunks, fragmentation_penalty, f_mean.
MetricResult meteor_lite(const TokenSequence& hyp, const TokenSequence& ref,
                         const MeteorConfig& config = {});

/// Character n-gram F_beta averaged over orders 1..n. Inputs are character
/// sequences (see TokenizeMode::chars). Throws InvalidArgument on empty ref.
MetricResult chrf(const TokenSequence& hyp, const TokenSequence& ref, std::size_t n = 6,
                  double beta = 2.0);

/// Greedy tiling F with run-size exponent p >= 1; detail["match_size"],
/// detail["tiles"].
MetricResult gtm(const TokenSequence& s1, const TokenSequence& s2, double p = 2.0);

} // namespace simforge
