#include "simforge/lexical.hpp"

#include "simforge/error.hpp"

#include <algorithm>
#include <cmath>

namespace simforge {

namespace {

double harmonic(double p, double r) { return (p + r) > 0 ? 2.0 * p * r / (p + r) : 0.0; }

// F/P/R from an overlap count and the two side sizes. Both sides empty -> 1.
MetricResult overlap_f(std::string id, double overlap, double ref_size, double cand_size) {
    MetricResult res;
    res.metric_id = std::move(id);
    if (ref_size == 0 && cand_size == 0) {
        res.value = 1.0;
        res.precision = 1.0;
        res.recall = 1.0;
    } else if (ref_size == 0 || cand_size == 0) {
        res.value = 0.0;
        res.precision = 0.0;
        res.recall = 0.0;
    } else {
        res.value = 2.0 * overlap / (ref_size + cand_size);
        res.precision = overlap / cand_size;
        res.recall = overlap / ref_size;
    }
    res.detail["overlap"] = overlap;
    return res;
}

MetricResult bag_overlap_f(std::string id, const NGramBag& ref, const NGramBag& cand) {
    const double inter = static_cast<double>(bag_combine(BagOp::intersect, ref, cand).size());
    return overlap_f(std::move(id), inter, static_cast<double>(ref.size()),
                     static_cast<double>(cand.size()));
}

void require_ref(const TokenSequence& ref, const char* metric) {
    if (ref.empty()) throw InvalidArgument(std::string(metric) + ": reference is empty");
}

} // namespace

// ---------------------------------------------------------------------------
// ROUGE

MetricResult rouge_n(std::size_t n, const TokenSequence& s1, const TokenSequence& s2) {
    if (n == 0) throw InvalidArgument("rouge_n: n must be >= 1");
    return bag_overlap_f("rouge" + std::to_string(n), ngrams(strip_empty(s1), n),
                         ngrams(strip_empty(s2), n));
}

MetricResult rouge_l(const TokenSequence& s1, const TokenSequence& s2) {
    const TokenSequence a = strip_empty(s1);
    const TokenSequence b = strip_empty(s2);
    const auto len = static_cast<double>(lcs_length(a, b));
    MetricResult res = overlap_f("rougeL", len, static_cast<double>(a.size()),
                                 static_cast<double>(b.size()));
    res.detail.erase("overlap");
    res.detail["lcs_length"] = len;
    return res;
}

NGramBag skip_bigrams(const TokenSequence& seq, std::optional<std::size_t> max_skip) {
    NGramBag bag(2);
    for (std::size_t i = 0; i < seq.size(); ++i) {
        for (std::size_t j = i + 1; j < seq.size(); ++j) {
            if (max_skip && j - i > *max_skip) break;
            bag.add({seq[i], seq[j]});
        }
    }
    return bag;
}

MetricResult rouge_s(const TokenSequence& s1, const TokenSequence& s2,
                     std::optional<std::size_t> max_skip) {
    if (max_skip && *max_skip == 0) throw InvalidArgument("rouge_s: max_skip must be >= 1");
    return bag_overlap_f("rougeS", skip_bigrams(strip_empty(s1), max_skip),
                         skip_bigrams(strip_empty(s2), max_skip));
}

// ---------------------------------------------------------------------------
// Edit rates

MetricResult wer(const TokenSequence& hyp_in, const TokenSequence& ref_in) {
    const TokenSequence hyp = strip_empty(hyp_in);
    const TokenSequence ref = strip_empty(ref_in);
    require_ref(ref, "wer");
    MetricResult res;
    res.metric_id = "wer";
    res.orientation = Orientation::distance;
    const auto d = static_cast<double>(levenshtein(hyp, ref));
    res.value = d / static_cast<double>(ref.size());
    res.detail["edit_distance"] = d;
    return res;
}

MetricResult per(const TokenSequence& hyp_in, const TokenSequence& ref_in) {
    const TokenSequence hyp = strip_empty(hyp_in);
    const TokenSequence ref = strip_empty(ref_in);
    require_ref(ref, "per");
    const auto inter = static_cast<double>(
        bag_combine(BagOp::intersect, unigram_bag(hyp), unigram_bag(ref)).size());
    MetricResult res;
    res.metric_id = "per";
    res.orientation = Orientation::distance;
    const auto longest = static_cast<double>(std::max(hyp.size(), ref.size()));
    res.value = (longest - inter) / static_cast<double>(ref.size());
    res.detail["matches"] = inter;
    return res;
}

namespace {

constexpr std::size_t kMaxShiftSize = 10;

bool occurs_in(const TokenSequence& seq, std::size_t start, std::size_t len,
               const TokenSequence& ref) {
    auto first = seq.begin() + static_cast<std::ptrdiff_t>(start);
    auto last = first + static_cast<std::ptrdiff_t>(len);
    return std::search(ref.begin(), ref.end(), first, last) != ref.end();
}

TokenSequence move_block(const TokenSequence& seq, std::size_t start, std::size_t len,
                         std::size_t dest) {
    TokenSequence rest;
    rest.reserve(seq.size());
    rest.insert(rest.end(), seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(start));
    rest.insert(rest.end(), seq.begin() + static_cast<std::ptrdiff_t>(start + len), seq.end());
    rest.insert(rest.begin() + static_cast<std::ptrdiff_t>(dest),
                seq.begin() + static_cast<std::ptrdiff_t>(start),
                seq.begin() + static_cast<std::ptrdiff_t>(start + len));
    return rest;
}

} // namespace

MetricResult ter_greedy(const TokenSequence& hyp_in, const TokenSequence& ref_in,
                        std::size_t max_shift_iters) {
    TokenSequence cur = strip_empty(hyp_in);
    const TokenSequence ref = strip_empty(ref_in);
    require_ref(ref, "ter");

    std::size_t shifts = 0;
    std::size_t dist = levenshtein(cur, ref);
    // A block is only worth moving if it appears verbatim in the reference.
    for (std::size_t iter = 0; iter < max_shift_iters && dist > 0; ++iter) {
        std::size_t best_dist = dist;
        TokenSequence best;
        const std::size_t n = cur.size();
        for (std::size_t start = 0; start < n; ++start) {
            for (std::size_t len = 1; len <= std::min(kMaxShiftSize, n - start); ++len) {
                if (!occurs_in(cur, start, len, ref)) break;
                for (std::size_t dest = 0; dest + len <= n; ++dest) {
                    if (dest == start) continue;
                    TokenSequence moved = move_block(cur, start, len, dest);
                    std::size_t d = levenshtein(moved, ref);
                    if (d < best_dist) {
                        best_dist = d;
                        best = std::move(moved);
                    }
                }
            }
        }
        if (best_dist >= dist) break;
        cur = std::move(best);
        dist = best_dist;
        ++shifts;
    }

    MetricResult res;
    res.metric_id = "ter";
    res.orientation = Orientation::distance;
    res.value = static_cast<double>(shifts + dist) / static_cast<double>(ref.size());
    res.detail["shift_count"] = static_cast<double>(shifts);
    res.detail["edit_distance"] = static_cast<double>(dist);
    return res;
}

// ---------------------------------------------------------------------------
// METEOR-style F

void MeteorConfig::validate() const {
    if (stages.empty() || stages.front() != MeteorStage::exact) {
        throw InvalidArgument("meteor: stage list must be non-empty and start with exact");
    }
    if (!(recall_weight > 0.0 && recall_weight < 1.0)) {
        throw InvalidArgument("meteor: recall_weight must lie in (0, 1)");
    }
    if (penalty_gamma < 0.0) throw InvalidArgument("meteor: penalty_gamma must be >= 0");
}

Token suffix_stem(const Token& word) {
    static const char* const kSuffixes[] = {"ational", "ization", "fulness", "iveness", "ations",
                                            "ness",    "ment",    "ingly",   "edly",    "ings",
                                            "ing",     "ies",     "ied",     "ed",      "ly",
                                            "es",      "s"};
    for (const char* suffix : kSuffixes) {
        std::string_view s(suffix);
        if (word.size() >= s.size() + 3 && word.compare(word.size() - s.size(), s.size(), s) == 0) {
            return word.substr(0, word.size() - s.size());
        }
    }
    return word;
}

MetricResult meteor_lite(const TokenSequence& hyp_in, const TokenSequence& ref_in,
                         const MeteorConfig& config) {
    config.validate();
    const TokenSequence hyp = strip_empty(hyp_in);
    const TokenSequence ref = strip_empty(ref_in);

    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<std::size_t> hyp_to_ref(hyp.size(), kNone);
    std::vector<bool> ref_used(ref.size(), false);

    auto stem = [&](const Token& t) { return config.stemmer ? config.stemmer(t) : t; };
    auto synonymous = [&](const Token& h, const Token& r) {
        if (!config.synonyms) return false;
        auto it = config.synonyms->find(h);
        if (it != config.synonyms->end() && it->second.count(r)) return true;
        it = config.synonyms->find(r);
        return it != config.synonyms->end() && it->second.count(h) > 0;
    };

    for (MeteorStage stage : config.stages) {
        auto matches = [&](std::size_t i, std::size_t j) {
            switch (stage) {
            case MeteorStage::exact: return hyp[i] == ref[j];
            case MeteorStage::stem: return stem(hyp[i]) == stem(ref[j]);
            case MeteorStage::synonym: return synonymous(hyp[i], ref[j]);
            }
            return false;
        };
        for (std::size_t i = 0; i < hyp.size(); ++i) {
            if (hyp_to_ref[i] != kNone) continue;
            // Prefer continuing the previous hyp token's alignment to keep chunks long.
            std::size_t chosen = kNone;
            if (i > 0 && hyp_to_ref[i - 1] != kNone) {
                std::size_t next = hyp_to_ref[i - 1] + 1;
                if (next < ref.size() && !ref_used[next] && matches(i, next)) chosen = next;
            }
            for (std::size_t j = 0; chosen == kNone && j < ref.size(); ++j) {
                if (!ref_used[j] && matches(i, j)) chosen = j;
            }
            if (chosen != kNone) {
                hyp_to_ref[i] = chosen;
                ref_used[chosen] = true;
            }
        }
    }

    std::size_t matched = 0;
    std::size_t chunks = 0;
    std::size_t prev_ref = kNone;
    bool prev_matched = false;
    for (std::size_t i = 0; i < hyp.size(); ++i) {
        if (hyp_to_ref[i] == kNone) {
            prev_matched = false;
            continue;
        }
        ++matched;
        if (!prev_matched || hyp_to_ref[i] != prev_ref + 1) ++chunks;
        prev_ref = hyp_to_ref[i];
        prev_matched = true;
    }

    MetricResult res;
    res.metric_id = "meteor";
    res.detail["matches"] = static_cast<double>(matched);
    res.detail["chunks"] = static_cast<double>(chunks);
    if (hyp.empty() && ref.empty()) {
        res.value = 1.0;
        res.precision = res.recall = 1.0;
        return res;
    }
    if (matched == 0) {
        res.value = 0.0;
        res.precision = res.recall = 0.0;
        return res;
    }
    const auto m = static_cast<double>(matched);
    const double p = m / static_cast<double>(hyp.size());
    const double r = m / static_cast<double>(ref.size());
    const double w = config.recall_weight;
    const double f = p * r / ((1.0 - w) * p + w * r);
    const double penalty =
        config.penalty_gamma * std::pow(static_cast<double>(chunks) / m, config.penalty_power);
    res.precision = p;
    res.recall = r;
    res.value = f * (1.0 - penalty);
    res.detail["f_mean"] = f;
    res.detail["fragmentation_penalty"] = penalty;
    return res;
}

// ---------------------------------------------------------------------------
// chrF

MetricResult chrf(const TokenSequence& hyp_in, const TokenSequence& ref_in, std::size_t n,
                  double beta) {
    const TokenSequence hyp = strip_empty(hyp_in);
    const TokenSequence ref = strip_empty(ref_in);
    require_ref(ref, "chrf");
    if (n == 0) throw InvalidArgument("chrf: n must be >= 1");
    if (!(beta > 0.0)) throw InvalidArgument("chrf: beta must be > 0");

    double p_sum = 0.0, r_sum = 0.0;
    std::size_t orders = 0;
    for (std::size_t k = 1; k <= n; ++k) {
        NGramBag h = ngrams(hyp, k);
        NGramBag r = ngrams(ref, k);
        // Orders neither side can fill carry no information.
        if (h.empty() && r.empty()) continue;
        const auto inter = static_cast<double>(bag_combine(BagOp::intersect, h, r).size());
        p_sum += h.empty() ? 0.0 : inter / static_cast<double>(h.size());
        r_sum += r.empty() ? 0.0 : inter / static_cast<double>(r.size());
        ++orders;
    }
    const double p = p_sum / static_cast<double>(orders);
    const double r = r_sum / static_cast<double>(orders);
    const double b2 = beta * beta;

    MetricResult res;
    res.metric_id = "chrf";
    res.precision = p;
    res.recall = r;
    res.value = (b2 * p + r) > 0 ? (1.0 + b2) * p * r / (b2 * p + r) : 0.0;
    res.detail["orders"] = static_cast<double>(orders);
    return res;
}

// ---------------------------------------------------------------------------
// GTM

MetricResult gtm(const TokenSequence& s1_in, const TokenSequence& s2_in, double p) {
    if (!(p >= 1.0)) throw InvalidArgument("gtm: p must be >= 1");
    const TokenSequence s1 = strip_empty(s1_in);
    const TokenSequence s2 = strip_empty(s2_in);

    MetricResult res;
    res.metric_id = "gtm";
    if (s1.empty() || s2.empty()) {
        const double v = (s1.empty() && s2.empty()) ? 1.0 : 0.0;
        res.value = v;
        res.precision = res.recall = v;
        return res;
    }

    std::vector<bool> used1(s1.size(), false), used2(s2.size(), false);
    double size_sum = 0.0;
    std::size_t tiles = 0;
    while (true) {
        // Longest run of unused cells equal in both; ties leftmost in s1, then s2.
        std::size_t best_len = 0, best_i = 0, best_j = 0;
        std::vector<std::size_t> prev(s2.size() + 1, 0), cur(s2.size() + 1, 0);
        for (std::size_t i = 1; i <= s1.size(); ++i) {
            for (std::size_t j = 1; j <= s2.size(); ++j) {
                bool ok = !used1[i - 1] && !used2[j - 1] && s1[i - 1] == s2[j - 1];
                cur[j] = ok ? prev[j - 1] + 1 : 0;
                if (cur[j] == 0) continue;
                std::size_t si = i - cur[j], sj = j - cur[j];
                if (cur[j] > best_len ||
                    (cur[j] == best_len && (si < best_i || (si == best_i && sj < best_j)))) {
                    best_len = cur[j];
                    best_i = si;
                    best_j = sj;
                }
            }
            std::swap(prev, cur);
        }
        if (best_len < 1) break;
        for (std::size_t k = 0; k < best_len; ++k) {
            used1[best_i + k] = true;
            used2[best_j + k] = true;
        }
        size_sum += std::pow(static_cast<double>(best_len), p);
        ++tiles;
    }

    const double match = std::pow(size_sum, 1.0 / p);
    const double prec = match / static_cast<double>(s2.size());
    const double rec = match / static_cast<double>(s1.size());
    res.precision = prec;
    res.recall = rec;
    res.value = harmonic(prec, rec);
    res.detail["match_size"] = match;
    res.detail["tiles"] = static_cast<double>(tiles);
    return res;
}

} // namespace simforge
