#include "simforge/registry.hpp"

#include "simforge/error.hpp"
#include "simforge/lexical.hpp"
#include "simforge/vector_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace simforge {

const std::vector<MetricInfo>& metric_catalog() {
    using O = Orientation;
    static const std::vector<MetricInfo> catalog{
        {"rouge1", O::similarity},  {"rouge2", O::similarity},  {"rougeL", O::similarity},
        {"rougeS", O::similarity},  {"wer", O::distance},       {"per", O::distance},
        {"ter", O::distance},       {"meteor", O::similarity},  {"chrf", O::similarity},
        {"gtm", O::similarity},     {"jaccard", O::similarity}, {"dice", O::similarity},
        {"ochiai", O::similarity},  {"overlap", O::similarity}, {"tversky", O::similarity},
        {"cosine", O::similarity, true},  {"embedf1", O::similarity, true},
        {"greedy", O::similarity, true},  {"wmd", O::distance, true},
        {"simile", O::similarity, true},  {"ngd", O::distance, false, true},
    };
    return catalog;
}

const MetricInfo& metric_info(std::string_view id) {
    for (const auto& m : metric_catalog()) {
        if (m.id == id) return m;
    }
    throw InvalidArgument("unknown metric '" + std::string(id) + "'");
}

namespace {

MetricResult plain(std::string id, double value, Orientation o) {
    MetricResult r;
    r.metric_id = std::move(id);
    r.value = value;
    r.orientation = o;
    return r;
}

Vector unit_mean(const TokenSequence& seq, const EmbeddingTable& table) {
    Vector v = doc_vector(seq, table, DocVectorMode::mean);
    const double n = l2_norm(v);
    if (n > 0.0) {
        for (auto& x : v) x /= n;
    }
    return v;
}

TokenSequence characters(const TokenSequence& seq) { return tokenize(render(seq), TokenizeMode::chars); }

// Mean over `from` of the smallest defined NGD to any token of `to`.
double directed_ngd(const TokenSequence& from, const TokenSequence& to, const CountIndex& index) {
    double sum = 0.0;
    for (const auto& x : from) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& y : to) {
            try {
                best = std::min(best, ngd(x, y, index));
            } catch (const UndefinedValue&) {
            }
        }
        if (!std::isfinite(best)) throw UndefinedValue("NGD undefined for every pairing of '" + x + "'");
        sum += best;
    }
    return sum / static_cast<double>(from.size());
}

} // namespace

MetricResult score_pair(std::string_view id, const TokenSequence& hyp_in, const TokenSequence& ref_in,
                        const MetricContext& ctx) {
    const MetricInfo& info = metric_info(id);
    if (info.needs_embeddings && ctx.embeddings == nullptr) {
        throw InvalidArgument("metric '" + info.id + "' needs embeddings");
    }
    if (info.needs_counts && ctx.counts == nullptr) {
        throw InvalidArgument("metric '" + info.id + "' needs a count index");
    }
    const TokenSequence hyp = strip_empty(hyp_in);
    const TokenSequence ref = strip_empty(ref_in);

    if (id == "rouge1") return rouge_n(1, ref, hyp);
    if (id == "rouge2") return rouge_n(2, ref, hyp);
    if (id == "rougeL") return rouge_l(ref, hyp);
    if (id == "rougeS") return rouge_s(ref, hyp, ctx.rouge_s_skip);
    if (id == "wer") return wer(hyp, ref);
    if (id == "per") return per(hyp, ref);
    if (id == "ter") return ter_greedy(hyp, ref);
    if (id == "meteor") return meteor_lite(hyp, ref);
    if (id == "chrf") return chrf(characters(hyp), characters(ref));
    if (id == "gtm") return gtm(ref, hyp);

    const auto coefficient = [&](CoefficientKind kind) {
        return plain(info.id, bag_coefficient(kind, unigram_bag(hyp), unigram_bag(ref)), info.orientation);
    };
    if (id == "jaccard") return coefficient({CoefficientFamily::jaccard_set});
    if (id == "dice") return coefficient({CoefficientFamily::dice});
    if (id == "ochiai") return coefficient({CoefficientFamily::ochiai});
    if (id == "overlap") return coefficient({CoefficientFamily::overlap});
    if (id == "tversky") return coefficient(CoefficientKind::tversky(ctx.tversky_alpha, ctx.tversky_beta));

    const EmbeddingTable* table = ctx.embeddings;
    if (id == "cosine") {
        const Vector a = unit_mean(hyp, *table), b = unit_mean(ref, *table);
        return plain(info.id, vector_similarity(SimilarityKind::cosine, a, b), info.orientation);
    }
    if (id == "embedf1") return embed_f1(token_vectors(hyp, *table), token_vectors(ref, *table));
    if (id == "greedy") {
        const double g = greedy_match_similarity(token_vectors(hyp, *table), token_vectors(ref, *table));
        return plain(info.id, g, info.orientation);
    }
    if (id == "wmd") {
        const WmdResult w = wmd(word_mass(hyp), word_mass(ref), *table);
        MetricResult r = plain(info.id, w.distance, info.orientation);
        r.detail["relaxed"] = w.relaxed ? 1.0 : 0.0;
        return r;
    }
    if (id == "simile") {
        const Vector a = unit_mean(hyp, *table), b = unit_mean(ref, *table);
        return plain(info.id, simile(a, b, hyp.size(), ref.size(), ctx.simile_k), info.orientation);
    }
    // ngd
    if (hyp.empty() || ref.empty()) throw InvalidArgument("ngd needs non-empty inputs");
    const double d = 0.5 * (directed_ngd(hyp, ref, *ctx.counts) + directed_ngd(ref, hyp, *ctx.counts));
    return plain(info.id, d, info.orientation);
}

} // namespace simforge
