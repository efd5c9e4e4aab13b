#include "simforge/error.hpp"
#include "simforge/lexical.hpp"
#include "simforge/registry.hpp"
#include "simforge/vector_metrics.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace simforge;

namespace {

struct Fixture {
    EmbeddingTable table = hashed_embeddings(12, 4);
    CountIndex counts = build_count_index({{"the", "cat", "sat"}, {"the", "dog", "sat"}, {"a", "cat"}, {"dog"}});
    MetricContext ctx() const {
        MetricContext c;
        c.embeddings = &table;
        c.counts = &counts;
        return c;
    }
};

} // namespace

TEST(Registry, CatalogIsComplete) {
    const std::set<std::string> expected{"rouge1", "rouge2", "rougeL", "rougeS", "wer",    "per",    "ter",
                                         "meteor", "chrf",   "gtm",    "jaccard", "dice",  "ochiai", "overlap",
                                         "tversky", "cosine", "embedf1", "greedy", "wmd",  "simile", "ngd"};
    std::set<std::string> ids;
    for (const auto& m : metric_catalog()) ids.insert(m.id);
    EXPECT_EQ(ids, expected);
    EXPECT_EQ(metric_info("wmd").orientation, Orientation::distance);
    EXPECT_TRUE(metric_info("wmd").needs_embeddings);
    EXPECT_TRUE(metric_info("ngd").needs_counts);
    EXPECT_FALSE(metric_info("rouge1").needs_embeddings);
    EXPECT_THROW(metric_info("bleu"), InvalidArgument);
}

TEST(Registry, EveryMetricScoresAndIsLabelled) {
    const Fixture f;
    const TokenSequence hyp{"the", "cat", "sat"}, ref{"the", "dog", "sat"};
    for (const auto& m : metric_catalog()) {
        const MetricResult r = score_pair(m.id, hyp, ref, f.ctx());
        EXPECT_EQ(r.metric_id, m.id);
        EXPECT_EQ(r.orientation, m.orientation) << m.id;
        EXPECT_TRUE(std::isfinite(r.value)) << m.id;
        const MetricResult self = score_pair(m.id, ref, ref, f.ctx());
        if (m.orientation == Orientation::similarity) {
            EXPECT_NEAR(self.value, m.id == "meteor" ? 1 - 0.5 / 27.0 : 1.0, 1e-12) << m.id;
            EXPECT_GE(r.value, -1.0);
            EXPECT_LE(r.value, 1.0 + 1e-12);
        } else {
            EXPECT_NEAR(self.value, 0.0, 1e-12) << m.id;
        }
    }
}

TEST(Registry, ArgumentOrder) {
    const TokenSequence hyp{"a", "b"}, ref{"a", "b", "c", "d"};
    const MetricResult r1 = score_pair("rouge1", hyp, ref);
    EXPECT_NEAR(*r1.precision, 1.0, 1e-12);
    EXPECT_NEAR(*r1.recall, 0.5, 1e-12);
    EXPECT_NEAR(score_pair("wer", hyp, ref).value, 0.5, 1e-12);
    EXPECT_EQ(score_pair("meteor", hyp, ref).value, meteor_lite(hyp, ref).value);
    EXPECT_EQ(score_pair("gtm", hyp, ref).value, gtm(ref, hyp).value);
}

TEST(Registry, ChrfWorksOnCharacters) {
    EXPECT_NEAR(score_pair("chrf", {"abcd"}, {"abce"}).value, chrf({"a", "b", "c", "d"}, {"a", "b", "c", "e"}).value,
                1e-12);
}

TEST(Registry, MissingResources) {
    EXPECT_THROW(score_pair("cosine", {"a"}, {"a"}), InvalidArgument);
    EXPECT_THROW(score_pair("ngd", {"a"}, {"a"}), InvalidArgument);
    EXPECT_THROW(score_pair("nope", {"a"}, {"a"}), InvalidArgument);
}

TEST(Registry, NgdUndefinedToken) {
    const Fixture f;
    EXPECT_THROW(score_pair("ngd", {"zebra"}, {"cat"}, f.ctx()), UndefinedValue);
}

TEST(Registry, SimileUsesUnitVectors) {
    const Fixture f;
    MetricContext c = f.ctx();
    c.simile_k = 0.0;
    const double s = score_pair("simile", {"cat", "dog"}, {"dog"}, c).value;
    EXPECT_NEAR(s, score_pair("cosine", {"cat", "dog"}, {"dog"}, c).value, 1e-12);
    c.simile_k = 1.0;
    EXPECT_NEAR(score_pair("simile", {"cat", "dog"}, {"dog"}, c).value, s * std::exp(-1.0), 1e-12);
}

TEST(Registry, EmptyTokensIgnored) {
    EXPECT_EQ(score_pair("rouge2", {"a", kEmptyToken, "b"}, {"a", "b"}).value, 1.0);
}
