#include "simforge/error.hpp"
#include "simforge/lexical.hpp"
#include "simforge/random.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <map>

using namespace simforge;

namespace {

TokenSequence random_seq(Rng& rng, std::size_t max_len, std::size_t alphabet, std::size_t min_len = 0) {
    const std::size_t len = min_len + rng.index(max_len - min_len + 1);
    TokenSequence s;
    for (std::size_t i = 0; i < len; ++i) s.push_back(std::string(1, static_cast<char>('a' + rng.index(alphabet))));
    return s;
}

std::map<TokenSequence, int> gram_counts(const TokenSequence& s, std::size_t n) {
    std::map<TokenSequence, int> out;
    for (std::size_t i = 0; i + n <= s.size(); ++i) ++out[TokenSequence(s.begin() + i, s.begin() + i + n)];
    return out;
}

double bag_f_oracle(const std::map<TokenSequence, int>& a, const std::map<TokenSequence, int>& b) {
    int na = 0, nb = 0, inter = 0;
    for (const auto& [k, v] : a) {
        na += v;
        if (auto it = b.find(k); it != b.end()) inter += std::min(v, it->second);
    }
    for (const auto& [k, v] : b) nb += v;
    if (na == 0 && nb == 0) return 1.0;
    if (na == 0 || nb == 0) return 0.0;
    return 2.0 * inter / (na + nb);
}

std::size_t lcs_oracle(const TokenSequence& a, std::size_t i, const TokenSequence& b, std::size_t j) {
    if (i == a.size() || j == b.size()) return 0;
    if (a[i] == b[j]) return 1 + lcs_oracle(a, i + 1, b, j + 1);
    return std::max(lcs_oracle(a, i + 1, b, j), lcs_oracle(a, i, b, j + 1));
}

std::size_t edit_oracle(const TokenSequence& a, std::size_t i, const TokenSequence& b, std::size_t j) {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    if (a[i] == b[j]) return edit_oracle(a, i + 1, b, j + 1);
    return 1 + std::min({edit_oracle(a, i + 1, b, j), edit_oracle(a, i, b, j + 1), edit_oracle(a, i + 1, b, j + 1)});
}

TokenSequence chars(const std::string& s) {
    TokenSequence out;
    for (char c : s) out.push_back(std::string(1, c));
    return out;
}

const TokenSequence kIndexRef{"83", "67", "79", "85", "82", "73", "78", "71"};
const TokenSequence kIndexCand{"83", "67", "79", "82", "73", "78", "71"};

} // namespace

TEST(Rouge, IndexSequences) {
    EXPECT_NEAR(rouge_n(1, kIndexRef, kIndexCand).value, 14.0 / 15.0, 1e-12);
    EXPECT_NEAR(rouge_n(2, kIndexRef, kIndexCand).value, 10.0 / 13.0, 1e-12);
    const MetricResult rl = rouge_l(kIndexRef, kIndexCand);
    EXPECT_NEAR(rl.value, 14.0 / 15.0, 1e-12);
    EXPECT_DOUBLE_EQ(rl.detail.at("lcs_length"), 7.0);
}

TEST(Rouge, PrecisionAndRecallSides) {
    const MetricResult r = rouge_n(1, kIndexRef, kIndexCand);
    EXPECT_NEAR(*r.precision, 1.0, 1e-12);
    EXPECT_NEAR(*r.recall, 7.0 / 8.0, 1e-12);
}

TEST(Rouge, EmptyConventions) {
    EXPECT_DOUBLE_EQ(rouge_n(1, {}, {}).value, 1.0);
    EXPECT_DOUBLE_EQ(rouge_n(1, {"a"}, {}).value, 0.0);
    EXPECT_DOUBLE_EQ(rouge_n(2, {"a"}, {"a"}).value, 1.0);
    EXPECT_DOUBLE_EQ(rouge_l({}, {}).value, 1.0);
    EXPECT_DOUBLE_EQ(rouge_l({}, {"a"}).value, 0.0);
    EXPECT_THROW(rouge_n(0, {"a"}, {"a"}), InvalidArgument);
}

TEST(Rouge, EmptyTokensAreStripped) {
    EXPECT_DOUBLE_EQ(rouge_n(2, {"a", kEmptyToken, "b"}, {"a", "b"}).value, 1.0);
}

TEST(Rouge, ReversedDistinctTokens) {
    const TokenSequence x{"a", "b", "c", "d", "e"};
    TokenSequence r(x.rbegin(), x.rend());
    EXPECT_NEAR(rouge_l(x, r).value, 1.0 / 5.0, 1e-12);
}

TEST(Rouge, MatchesBagOracle) {
    Rng rng(101);
    for (int trial = 0; trial < 500; ++trial) {
        const TokenSequence a = random_seq(rng, 6, 3), b = random_seq(rng, 6, 3);
        for (std::size_t n : {1u, 2u, 3u}) {
            const double v = rouge_n(n, a, b).value;
            EXPECT_NEAR(v, bag_f_oracle(gram_counts(a, n), gram_counts(b, n)), 1e-12);
            EXPECT_DOUBLE_EQ(v, rouge_n(n, b, a).value);
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
        const double lcs = static_cast<double>(lcs_oracle(a, 0, b, 0));
        const double expected = a.empty() && b.empty() ? 1.0 : 2.0 * lcs / static_cast<double>(a.size() + b.size());
        EXPECT_NEAR(rouge_l(a, b).value, expected, 1e-12);
        EXPECT_DOUBLE_EQ(rouge_n(1, a, a).value, 1.0);
        EXPECT_DOUBLE_EQ(rouge_l(a, a).value, 1.0);
    }
}

TEST(RougeS, HandEnumeratedPairs) {
    EXPECT_DOUBLE_EQ(rouge_s({"a", "b", "c"}, {"a", "c"}).value, 0.5);
    const NGramBag sb = skip_bigrams({"a", "b", "c"});
    EXPECT_EQ(sb.size(), 3u);
    EXPECT_EQ(sb.count({"a", "c"}), 1u);
    EXPECT_EQ(skip_bigrams({"a", "b", "c", "d"}, 2).size(), 5u);
}

TEST(RougeS, IdenticalAndSkipOne) {
    Rng rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        const TokenSequence a = random_seq(rng, 7, 3, 2), b = random_seq(rng, 7, 3, 2);
        EXPECT_DOUBLE_EQ(rouge_s(a, a).value, 1.0);
        EXPECT_NEAR(rouge_s(a, b, 1).value, rouge_n(2, a, b).value, 1e-12);
    }
}

TEST(RougeS, MatchesPairOracle) {
    Rng rng(9);
    for (int trial = 0; trial < 300; ++trial) {
        const TokenSequence a = random_seq(rng, 6, 3), b = random_seq(rng, 6, 3);
        const std::size_t skip = 1 + rng.index(4);
        auto pairs = [&](const TokenSequence& s) {
            std::map<TokenSequence, int> out;
            for (std::size_t i = 0; i < s.size(); ++i) {
                for (std::size_t j = i + 1; j < s.size() && j - i <= skip; ++j) ++out[{s[i], s[j]}];
            }
            return out;
        };
        EXPECT_NEAR(rouge_s(a, b, skip).value, bag_f_oracle(pairs(a), pairs(b)), 1e-12);
    }
}

TEST(Wer, Basics) {
    EXPECT_DOUBLE_EQ(wer({"a", "b"}, {"a", "b"}).value, 0.0);
    EXPECT_DOUBLE_EQ(wer({}, {"a", "b", "c"}).value, 1.0);
    EXPECT_DOUBLE_EQ(wer({"x", "y", "z", "w"}, {"a"}).value, 4.0);
    EXPECT_EQ(wer({"a"}, {"a"}).orientation, Orientation::distance);
    EXPECT_THROW(wer({"a"}, {}), InvalidArgument);
}

TEST(Wer, MatchesEditOracle) {
    for (std::size_t la = 0; la <= 4; ++la) {
        for (std::size_t lb = 1; lb <= 4; ++lb) {
            std::size_t total = 1;
            for (std::size_t i = 0; i < la + lb; ++i) total *= 2;
            for (std::size_t code = 0; code < total; ++code) {
                TokenSequence a, b;
                for (std::size_t i = 0; i < la + lb; ++i) {
                    const Token t = (code >> i) & 1 ? "b" : "a";
                    (i < la ? a : b).push_back(t);
                }
                EXPECT_NEAR(wer(a, b).value, static_cast<double>(edit_oracle(a, 0, b, 0)) / lb, 1e-12);
            }
        }
    }
}

TEST(Per, Basics) {
    EXPECT_DOUBLE_EQ(per({"c", "a", "b"}, {"a", "b", "c"}).value, 0.0);
    EXPECT_NEAR(per({"a", "a", "b"}, {"a", "b", "c"}).value, 1.0 / 3.0, 1e-12);
    EXPECT_THROW(per({"a"}, {}), InvalidArgument);
}

TEST(Ter, BlockShift) {
    const MetricResult r = ter_greedy({"c", "d", "a", "b"}, {"a", "b", "c", "d"});
    EXPECT_DOUBLE_EQ(r.value, 0.25);
    EXPECT_DOUBLE_EQ(r.detail.at("shift_count"), 1.0);
    EXPECT_DOUBLE_EQ(r.detail.at("edit_distance"), 0.0);
    EXPECT_THROW(ter_greedy({"a"}, {}), InvalidArgument);
}

TEST(Ter, SingleMoveOptimumByExhaustion) {
    const TokenSequence hyp{"c", "d", "a", "b"}, ref{"a", "b", "c", "d"};
    std::size_t best = edit_oracle(hyp, 0, ref, 0);
    for (std::size_t i = 0; i < hyp.size(); ++i) {
        for (std::size_t len = 1; i + len <= hyp.size(); ++len) {
            TokenSequence rest(hyp.begin(), hyp.begin() + i);
            rest.insert(rest.end(), hyp.begin() + i + len, hyp.end());
            for (std::size_t pos = 0; pos <= rest.size(); ++pos) {
                TokenSequence moved(rest.begin(), rest.begin() + pos);
                moved.insert(moved.end(), hyp.begin() + i, hyp.begin() + i + len);
                moved.insert(moved.end(), rest.begin() + pos, rest.end());
                best = std::min(best, edit_oracle(moved, 0, ref, 0));
            }
        }
    }
    EXPECT_EQ(best, 0u);
}

TEST(EditRates, OrderingAndIdentity) {
    Rng rng(33);
    for (int trial = 0; trial < 1000; ++trial) {
        const TokenSequence h = random_seq(rng, 7, 4), r = random_seq(rng, 7, 4, 1);
        const double w = wer(h, r).value;
        EXPECT_LE(per(h, r).value, w + 1e-12);
        if (trial < 500) {
            EXPECT_LE(ter_greedy(h, r).value, w + 1e-12);
            EXPECT_DOUBLE_EQ(ter_greedy(r, r).value, 0.0);
        }
        EXPECT_DOUBLE_EQ(wer(r, r).value, 0.0);
        EXPECT_DOUBLE_EQ(per(r, r).value, 0.0);
    }
}

TEST(Meteor, IdenticalInputsCarryOneChunk) {
    const MetricResult r = meteor_lite({"a", "b", "c"}, {"a", "b", "c"});
    EXPECT_NEAR(r.value, 1.0 - 0.5 / 27.0, 1e-12);
    EXPECT_DOUBLE_EQ(r.detail.at("matches"), 3.0);
    EXPECT_DOUBLE_EQ(r.detail.at("chunks"), 1.0);
}

TEST(Meteor, EqualPrecisionRecall) {
    // P = R = 2/3, one chunk of 2 matches.
    const MetricResult r = meteor_lite({"a", "b", "x"}, {"a", "b", "y"});
    EXPECT_NEAR(r.detail.at("f_mean"), 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(r.value, 2.0 / 3.0 * (1.0 - 0.5 / 8.0), 1e-12);
}

TEST(Meteor, AsymmetricWeighting) {
    // P = 1, R = 1/2 one way; swapped the other.
    const MetricResult a = meteor_lite({"a"}, {"a", "b"});
    const MetricResult b = meteor_lite({"a", "b"}, {"a"});
    EXPECT_NEAR(a.detail.at("f_mean"), 0.5 / (0.1 + 0.9 * 0.5), 1e-12);
    EXPECT_NEAR(b.detail.at("f_mean"), 0.5 / (0.1 * 0.5 + 0.9), 1e-12);
    EXPECT_NE(a.value, b.value);
}

TEST(Meteor, NoMatchesIsZero) {
    EXPECT_DOUBLE_EQ(meteor_lite({"a"}, {"b"}).value, 0.0);
}

TEST(Meteor, StemAndSynonymStages) {
    MeteorConfig cfg;
    cfg.stages = {MeteorStage::exact, MeteorStage::stem, MeteorStage::synonym};
    cfg.stemmer = suffix_stem;
    cfg.synonyms = SynonymTable{{"big", {"large"}}};
    EXPECT_DOUBLE_EQ(meteor_lite({"big"}, {"large"}, cfg).detail.at("matches"), 1.0);
    EXPECT_DOUBLE_EQ(meteor_lite({"cats"}, {"cat"}, cfg).detail.at("matches"), 1.0);
    EXPECT_DOUBLE_EQ(meteor_lite({"cats"}, {"cat"}).detail.at("matches"), 0.0);
}

TEST(Meteor, ConfigValidation) {
    MeteorConfig cfg;
    cfg.stages = {MeteorStage::stem};
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    cfg.stages = {};
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    MeteorConfig w;
    w.recall_weight = 1.0;
    EXPECT_THROW(w.validate(), InvalidArgument);
}

TEST(Meteor, BoundedOnRandomPairs) {
    Rng rng(4);
    for (int trial = 0; trial < 300; ++trial) {
        const double v = meteor_lite(random_seq(rng, 8, 4), random_seq(rng, 8, 4)).value;
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(Chrf, HandEnumeratedBigrams) {
    // unigrams 3/4 each side, bigrams {ab,bc} of 3: P = R = (3/4 + 2/3) / 2.
    EXPECT_NEAR(chrf(chars("abcd"), chars("abce"), 2, 2.0).value, 17.0 / 24.0, 1e-12);
    // P = 1, R = 2/3: 5·(2/3) / (4 + 2/3).
    EXPECT_NEAR(chrf(chars("ab"), chars("abc"), 1, 2.0).value, 5.0 / 7.0, 1e-12);
}

TEST(Chrf, IdentityAndErrors) {
    EXPECT_DOUBLE_EQ(chrf(chars("hello"), chars("hello")).value, 1.0);
    EXPECT_THROW(chrf(chars("a"), {}), InvalidArgument);
}

TEST(Chrf, EqualPrecisionRecallIgnoresBeta) {
    for (double beta : {0.5, 1.0, 2.0, 3.0}) {
        EXPECT_NEAR(chrf(chars("abcd"), chars("abce"), 2, beta).value, 17.0 / 24.0, 1e-12);
    }
}

TEST(Gtm, SingleTile) {
    const MetricResult r = gtm({"a", "b", "c", "x"}, {"a", "b", "c", "y"}, 2.0);
    EXPECT_NEAR(r.value, 0.75, 1e-12);
    EXPECT_NEAR(r.detail.at("match_size"), 3.0, 1e-12);
    EXPECT_DOUBLE_EQ(gtm({"a", "b"}, {"a", "b"}, 2.0).value, 1.0);
    EXPECT_DOUBLE_EQ(gtm({}, {}, 2.0).value, 1.0);
    EXPECT_DOUBLE_EQ(gtm({"a"}, {}, 2.0).value, 0.0);
}

TEST(Gtm, LongerRunsRewarded) {
    // Two tiles of 2 vs one of 4 at p = 2.
    const double split = gtm({"a", "b", "c", "d"}, {"c", "d", "a", "b"}, 2.0).value;
    EXPECT_NEAR(split, std::sqrt(8.0) / 4.0, 1e-12);
    EXPECT_LT(split, gtm({"a", "b", "c", "d"}, {"a", "b", "c", "d"}, 2.0).value);
}

TEST(Gtm, UnitExponentEqualsRouge1WhenTilingRecoversBag) {
    const std::vector<std::pair<TokenSequence, TokenSequence>> fixtures{
        {{"a", "b", "c", "d"}, {"c", "d", "a", "b"}},
        {{"a", "b", "x", "c"}, {"c", "a", "b", "y"}},
        {{"p", "q", "r"}, {"r", "q", "p", "s"}},
        {{"the", "cat", "sat"}, {"a", "cat", "sat", "down"}},
    };
    for (const auto& [s1, s2] : fixtures) {
        EXPECT_NEAR(gtm(s1, s2, 1.0).value, rouge_n(1, s1, s2).value, 1e-12);
    }
    EXPECT_THROW(gtm({"a"}, {"a"}, 0.5), InvalidArgument);
}
