#include "simforge/attacks.hpp"
#include "simforge/error.hpp"
#include "simforge/lexical.hpp"
#include "simforge/random.hpp"
#include "simforge/vector_metrics.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace simforge;

namespace {

std::map<Token, std::size_t> counts_of(const TokenSequence& s) {
    std::map<Token, std::size_t> c;
    for (const auto& t : s) ++c[t];
    return c;
}

bool fits(const std::map<Token, std::size_t>& have, const std::map<Token, std::size_t>& cap) {
    for (const auto& [t, n] : have) {
        auto it = cap.find(t);
        if (it == cap.end() || it->second < n) return false;
    }
    return true;
}

// Brute force: scan every window, keep the longest (leftmost) that fits.
TokenSequence bag_to_sequence_oracle(const TokenSequence& doc, std::map<Token, std::size_t> cap, std::size_t C) {
    TokenSequence out;
    while (true) {
        std::size_t best_len = 0, best_start = 0;
        for (std::size_t i = 0; i < doc.size(); ++i) {
            for (std::size_t j = i + 1; j <= doc.size(); ++j) {
                if (j - i > best_len && fits(counts_of(TokenSequence(doc.begin() + i, doc.begin() + j)), cap)) {
                    best_len = j - i;
                    best_start = i;
                }
            }
        }
        if (best_len == 0 || best_len < C) break;
        for (std::size_t i = best_start; i < best_start + best_len; ++i) {
            out.push_back(doc[i]);
            --cap[doc[i]];
        }
    }
    return out;
}

bool is_substring(const TokenSequence& doc, const TokenSequence& piece) {
    return std::search(doc.begin(), doc.end(), piece.begin(), piece.end()) != doc.end();
}

// Can `out` be cut into doc substrings, each of length >= C?
bool splits_into_runs(const TokenSequence& out, const TokenSequence& doc, std::size_t C) {
    std::vector<bool> ok(out.size() + 1, false);
    ok[0] = true;
    for (std::size_t end = 1; end <= out.size(); ++end) {
        for (std::size_t start = 0; start + C <= end && !ok[end]; ++start) {
            ok[end] = ok[start] && is_substring(doc, TokenSequence(out.begin() + start, out.begin() + end));
        }
    }
    return ok[out.size()];
}

TokenSequence random_seq(Rng& rng, std::size_t len, std::size_t alphabet) {
    TokenSequence s;
    for (std::size_t i = 0; i < len; ++i) s.push_back(std::string(1, static_cast<char>('a' + rng.index(alphabet))));
    return s;
}

const TokenSequence kRef20{"the", "council", "approved", "a", "new", "budget", "for", "the", "city", "schools",
                           "after", "a", "long", "debate", "about", "teacher", "pay", "and", "class", "sizes"};

PairScorer embed_scorer(const EmbeddingTable& table) {
    return [&table](const TokenSequence& text, const TokenSequence& ref) {
        return embed_f1(token_vectors(text, table), token_vectors(ref, table)).value;
    };
}

} // namespace

TEST(Genome, Rendering) {
    const std::vector<Token> vocab{"x", "y"};
    EXPECT_EQ(render_genome({{1, 0, 2, 0}}, vocab), (TokenSequence{"x", "y"}));
    EXPECT_THROW(render_genome({{3}}, vocab), InvalidArgument);
}

TEST(GAConfig, Validation) {
    GAConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    EXPECT_DOUBLE_EQ(cfg.mutation_for(10), 0.1);
    cfg.population = 1;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    cfg = {};
    cfg.elitism = cfg.population;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    cfg = {};
    cfg.mutation_rate = 1.5;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
}

TEST(Sampler, ReachesHighRouge1AndScoresRecompute) {
    std::set<Token> vset(kRef20.begin(), kRef20.end());
    for (const char* w : {"mayor", "vote", "park", "river", "winter", "market"}) vset.insert(w);
    const std::vector<Token> vocab(vset.begin(), vset.end());
    GAConfig cfg;
    cfg.seed = 3;
    const SamplerResult r = ga_sample_rouge_space(kRef20, vocab, cfg, 40);
    ASSERT_EQ(r.population.size(), 50u);
    EXPECT_EQ(r.searched.size(), 50u * 201u);
    double best = 0;
    for (const auto& s : r.population) {
        best = std::max(best, s.r1);
        EXPECT_EQ(s.r1, rouge_n(1, kRef20, s.text).value);
        EXPECT_EQ(s.r2, rouge_n(2, kRef20, s.text).value);
        EXPECT_EQ(s.rl, rouge_l(kRef20, s.text).value);
        for (double v : {s.r1, s.r2, s.rl}) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
    }
    EXPECT_GE(best, 0.8);
}

TEST(Sampler, DisjointVocabularyScoresZero) {
    GAConfig cfg;
    cfg.population = 10;
    cfg.generations = 20;
    const SamplerResult r = ga_sample_rouge_space({"a", "b", "c"}, {"x", "y", "z"}, cfg, 6);
    for (const auto& s : r.searched) {
        EXPECT_EQ(s.r1, 0.0);
        EXPECT_EQ(s.r2, 0.0);
        EXPECT_EQ(s.rl, 0.0);
    }
}

TEST(Sampler, DeterministicForSeed) {
    GAConfig cfg;
    cfg.population = 12;
    cfg.generations = 30;
    cfg.seed = 99;
    const TokenSequence ref{"a", "b", "c", "d", "e"};
    const std::vector<Token> vocab{"a", "b", "c", "d", "e", "f"};
    const SamplerResult x = ga_sample_rouge_space(ref, vocab, cfg, 10);
    const SamplerResult y = ga_sample_rouge_space(ref, vocab, cfg, 10);
    ASSERT_EQ(x.searched.size(), y.searched.size());
    for (std::size_t i = 0; i < x.searched.size(); ++i) EXPECT_EQ(x.searched[i].text, y.searched[i].text);
    cfg.seed = 100;
    const SamplerResult z = ga_sample_rouge_space(ref, vocab, cfg, 10);
    bool differs = false;
    for (std::size_t i = 0; i < z.population.size(); ++i) differs |= z.population[i].text != x.population[i].text;
    EXPECT_TRUE(differs);
}

TEST(Sampler, FrontIsNonDominated) {
    Rng rng(1);
    std::vector<ParetoSample> samples;
    for (int i = 0; i < 200; ++i) {
        samples.push_back({{}, static_cast<double>(rng.index(6)) / 5, static_cast<double>(rng.index(6)) / 5,
                           static_cast<double>(rng.index(6)) / 5});
    }
    const auto front = pareto_front(samples);
    ASSERT_FALSE(front.empty());
    std::set<std::size_t> in(front.begin(), front.end());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        bool dominated = false;
        for (const auto& o : samples) {
            const auto& s = samples[i];
            dominated |= o.r1 >= s.r1 && o.r2 >= s.r2 && o.rl >= s.rl && (o.r1 > s.r1 || o.r2 > s.r2 || o.rl > s.rl);
        }
        EXPECT_EQ(in.count(i) == 1, !dominated) << i;
    }
}

TEST(Sampler, Json) {
    const nlohmann::json j = to_json(ParetoSample{{"a", "b"}, 0.5, 0.25, 0.5});
    EXPECT_EQ(j["text"], "a b");
    EXPECT_EQ(j["r2"], 0.25);
}

TEST(OracleBag, Cases) {
    const TokenSequence doc{"a", "b", "a", "c"};
    EXPECT_EQ(oracle_bag(doc, {"a", "c"}), unigram_bag({"a", "c"}));
    EXPECT_TRUE(oracle_bag(doc, {"x"}).empty());
    Rng rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        const TokenSequence d = random_seq(rng, 8, 4), r = random_seq(rng, 6, 4);
        const NGramBag bag = oracle_bag(d, r);
        const auto cd = counts_of(d), cr = counts_of(r);
        std::size_t total = 0;
        for (const auto& [t, n] : cd) {
            const std::size_t expect = cr.count(t) ? std::min(n, cr.at(t)) : 0;
            EXPECT_EQ(bag.count({t}), expect);
            total += expect;
        }
        EXPECT_EQ(bag.size(), total);
    }
}

TEST(HeuristicBag, RankingAndCaps) {
    // idf: "x" rare, "the" everywhere.
    const std::vector<TokenSequence> corpus{{"the", "x"}, {"the", "y"}, {"the", "z"}, {"the"}};
    const TfIdfWeights idf = tfidf_index(corpus, false);
    const TokenSequence doc{"the", "the", "the", "x", "y", "y", "y", "z", "w", "w"};
    // tf·idf: y = 3·log4, w = 2·log4 (unseen), x = z = log4, the = 0.
    const NGramBag top3 = heuristic_bag(doc, idf, 3);
    EXPECT_EQ(top3.count({"y"}), 2u);
    EXPECT_EQ(top3.count({"w"}), 2u);
    EXPECT_EQ(top3.count({"x"}), 1u);
    EXPECT_EQ(top3.count({"z"}), 0u);
    const NGramBag all = heuristic_bag(doc, idf, 100);
    EXPECT_EQ(all.count({"the"}), 2u);
    EXPECT_EQ(all.size(), 2u + 1u + 2u + 1u + 2u);
    EXPECT_THROW(heuristic_bag(doc, idf, 0), InvalidArgument);
}

TEST(HeuristicBag, UniformIdfPicksMostFrequent) {
    const TfIdfWeights idf = tfidf_index({{"q"}});  // every doc token unseen, so idf is equal
    const NGramBag b = heuristic_bag({"a", "b", "b", "c", "c", "c", "d"}, idf, 2);
    EXPECT_EQ(b.count({"c"}), 2u);
    EXPECT_EQ(b.count({"b"}), 2u);
    EXPECT_EQ(b.count({"a"}), 0u);
}

TEST(BagToSequence, HandTraces) {
    EXPECT_EQ(bag_to_sequence({"a", "b", "c", "d"}, unigram_bag({"a", "b", "c"}), 3), (TokenSequence{"a", "b", "c"}));
    EXPECT_TRUE(bag_to_sequence({"a", "b"}, unigram_bag({"x"}), 1).empty());
    EXPECT_TRUE(bag_to_sequence({"a", "b"}, NGramBag(1), 1).empty());
    const TokenSequence doc{"the", "cat", "sat", "on", "the", "mat"};
    EXPECT_EQ(bag_to_sequence(doc, unigram_bag(doc), 1), doc);
    EXPECT_THROW(bag_to_sequence(doc, unigram_bag(doc), 0), InvalidArgument);
}

TEST(BagToSequence, MatchesBruteForceAndProperties) {
    Rng rng(4);
    for (int trial = 0; trial < 400; ++trial) {
        const TokenSequence doc = random_seq(rng, 4 + rng.index(10), 4);
        const TokenSequence wsrc = random_seq(rng, rng.index(10), 5);
        const std::size_t C = 1 + rng.index(3);
        const NGramBag W = unigram_bag(wsrc);
        const TokenSequence out = bag_to_sequence(doc, W, C);
        EXPECT_EQ(out, bag_to_sequence_oracle(doc, counts_of(wsrc), C));
        EXPECT_TRUE(fits(counts_of(out), counts_of(wsrc)));
        EXPECT_TRUE(splits_into_runs(out, doc, C));
    }
}

TEST(RougeAttack, OracleRecoversBag) {
    const TokenSequence doc{"x", "the", "cat", "y", "sat", "on", "the", "mat", "z"};
    const TokenSequence ref{"the", "cat", "sat", "on", "the", "mat"};
    AttackConfig cfg;
    cfg.cutoff = 1;
    const AttackResult r = rouge_attack(doc, ref, cfg);
    ASSERT_EQ(r.scores.size(), 4u);
    EXPECT_DOUBLE_EQ(r.scores[0].value, 1.0);
    EXPECT_EQ(r.scores[3].metric_id, "meteor");
    EXPECT_THROW(rouge_attack(doc, std::nullopt, cfg), InvalidArgument);
    cfg.mode = AttackMode::heuristic;
    EXPECT_THROW(rouge_attack(doc, ref, cfg), InvalidArgument);
}

TEST(RougeAttack, SmallerCutoffKeepsMore) {
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const TokenSequence doc = random_seq(rng, 30, 5);
        TokenSequence ref;
        const std::size_t s1 = rng.index(20), s2 = rng.index(20);
        ref.insert(ref.end(), doc.begin() + s1, doc.begin() + s1 + 6);
        ref.insert(ref.end(), doc.begin() + s2, doc.begin() + s2 + 5);
        AttackConfig c3, c4;
        c3.cutoff = 3;
        c4.cutoff = 4;
        const AttackResult a = rouge_attack(doc, ref, c3), b = rouge_attack(doc, ref, c4);
        EXPECT_GE(a.scores[0].value, b.scores[0].value - 1e-15);
        EXPECT_EQ(a.scores[0].value, rouge_n(1, ref, a.text).value);
    }
}

TEST(RougeAttack, HeuristicIgnoresReference) {
    const TokenSequence doc{"a", "b", "c", "d", "b", "e", "f"};
    const TfIdfWeights idf = tfidf_index({{"a", "b"}, {"c"}, {"d", "e"}});
    AttackConfig cfg;
    cfg.mode = AttackMode::heuristic;
    cfg.idf = &idf;
    cfg.cutoff = 2;
    const AttackResult none = rouge_attack(doc, std::nullopt, cfg);
    EXPECT_TRUE(none.scores.empty());
    TokenSequence ref{"f", "e", "d", "c"};
    for (int i = 0; i < 4; ++i) {
        std::next_permutation(ref.begin(), ref.end());
        EXPECT_EQ(rouge_attack(doc, ref, cfg).text, none.text);
    }
}

TEST(Trigger, ClosureElitismAndDeterminism) {
    const EmbeddingTable table = hashed_embeddings(16, 7);
    const PairScorer scorer = embed_scorer(table);
    const std::vector<TokenSequence> refs{{"the", "cat"}, {"a", "dog", "ran"}, {"birds", "sing"}};
    const std::vector<Token> alphabet{".", ",", "!", "?", ";", ":", "(", ")", "-", "#"};
    GAConfig cfg;
    cfg.population = 10;
    cfg.generations = 30;
    cfg.seed = 5;
    const TriggerResult r = ga_universal_trigger(refs, scorer, alphabet, cfg, 6, 0.99, 3);
    ASSERT_FALSE(r.rounds.empty());
    EXPECT_EQ(r.trigger.size(), 6u);
    for (const auto& t : r.trigger) EXPECT_NE(std::find(alphabet.begin(), alphabet.end(), t), alphabet.end());
    for (const auto& round : r.rounds) {
        for (std::size_t g = 1; g < round.best_fitness.size(); ++g) {
            EXPECT_GE(round.best_fitness[g], round.best_fitness[g - 1]);
        }
    }
    double best = -1;
    for (const auto& round : r.rounds) best = std::max(best, round.min_score);
    EXPECT_EQ(r.min_score, best);
    EXPECT_EQ(r.min_score, *std::min_element(r.ref_scores.begin(), r.ref_scores.end()));
    EXPECT_EQ(r.rounds[0].target, 0u);
    const TriggerResult again = ga_universal_trigger(refs, scorer, alphabet, cfg, 6, 0.99, 3);
    EXPECT_EQ(again.trigger, r.trigger);
    EXPECT_EQ(to_json(again), to_json(r));
}

TEST(Trigger, StopsAtThreshold) {
    const PairScorer constant = [](const TokenSequence&, const TokenSequence&) { return 0.95; };
    GAConfig cfg;
    cfg.population = 4;
    const TriggerResult r = ga_universal_trigger({{"a"}, {"b"}}, constant, {".", "!"}, cfg, 3);
    EXPECT_EQ(r.rounds.size(), 1u);
    EXPECT_EQ(r.rounds[0].best_fitness.size(), 1u);
}

TEST(Trigger, Errors) {
    const PairScorer s = [](const TokenSequence&, const TokenSequence&) { return 0.0; };
    GAConfig cfg;
    cfg.population = 4;
    EXPECT_THROW(ga_universal_trigger({{"a"}}, s, {}, cfg, 3), InvalidArgument);
    EXPECT_THROW(ga_universal_trigger({{"a"}}, s, {".", "a1"}, cfg, 3), InvalidArgument);
    EXPECT_THROW(ga_universal_trigger({}, s, {"."}, cfg, 3), InvalidArgument);
}

TEST(Probe, Statistics) {
    const EmbeddingTable table = hashed_embeddings(16, 7);
    const PairScorer scorer = embed_scorer(table);
    std::vector<TokenSequence> refs;
    Rng rng(6);
    for (int i = 0; i < 20; ++i) {
        TokenSequence r;
        for (std::size_t k = 0, n = 3 + rng.index(5); k < n; ++k) r.push_back("w" + std::to_string(rng.index(40)));
        refs.push_back(r);
    }
    const ProbeStats self = backdoor_probe(refs[3], refs, scorer);
    EXPECT_NEAR(self.max, 1.0, 1e-12);
    const ProbeStats dot = backdoor_probe({"."}, refs, scorer);
    EXPECT_LE(dot.min, dot.mean);
    EXPECT_LE(dot.mean, dot.max);
    const ProbeStats again = backdoor_probe({"."}, refs, scorer);
    EXPECT_EQ(dot.mean, again.mean);
    EXPECT_EQ(dot.min, again.min);
    EXPECT_EQ(dot.max, again.max);
    EXPECT_THROW(backdoor_probe({"."}, {}, scorer), InvalidArgument);
}

TEST(Sanitize, Flags) {
    const SanitizeReport scrambled = sanitize("\x03\x18$$$$%%^^&&**!!");
    EXPECT_FALSE(scrambled.passed);
    EXPECT_TRUE(scrambled.has(SanitizeFlagKind::non_alnum_run));
    EXPECT_TRUE(scrambled.has(SanitizeFlagKind::low_letter_ratio));

    const SanitizeReport clean = sanitize("The cat sat.");
    EXPECT_TRUE(clean.passed);
    EXPECT_TRUE(clean.flags.empty());

    std::string rep;
    for (int i = 0; i < 12; ++i) rep += "word ";
    const SanitizeReport r = sanitize(rep);
    ASSERT_TRUE(r.has(SanitizeFlagKind::excessive_repetition));
    EXPECT_EQ(r.flags[0].token, "word");
    EXPECT_EQ(r.flags[0].value, 12.0);
    std::string eight;
    for (int i = 0; i < 8; ++i) eight += "word ";
    EXPECT_TRUE(sanitize(eight).passed);

    const SanitizeReport blank = sanitize("  \t\n");
    EXPECT_EQ(blank.flags.size(), 1u);
    EXPECT_TRUE(blank.has(SanitizeFlagKind::empty));
    EXPECT_TRUE(sanitize("").has(SanitizeFlagKind::empty));

    const SanitizeReport digits = sanitize("12345 678");
    EXPECT_TRUE(digits.has(SanitizeFlagKind::low_letter_ratio));
    EXPECT_FALSE(digits.has(SanitizeFlagKind::non_alnum_run));
    EXPECT_TRUE(sanitize("café naïve résumé").passed);
}

TEST(Sanitize, PassedIffNoFlags) {
    Rng rng(7);
    const std::string chars = "ab .!$#1 ";
    for (int trial = 0; trial < 500; ++trial) {
        std::string text;
        for (std::size_t i = 0, n = rng.index(30); i < n; ++i) text += chars[rng.index(chars.size())];
        const SanitizeReport r = sanitize(text, {3, 2, 0.5});
        EXPECT_EQ(r.passed, r.flags.empty());
        const nlohmann::json j = to_json(r);
        EXPECT_EQ(j["passed"], r.passed);
        EXPECT_EQ(j["flags"].size(), r.flags.size());
    }
}
