#include "simforge/attacks.hpp"
#include "simforge/clustop.hpp"
#include "simforge/lexical.hpp"
#include "simforge/random.hpp"
#include "simforge/text.hpp"
#include "simforge/vector_metrics.hpp"

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

using namespace simforge;

namespace {

TokenSequence random_sequence(std::size_t len, std::size_t vocab, std::uint64_t seed) {
    Rng rng(seed);
    TokenSequence s;
    for (std::size_t i = 0; i < len; ++i) s.push_back("w" + std::to_string(rng.index(vocab)));
    return s;
}

void BM_RougeN(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = random_sequence(n, 200, 1), b = random_sequence(n, 200, 2);
    for (auto _ : state) benchmark::DoNotOptimize(rouge_n(2, a, b));
}
BENCHMARK(BM_RougeN)->Range(16, 4096);

void BM_RougeL(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = random_sequence(n, 50, 1), b = random_sequence(n, 50, 2);
    for (auto _ : state) benchmark::DoNotOptimize(rouge_l(a, b));
}
BENCHMARK(BM_RougeL)->Range(16, 1024);

void BM_Levenshtein(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = random_sequence(n, 50, 3), b = random_sequence(n, 50, 4);
    for (auto _ : state) benchmark::DoNotOptimize(levenshtein(a, b));
}
BENCHMARK(BM_Levenshtein)->Range(16, 1024);

void BM_Wmd(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const EmbeddingTable table = hashed_embeddings(50, 7);
    WordMass a, b;
    for (const auto& t : random_sequence(n, 1000, 5)) a[t] += 1.0 / static_cast<double>(n);
    for (const auto& t : random_sequence(n, 1000, 6)) b[t] += 1.0 / static_cast<double>(n);
    for (auto _ : state) benchmark::DoNotOptimize(wmd(a, b, table));
}
BENCHMARK(BM_Wmd)->Arg(8)->Arg(32)->Arg(64);

void BM_Louvain(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(9);
    WordGraph g;
    for (std::size_t i = 0; i < n; ++i) g.add_node("v" + std::to_string(i));
    for (std::size_t e = 0; e < 4 * n; ++e) {
        const NodeId u = rng.index(n), v = rng.index(n);
        if (u != v) g.add_weight(u, v, 1.0);
    }
    for (auto _ : state) benchmark::DoNotOptimize(louvain(g, 0));
}
BENCHMARK(BM_Louvain)->Arg(100)->Arg(1000);

void BM_Sampler(benchmark::State& state) {
    const auto ref = random_sequence(20, 40, 10);
    std::vector<Token> vocab;
    for (int i = 0; i < 60; ++i) vocab.push_back("w" + std::to_string(i));
    GAConfig cfg;
    cfg.population = 50;
    cfg.generations = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(ga_sample_rouge_space(ref, vocab, cfg, 40));
}
BENCHMARK(BM_Sampler)->Arg(20)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
