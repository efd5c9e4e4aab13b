// Evasion machinery against similarity scorers: ROUGE-space sampling with a
// multi-objective GA, the bag-to-sequence attack, a universal trigger search,
// backdoor probing and a sanitizer.
#pragma once

#include "simforge/embeddings.hpp"
#include "simforge/metric_result.hpp"
#include "simforge/text.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace simforge {

/// Slot value 0 is EMPTY; value v > 0 is vocab[v - 1].
struct Genome {
    std::vector<std::size_t> slots;

    friend bool operator==(const Genome&, const Genome&) = default;
};

constexpr std::size_t kEmptySlot = 0;

/// Rendering skips EMPTY slots. Throws InvalidArgument on an out-of-range slot.
TokenSequence render_genome(const Genome& genome, const std::vector<Token>& vocab);

enum class ObjectiveMode { multi_rouge, single_scalar };

struct GAConfig {
    std::size_t population = 50;
    std::size_t generations = 200;
    std::optional<double> mutation_rate;  ///< per slot; 1/L when unset
    double crossover_rate = 0.9;
    std::uint64_t seed = 0;
    std::size_t elitism = 1;
    ObjectiveMode objective_mode = ObjectiveMode::multi_rouge;

    /// Throws InvalidArgument when population < 2, elitism is not in
    /// [1, population) or a rate is outside (0, 1).
    void validate() const;

    double mutation_for(std::size_t genome_len) const;
};

struct ParetoSample {
    TokenSequence text;
    double r1 = 0.0;
    double r2 = 0.0;
    double rl = 0.0;
};

struct SamplerResult {
    std::vector<ParetoSample> population;  ///< final generation
    std::vector<ParetoSample> searched;    ///< every generation's population, initial first
};

/// NSGA-II over fixed-length genomes maximising (R1, R2, RL) against ref.
/// Scores are recomputed from the rendered text.
SamplerResult ga_sample_rouge_space(const TokenSequence& ref, const std::vector<Token>& vocab,
                                    const GAConfig& cfg, std::size_t genome_len);

/// Indices of the samples no other sample dominates on (r1, r2, rl).
std::vector<std::size_t> pareto_front(const std::vector<ParetoSample>& samples);

nlohmann::json to_json(const ParetoSample& sample);

/// b(1, doc) ∩ b(1, ref).
NGramBag oracle_bag(const TokenSequence& doc, const TokenSequence& ref);

/// The top_k doc words by tf·idf (ties lexicographic), each count capped at 2.
NGramBag heuristic_bag(const TokenSequence& doc, const TfIdfWeights& idf, std::size_t top_k);

/// Repeatedly appends the longest (leftmost) run of consecutive doc tokens
/// whose counts fit in what is left of W, until the best run is shorter
/// than C.
TokenSequence bag_to_sequence(const TokenSequence& doc, const NGramBag& W, std::size_t C);

enum class AttackMode { oracle, heuristic };

struct AttackConfig {
    AttackMode mode = AttackMode::oracle;
    std::size_t cutoff = 3;
    std::size_t top_k = 20;               ///< heuristic bag size
    const TfIdfWeights* idf = nullptr;    ///< required for heuristic mode
};

struct AttackResult {
    TokenSequence text;
    NGramBag bag;
    std::vector<MetricResult> scores;  ///< rouge1, rouge2, rougeL, meteor when a ref is given
};

/// Throws InvalidArgument for oracle mode without ref, or heuristic mode
/// without idf weights.
AttackResult rouge_attack(const TokenSequence& doc, const std::optional<TokenSequence>& ref,
                          const AttackConfig& config);

using PairScorer = std::function<double(const TokenSequence& text, const TokenSequence& ref)>;

/// fitting_set: a round's fitness is the minimum over every target chosen
/// so far. current_target: only the latest target counts.
enum class TriggerObjective { fitting_set, current_target };

struct TriggerRound {
    std::size_t target = 0;
    std::vector<double> best_fitness;  ///< per generation, initial population first
    TokenSequence champion;
    double min_score = 0.0;
};

struct TriggerResult {
    TokenSequence trigger;
    std::vector<double> ref_scores;
    double min_score = 0.0;
    std::vector<TriggerRound> rounds;
};

/// Single-objective GA (tournament of 2, elites kept) over alphabet tokens.
/// The first target is refs[0]. Each round evolves the carried-over
/// population until the threshold or the generation budget; the next target
/// is the ref scoring lowest against the round champion. Stops after
/// max_rounds or once every ref reaches the threshold, and returns the
/// champion with the best min-over-refs score.
TriggerResult ga_universal_trigger(const std::vector<TokenSequence>& refs, const PairScorer& scorer,
                                   const std::vector<Token>& alphabet, const GAConfig& cfg,
                                   std::size_t trigger_len, double fitness_threshold = 0.88,
                                   std::size_t max_rounds = 5,
                                   TriggerObjective objective = TriggerObjective::fitting_set);

nlohmann::json to_json(const TriggerResult& result);

struct ProbeStats {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
};

ProbeStats backdoor_probe(const TokenSequence& candidate, const std::vector<TokenSequence>& refs,
                          const PairScorer& scorer);

struct SanitizePolicy {
    std::size_t run_len = 5;
    std::size_t max_rep = 8;
    double min_ratio = 0.5;
};

enum class SanitizeFlagKind { non_alnum_run, empty, excessive_repetition, low_letter_ratio };

struct SanitizeFlag {
    SanitizeFlagKind kind;
    std::string token;   ///< excessive_repetition only
    double value = 0.0;  ///< run length, repeat count or ratio
};

struct SanitizeReport {
    std::vector<SanitizeFlag> flags;
    bool passed = true;

    bool has(SanitizeFlagKind kind) const;
};

/// Code points outside ASCII count as letters. Tokens are whitespace-separated.
SanitizeReport sanitize(std::string_view text, const SanitizePolicy& policy = {});

nlohmann::json to_json(const SanitizeReport& report);

} // namespace simforge
