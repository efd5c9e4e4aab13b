// Token vectors (file-backed or hashed) and document vectors. Nothing here trains a
// model. Tables are immutable after construction so they can be shared freely across
// threads.
#pragma once

#include "simforge/text.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace simforge {

using Vector = std::vector<double>;

class EmbeddingTable {
public:
    /// Empty table of fixed dimension; lookups fail unless hashed fallback is on.
    explicit EmbeddingTable(std::size_t dim);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return vectors_.size(); }
    bool has_fallback() const noexcept { return fallback_seed_.has_value(); }

    /// Throws InvalidArgument on a dimension mismatch or non-finite component.
    void insert(const Token& token, Vector vec);

    bool contains(const Token& token) const;

    /// Stored vector, else the hashed fallback, else nullopt.
    std::optional<Vector> find(const Token& token) const;

    /// Like find() but throws InvalidArgument naming the token on a miss.
    Vector lookup(const Token& token) const;

    void enable_hashed_fallback(std::uint64_t seed) { fallback_seed_ = seed; }

    /// Duplicate tokens seen by load_embeddings (last one wins).
    std::size_t duplicate_count() const noexcept { return duplicates_; }

    /// Tokens in sorted order, for deterministic output.
    std::vector<Token> tokens() const;

    /// GloVe-style text: token followed by dim numbers, one entry per line.
    /// Numbers are written with max_digits10 so a reload is bit-identical.
    void save(std::ostream& out) const;

    friend EmbeddingTable load_embeddings(std::istream& in, std::optional<std::size_t> expected_dim);

private:
    std::size_t dim_;
    std::unordered_map<Token, Vector> vectors_;
    std::optional<std::uint64_t> fallback_seed_;
    std::size_t duplicates_ = 0;
};

/// Throws ParseError (with line number) on ragged rows, non-numeric fields,
/// a dim differing from expected_dim, or an empty file.
EmbeddingTable load_embeddings(std::istream& in, std::optional<std::size_t> expected_dim = std::nullopt);
EmbeddingTable load_embeddings(const std::filesystem::path& path,
                               std::optional<std::size_t> expected_dim = std::nullopt);

/// Fallback-only table: every token maps to a deterministic unit vector
/// derived from (token, seed, dim).
EmbeddingTable hashed_embeddings(std::size_t dim, std::uint64_t seed);

/// The vector hashed_embeddings would return for `token`.
Vector hashed_vector(const Token& token, std::size_t dim, std::uint64_t seed);

struct TfIdfWeights {
    std::map<Token, double> idf;
    std::map<Token, std::size_t> df;
    std::size_t doc_count = 0;
    bool smoothed = true;

    /// idf of an unseen token: log((1+N)/1) smoothed, log(N) raw.
    double weight(const Token& token) const;

    /// token<TAB>idf, one per line, sorted by token.
    void save_tsv(std::ostream& out) const;
};

/// idf = log((1+N)/(1+df)) when smoothed, log(N/df) otherwise (natural log).
/// Throws InvalidArgument on an empty corpus.
TfIdfWeights tfidf_index(const std::vector<TokenSequence>& corpus, bool smoothed = true);

enum class DocVectorMode { mean, extrema, tfidf_mean };

/// Tokens with no vector are skipped. Throws InvalidArgument when none resolve
/// or when tfidf_mean is requested without weights.
Vector doc_vector(const TokenSequence& tokens, const EmbeddingTable& table, DocVectorMode mode,
                  const TfIdfWeights* weights = nullptr);

/// Looks up every non-EMPTY token; throws InvalidArgument naming the first miss.
std::vector<Vector> token_vectors(const TokenSequence& tokens, const EmbeddingTable& table);

} // namespace simforge
