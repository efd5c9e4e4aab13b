// Tokenization, n-gram bags and the sequence primitives (LCS, longest common substring,
// Levenshtein) shared by every metric.
#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace simforge {

using Token = std::string;
using TokenSequence = std::vector<Token>;

/// The EMPTY slot of a GA genome. Never rendered, stripped before scoring.
inline const Token kEmptyToken{};

inline bool is_empty_token(const Token& t) noexcept { return t.empty(); }

enum class TokenizeMode {
    word,          ///< split on runs of whitespace
    chars,         ///< one token per code point
    hashtag_aware  ///< word runs and punctuation split apart; '#'/'@' stay glued to the word
};

struct TokenizeOptions {
    TokenizeMode mode = TokenizeMode::word;
    bool lowercase = false;        ///< ASCII lowercasing only
    bool keep_whitespace = false;  ///< chars mode: emit whitespace code points too
};

TokenSequence tokenize(std::string_view text, TokenizeMode mode = TokenizeMode::word);
TokenSequence tokenize(std::string_view text, const TokenizeOptions& options);

/// Splits UTF-8 into code points. Invalid bytes are passed through one at a time.
std::vector<std::string> utf8_code_points(std::string_view text);

std::string ascii_lower(std::string_view text);

TokenSequence strip_empty(const TokenSequence& seq);

/// Joins non-EMPTY tokens with `sep`.
std::string render(const TokenSequence& seq, std::string_view sep = " ");

using NGram = std::vector<Token>;

/// Multiset of n-grams of a single arity. Zero counts are never stored.
class NGramBag {
public:
    using Counts = std::map<NGram, std::size_t>;

    explicit NGramBag(std::size_t arity = 1);

    /// Throws InvalidArgument if gram.size() != arity().
    void add(const NGram& gram, std::size_t count = 1);

    /// Removes up to `count` copies; returns how many were removed.
    std::size_t remove(const NGram& gram, std::size_t count = 1);

    std::size_t count(const NGram& gram) const;
    bool contains(const NGram& gram) const { return count(gram) > 0; }

    std::size_t arity() const noexcept { return arity_; }
    /// Sum of counts.
    std::size_t size() const noexcept { return size_; }
    std::size_t distinct() const noexcept { return counts_.size(); }
    bool empty() const noexcept { return size_ == 0; }

    const Counts& counts() const noexcept { return counts_; }

    /// True when every count here is <= the count in `other`.
    bool is_subbag_of(const NGramBag& other) const;

    friend bool operator==(const NGramBag& a, const NGramBag& b) {
        return a.arity_ == b.arity_ && a.counts_ == b.counts_;
    }

private:
    std::size_t arity_;
    std::size_t size_ = 0;
    Counts counts_;
};

/// Contiguous n-grams of `seq`. size() == max(0, |seq| - n + 1).
NGramBag ngrams(const TokenSequence& seq, std::size_t n);

/// Unigram bag over single tokens; convenience for ngrams(seq, 1).
NGramBag unigram_bag(const TokenSequence& seq);

enum class BagOp { intersect, left_intersect, sum };

/// intersect: per-key min. left_intersect: A's count where B has the key.
/// sum: per-key addition. Throws InvalidArgument on arity mismatch.
NGramBag bag_combine(BagOp op, const NGramBag& a, const NGramBag& b);

struct LcsResult {
    std::size_t length = 0;
    TokenSequence subsequence;
};

/// Longest common subsequence. Among maximal subsequences, the one using
/// the lexicographically earliest positions of `a` is returned.
LcsResult lcs(const TokenSequence& a, const TokenSequence& b);

/// Length only, O(min(|a|,|b|)) memory.
std::size_t lcs_length(const TokenSequence& a, const TokenSequence& b);

struct SubstringResult {
    std::size_t length = 0;
    TokenSequence run;
    std::size_t pos_a = 0;
    std::size_t pos_b = 0;
};

/// Longest contiguous run shared by both. Ties: leftmost in a, then in b.
SubstringResult longest_common_substring(const TokenSequence& a, const TokenSequence& b);

/// Unit-cost edit distance (substitute, insert, delete).
std::size_t levenshtein(const TokenSequence& a, const TokenSequence& b);

} // namespace simforge
