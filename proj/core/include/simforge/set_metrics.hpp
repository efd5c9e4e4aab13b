// Set/bag coefficients (Jaccard, Dice, Ochiai, overlap, Tversky) and normalised
// co-occurrence distance over corpus document counts.
#pragma once

#include "simforge/text.hpp"

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace simforge {

enum class CoefficientFamily { jaccard_set, jaccard_bag, dice, ochiai, overlap, tversky };

struct CoefficientKind {
    CoefficientFamily family = CoefficientFamily::jaccard_set;
    double alpha = 1.0;  ///< tversky only
    double beta = 1.0;   ///< tversky only

    static CoefficientKind tversky(double alpha, double beta) {
        return {CoefficientFamily::tversky, alpha, beta};
    }
};

/// Multiset semantics throughout: |A∩B| uses per-key min, |A∪B| per-key max,
/// |A∖B| = Σ max(0, a - b). On 0/1 bags every kind reduces to its set form.
///
///   jaccard_set  |A∩B| / |A∪B|
///   jaccard_bag  |A∩B| / (|A| + |B|)          (at most 1/2)
///   dice         2|A∩B| / (|A| + |B|)
///   ochiai       |A∩B| / sqrt(|A||B|)
///   overlap      |A∩B| / min(|A|, |B|)
///   tversky      |A∩B| / (|A∩B| + α|A∖B| + β|B∖A|)
///
/// Both empty -> 1.0; exactly one empty -> 0.0.
double bag_coefficient(const CoefficientKind& kind, const NGramBag& a, const NGramBag& b);

/// Collapses every count to 1.
NGramBag to_set(const NGramBag& bag);

enum class ConvertDirection { dice_to_jaccard, jaccard_to_dice };

/// J = S / (2 - S), S = 2J / (1 + J).
double jaccard_dice_convert(double value, ConvertDirection direction);

/// Document-level presence counts standing in for web page counts.
class CountIndex {
public:
    using Pair = std::pair<Token, Token>;  ///< canonical: first < second

    std::size_t doc_count(const Token& t) const;
    std::size_t pair_count(const Token& x, const Token& y) const;
    std::size_t total_docs() const noexcept { return total_docs_; }

    const std::map<Token, std::size_t>& doc_counts() const noexcept { return docs_; }
    const std::map<Pair, std::size_t>& pair_counts() const noexcept { return pairs_; }

    /// Two sections separated by a blank line:
    ///   term<TAB>count ... then termA<TAB>termB<TAB>count ...
    /// The first line is "#total<TAB>G".
    void save_tsv(std::ostream& out) const;
    static CountIndex load_tsv(std::istream& in);

    friend CountIndex build_count_index(const std::vector<TokenSequence>& corpus,
                                        const std::optional<std::set<Token>>& vocabulary);

    friend bool operator==(const CountIndex&, const CountIndex&) = default;

private:
    std::map<Token, std::size_t> docs_;
    std::map<Pair, std::size_t> pairs_;
    std::size_t total_docs_ = 0;
};

/// Counts each token and unordered token pair at most once per document.
/// With a vocabulary, only its tokens are indexed.
CountIndex build_count_index(const std::vector<TokenSequence>& corpus,
                             const std::optional<std::set<Token>>& vocabulary = std::nullopt);

/// (max(log g(x), log g(y)) - log g(x,y)) / (log G - min(log g(x), log g(y))).
/// ngd(x, x) = 0 for any x that occurs. Throws UndefinedValue on zero counts,
/// G <= 1, or when the denominator vanishes.
double ngd(const Token& x, const Token& y, const CountIndex& index, double log_base = 2.0);

} // namespace simforge
