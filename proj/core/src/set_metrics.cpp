#include "simforge/set_metrics.hpp"

#include "simforge/error.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace simforge {

namespace {

struct BagStats {
    double inter = 0;   // Σ min
    double uni = 0;     // Σ max
    double a_only = 0;  // Σ max(0, a - b)
    double b_only = 0;
    double a = 0;
    double b = 0;
};

BagStats bag_stats(const NGramBag& a, const NGramBag& b) {
    BagStats s;
    s.a = static_cast<double>(a.size());
    s.b = static_cast<double>(b.size());
    for (const auto& [gram, ca] : a.counts()) {
        std::size_t cb = b.count(gram);
        s.inter += static_cast<double>(std::min(ca, cb));
        s.uni += static_cast<double>(std::max(ca, cb));
        if (ca > cb) s.a_only += static_cast<double>(ca - cb);
    }
    for (const auto& [gram, cb] : b.counts()) {
        std::size_t ca = a.count(gram);
        if (ca == 0) s.uni += static_cast<double>(cb);
        if (cb > ca) s.b_only += static_cast<double>(cb - ca);
    }
    return s;
}

CountIndex::Pair canonical(const Token& x, const Token& y) {
    return x < y ? CountIndex::Pair{x, y} : CountIndex::Pair{y, x};
}

} // namespace

NGramBag to_set(const NGramBag& bag) {
    NGramBag out(bag.arity());
    for (const auto& kv : bag.counts()) out.add(kv.first, 1);
    return out;
}

double bag_coefficient(const CoefficientKind& kind, const NGramBag& a, const NGramBag& b) {
    if (a.arity() != b.arity()) {
        throw InvalidArgument("incompatible bags: arity " + std::to_string(a.arity()) + " vs " +
                              std::to_string(b.arity()));
    }
    if (kind.family == CoefficientFamily::tversky && (kind.alpha < 0 || kind.beta < 0)) {
        throw InvalidArgument("tversky requires alpha >= 0 and beta >= 0");
    }
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;

    const BagStats s = bag_stats(a, b);
    switch (kind.family) {
    case CoefficientFamily::jaccard_set:
        return s.inter / s.uni;
    case CoefficientFamily::jaccard_bag:
        return s.inter / (s.a + s.b);
    case CoefficientFamily::dice:
        return 2.0 * s.inter / (s.a + s.b);
    case CoefficientFamily::ochiai:
        return s.inter / std::sqrt(s.a * s.b);
    case CoefficientFamily::overlap:
        return s.inter / std::min(s.a, s.b);
    case CoefficientFamily::tversky: {
        double denom = s.inter + kind.alpha * s.a_only + kind.beta * s.b_only;
        // α = β = 0 with nothing shared: 0/0, read as "no evidence of similarity".
        return denom > 0 ? s.inter / denom : 0.0;
    }
    }
    return 0.0;
}

double jaccard_dice_convert(double value, ConvertDirection direction) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw InvalidArgument("coefficient must lie in [0, 1]");
    }
    return direction == ConvertDirection::dice_to_jaccard ? value / (2.0 - value)
                                                          : 2.0 * value / (1.0 + value);
}

// ---------------------------------------------------------------------------
// CountIndex

std::size_t CountIndex::doc_count(const Token& t) const {
    auto it = docs_.find(t);
    return it == docs_.end() ? 0 : it->second;
}

std::size_t CountIndex::pair_count(const Token& x, const Token& y) const {
    if (x == y) return doc_count(x);
    auto it = pairs_.find(canonical(x, y));
    return it == pairs_.end() ? 0 : it->second;
}

CountIndex build_count_index(const std::vector<TokenSequence>& corpus,
                             const std::optional<std::set<Token>>& vocabulary) {
    CountIndex index;
    index.total_docs_ = corpus.size();
    for (const auto& doc : corpus) {
        std::set<Token> present;
        for (const auto& t : doc) {
            if (is_empty_token(t)) continue;
            if (vocabulary && !vocabulary->count(t)) continue;
            present.insert(t);
        }
        for (auto it = present.begin(); it != present.end(); ++it) {
            ++index.docs_[*it];
            for (auto jt = std::next(it); jt != present.end(); ++jt) {
                ++index.pairs_[{*it, *jt}];
            }
        }
    }
    return index;
}

void CountIndex::save_tsv(std::ostream& out) const {
    out << "#total\t" << total_docs_ << '\n';
    for (const auto& [t, c] : docs_) out << t << '\t' << c << '\n';
    out << '\n';
    for (const auto& [p, c] : pairs_) out << p.first << '\t' << p.second << '\t' << c << '\n';
}

CountIndex CountIndex::load_tsv(std::istream& in) {
    CountIndex index;
    std::string line;
    std::size_t line_no = 0;
    bool in_pairs = false;
    bool saw_total = false;
    auto parse_count = [&](const std::string& field) -> std::size_t {
        std::size_t pos = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(field, &pos);
        } catch (const std::exception&) {
            throw ParseError("count index: non-numeric count '" + field + "'", line_no);
        }
        if (pos != field.size()) {
            throw ParseError("count index: non-numeric count '" + field + "'", line_no);
        }
        return static_cast<std::size_t>(v);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            in_pairs = true;
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, '\t')) fields.push_back(f);
        if (!saw_total) {
            if (fields.size() != 2 || fields[0] != "#total") {
                throw ParseError("count index: expected '#total<TAB>G' header", line_no);
            }
            index.total_docs_ = parse_count(fields[1]);
            saw_total = true;
            continue;
        }
        if (!in_pairs) {
            if (fields.size() != 2) throw ParseError("count index: expected term<TAB>count", line_no);
            index.docs_[fields[0]] = parse_count(fields[1]);
        } else {
            if (fields.size() != 3) {
                throw ParseError("count index: expected termA<TAB>termB<TAB>count", line_no);
            }
            index.pairs_[canonical(fields[0], fields[1])] = parse_count(fields[2]);
        }
    }
    if (!saw_total) throw ParseError("count index: empty input", 0);
    return index;
}

double ngd(const Token& x, const Token& y, const CountIndex& index, double log_base) {
    const std::size_t gx = index.doc_count(x);
    const std::size_t gy = index.doc_count(y);
    const std::size_t gxy = index.pair_count(x, y);
    const std::size_t total = index.total_docs();
    if (gx == 0 || gy == 0 || gxy == 0) {
        throw UndefinedValue("NGD undefined: zero count for '" + x + "'/'" + y + "'");
    }
    if (total <= 1) throw UndefinedValue("NGD undefined: fewer than two documents");
    if (!(log_base > 1.0)) throw InvalidArgument("log base must be > 1");
    if (x == y) return 0.0;

    const double lb = std::log(log_base);
    auto lg = [&](std::size_t v) { return std::log(static_cast<double>(v)) / lb; };
    const double lx = lg(gx), ly = lg(gy), lxy = lg(gxy), lG = lg(total);
    const double denom = lG - std::min(lx, ly);
    if (denom <= 0.0) {
        throw UndefinedValue("NGD undefined: a term occurs in every document");
    }
    return (std::max(lx, ly) - lxy) / denom;
}

} // namespace simforge
