#include "simforge/text.hpp"

#include "simforge/error.hpp"

#include <algorithm>

namespace simforge {

namespace {

bool is_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Non-ASCII bytes count as word characters so UTF-8 letters stay whole.
bool is_word_byte(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           c == '_' || c >= 0x80;
}

std::size_t code_point_length(unsigned char lead) {
    if (lead < 0x80) return 1;
    if ((lead >> 5) == 0x6) return 2;
    if ((lead >> 4) == 0xE) return 3;
    if ((lead >> 3) == 0x1E) return 4;
    return 1;
}

TokenSequence split_words(std::string_view text) {
    TokenSequence out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && !is_space(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) out.emplace_back(text.substr(start, i - start));
    }
    return out;
}

TokenSequence split_hashtag_aware(std::string_view text) {
    TokenSequence out;
    std::size_t i = 0;
    auto at = [&](std::size_t k) { return static_cast<unsigned char>(text[k]); };
    while (i < text.size()) {
        unsigned char c = at(i);
        if (is_space(c)) {
            ++i;
            continue;
        }
        std::size_t start = i;
        if ((c == '#' || c == '@') && i + 1 < text.size() && is_word_byte(at(i + 1))) {
            ++i;
        }
        if (is_word_byte(at(i))) {
            while (i < text.size() && is_word_byte(at(i))) ++i;
        } else {
            ++i;
        }
        out.emplace_back(text.substr(start, i - start));
    }
    return out;
}

} // namespace

std::vector<std::string> utf8_code_points(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t len = code_point_length(static_cast<unsigned char>(text[i]));
        bool valid = i + len <= text.size();
        for (std::size_t k = 1; valid && k < len; ++k) {
            valid = (static_cast<unsigned char>(text[i + k]) >> 6) == 0x2;
        }
        if (!valid) len = 1;
        out.emplace_back(text.substr(i, len));
        i += len;
    }
    return out;
}

std::string ascii_lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
    });
    return out;
}

TokenSequence tokenize(std::string_view text, TokenizeMode mode) {
    TokenizeOptions options;
    options.mode = mode;
    return tokenize(text, options);
}

TokenSequence tokenize(std::string_view text, const TokenizeOptions& options) {
    std::string lowered;
    if (options.lowercase) {
        lowered = ascii_lower(text);
        text = lowered;
    }
    switch (options.mode) {
    case TokenizeMode::word:
        return split_words(text);
    case TokenizeMode::hashtag_aware:
        return split_hashtag_aware(text);
    case TokenizeMode::chars: {
        TokenSequence out;
        for (auto& cp : utf8_code_points(text)) {
            if (!options.keep_whitespace && cp.size() == 1 &&
                is_space(static_cast<unsigned char>(cp[0])))
                continue;
            out.push_back(std::move(cp));
        }
        return out;
    }
    }
    return {};
}

TokenSequence strip_empty(const TokenSequence& seq) {
    TokenSequence out;
    out.reserve(seq.size());
    for (const auto& t : seq) {
        if (!is_empty_token(t)) out.push_back(t);
    }
    return out;
}

std::string render(const TokenSequence& seq, std::string_view sep) {
    std::string out;
    bool first = true;
    for (const auto& t : seq) {
        if (is_empty_token(t)) continue;
        if (!first) out += sep;
        out += t;
        first = false;
    }
    return out;
}

// ---------------------------------------------------------------------------
// NGramBag

NGramBag::NGramBag(std::size_t arity) : arity_(arity) {
    if (arity == 0) throw InvalidArgument("n-gram arity must be >= 1");
}

void NGramBag::add(const NGram& gram, std::size_t count) {
    if (gram.size() != arity_) {
        throw InvalidArgument("n-gram of arity " + std::to_string(gram.size()) +
                              " added to bag of arity " + std::to_string(arity_));
    }
    if (count == 0) return;
    counts_[gram] += count;
    size_ += count;
}

std::size_t NGramBag::remove(const NGram& gram, std::size_t count) {
    auto it = counts_.find(gram);
    if (it == counts_.end()) return 0;
    std::size_t removed = std::min(count, it->second);
    it->second -= removed;
    size_ -= removed;
    if (it->second == 0) counts_.erase(it);
    return removed;
}

std::size_t NGramBag::count(const NGram& gram) const {
    auto it = counts_.find(gram);
    return it == counts_.end() ? 0 : it->second;
}

bool NGramBag::is_subbag_of(const NGramBag& other) const {
    if (arity_ != other.arity_) return false;
    return std::all_of(counts_.begin(), counts_.end(),
                       [&](const auto& kv) { return kv.second <= other.count(kv.first); });
}

NGramBag ngrams(const TokenSequence& seq, std::size_t n) {
    NGramBag bag(n);
    if (seq.size() < n) return bag;
    for (std::size_t i = 0; i + n <= seq.size(); ++i) {
        bag.add(NGram(seq.begin() + static_cast<std::ptrdiff_t>(i),
                      seq.begin() + static_cast<std::ptrdiff_t>(i + n)));
    }
    return bag;
}

NGramBag unigram_bag(const TokenSequence& seq) { return ngrams(seq, 1); }

NGramBag bag_combine(BagOp op, const NGramBag& a, const NGramBag& b) {
    if (a.arity() != b.arity()) {
        throw InvalidArgument("incompatible bags: arity " + std::to_string(a.arity()) + " vs " +
                              std::to_string(b.arity()));
    }
    NGramBag out(a.arity());
    switch (op) {
    case BagOp::intersect:
        for (const auto& [gram, count] : a.counts()) {
            out.add(gram, std::min(count, b.count(gram)));
        }
        break;
    case BagOp::left_intersect:
        for (const auto& [gram, count] : a.counts()) {
            if (b.contains(gram)) out.add(gram, count);
        }
        break;
    case BagOp::sum:
        for (const auto& [gram, count] : a.counts()) out.add(gram, count);
        for (const auto& [gram, count] : b.counts()) out.add(gram, count);
        break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sequence primitives

LcsResult lcs(const TokenSequence& a, const TokenSequence& b) {
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    // suffix[i][j] = LCS length of a[i..], b[j..]
    std::vector<std::size_t> suffix((n + 1) * (m + 1), 0);
    auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return suffix[i * (m + 1) + j]; };
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = m; j-- > 0;) {
            at(i, j) = a[i] == b[j] ? at(i + 1, j + 1) + 1 : std::max(at(i + 1, j), at(i, j + 1));
        }
    }
    LcsResult result;
    result.length = at(0, 0);
    result.subsequence.reserve(result.length);
    // Advancing j before i keeps a[i] usable as long as any optimum uses it.
    std::size_t i = 0, j = 0;
    while (i < n && j < m) {
        if (a[i] == b[j] && at(i, j) == at(i + 1, j + 1) + 1) {
            result.subsequence.push_back(a[i]);
            ++i;
            ++j;
        } else if (at(i, j + 1) == at(i, j)) {
            ++j;
        } else {
            ++i;
        }
    }
    return result;
}

std::size_t lcs_length(const TokenSequence& a, const TokenSequence& b) {
    const TokenSequence& outer = a.size() >= b.size() ? a : b;
    const TokenSequence& inner = a.size() >= b.size() ? b : a;
    std::vector<std::size_t> row(inner.size() + 1, 0);
    for (const auto& x : outer) {
        std::size_t diag = 0;
        for (std::size_t j = 1; j <= inner.size(); ++j) {
            std::size_t up = row[j];
            row[j] = x == inner[j - 1] ? diag + 1 : std::max(row[j], row[j - 1]);
            diag = up;
        }
    }
    return row[inner.size()];
}

SubstringResult longest_common_substring(const TokenSequence& a, const TokenSequence& b) {
    SubstringResult best;
    // run[j] = length of common run ending at a[i-1], b[j-1]
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : 0;
            if (cur[j] == 0) continue;
            std::size_t start_a = i - cur[j];
            std::size_t start_b = j - cur[j];
            bool better = cur[j] > best.length ||
                          (cur[j] == best.length &&
                           (start_a < best.pos_a || (start_a == best.pos_a && start_b < best.pos_b)));
            if (better) {
                best.length = cur[j];
                best.pos_a = start_a;
                best.pos_b = start_b;
            }
        }
        std::swap(prev, cur);
    }
    if (best.length > 0) {
        auto first = a.begin() + static_cast<std::ptrdiff_t>(best.pos_a);
        best.run.assign(first, first + static_cast<std::ptrdiff_t>(best.length));
    }
    return best;
}

std::size_t levenshtein(const TokenSequence& a, const TokenSequence& b) {
    const TokenSequence& outer = a.size() >= b.size() ? a : b;
    const TokenSequence& inner = a.size() >= b.size() ? b : a;
    std::vector<std::size_t> row(inner.size() + 1);
    for (std::size_t j = 0; j <= inner.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= outer.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= inner.size(); ++j) {
            std::size_t up = row[j];
            std::size_t sub = diag + (outer[i - 1] == inner[j - 1] ? 0 : 1);
            row[j] = std::min({sub, row[j] + 1, row[j - 1] + 1});
            diag = up;
        }
    }
    return row[inner.size()];
}

} // namespace simforge
