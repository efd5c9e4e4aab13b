#include "simforge/embeddings.hpp"

#include "simforge/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>

namespace simforge {

namespace {

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

bool all_finite(const Vector& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

} // namespace

EmbeddingTable::EmbeddingTable(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw InvalidArgument("embedding dimension must be >= 1");
}

void EmbeddingTable::insert(const Token& token, Vector vec) {
    if (vec.size() != dim_) {
        throw InvalidArgument("embedding for '" + token + "' has dim " + std::to_string(vec.size()) +
                              ", table dim is " + std::to_string(dim_));
    }
    if (!all_finite(vec)) throw InvalidArgument("embedding for '" + token + "' is not finite");
    vectors_[token] = std::move(vec);
}

bool EmbeddingTable::contains(const Token& token) const { return vectors_.count(token) > 0; }

std::optional<Vector> EmbeddingTable::find(const Token& token) const {
    auto it = vectors_.find(token);
    if (it != vectors_.end()) return it->second;
    if (fallback_seed_) return hashed_vector(token, dim_, *fallback_seed_);
    return std::nullopt;
}

Vector EmbeddingTable::lookup(const Token& token) const {
    auto v = find(token);
    if (!v) throw InvalidArgument("no embedding for token '" + token + "'");
    return std::move(*v);
}

std::vector<Token> EmbeddingTable::tokens() const {
    std::vector<Token> out;
    out.reserve(vectors_.size());
    for (const auto& kv : vectors_) out.push_back(kv.first);
    std::sort(out.begin(), out.end());
    return out;
}

void EmbeddingTable::save(std::ostream& out) const {
    char buf[64];
    for (const auto& token : tokens()) {
        out << token;
        for (double x : vectors_.at(token)) {
            auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
            out << ' ' << std::string_view(buf, static_cast<std::size_t>(end - buf));
        }
        out << '\n';
    }
}

EmbeddingTable load_embeddings(std::istream& in, std::optional<std::size_t> expected_dim) {
    std::optional<EmbeddingTable> table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        TokenSequence fields = tokenize(line, TokenizeMode::word);
        if (fields.empty()) continue;
        if (fields.size() < 2) throw ParseError("embedding row has no components", line_no);

        Vector vec;
        vec.reserve(fields.size() - 1);
        for (std::size_t k = 1; k < fields.size(); ++k) {
            const std::string& f = fields[k];
            double x = 0.0;
            auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), x);
            if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(x)) {
                throw ParseError("non-numeric embedding component '" + f + "'", line_no);
            }
            vec.push_back(x);
        }
        if (!table) {
            if (expected_dim && vec.size() != *expected_dim) {
                throw ParseError("embedding dim " + std::to_string(vec.size()) + " != expected " +
                                     std::to_string(*expected_dim),
                                 line_no);
            }
            table.emplace(vec.size());
        } else if (vec.size() != table->dim()) {
            throw ParseError("ragged embedding row: dim " + std::to_string(vec.size()) + " != " +
                                 std::to_string(table->dim()),
                             line_no);
        }
        if (table->contains(fields[0])) ++table->duplicates_;
        table->insert(fields[0], std::move(vec));
    }
    if (!table) throw ParseError("embedding file is empty; cannot infer dimension", 0);
    return std::move(*table);
}

EmbeddingTable load_embeddings(const std::filesystem::path& path,
                               std::optional<std::size_t> expected_dim) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open embedding file " + path.string());
    return load_embeddings(in, expected_dim);
}

Vector hashed_vector(const Token& token, std::size_t dim, std::uint64_t seed) {
    std::uint64_t state = fnv1a(token) ^ (seed * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL);
    Vector v(dim);
    double norm2 = 0.0;
    for (auto& x : v) {
        // 53 random bits -> [0,1) -> [-1,1)
        double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
        x = 2.0 * u - 1.0;
        norm2 += x * x;
    }
    if (norm2 == 0.0) {
        v[0] = 1.0;
        return v;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& x : v) x *= inv;
    return v;
}

EmbeddingTable hashed_embeddings(std::size_t dim, std::uint64_t seed) {
    EmbeddingTable table(dim);
    table.enable_hashed_fallback(seed);
    return table;
}

// ---------------------------------------------------------------------------
// TF-IDF

double TfIdfWeights::weight(const Token& token) const {
    auto it = idf.find(token);
    if (it != idf.end()) return it->second;
    const double n = static_cast<double>(doc_count);
    return smoothed ? std::log(1.0 + n) : std::log(n);
}

void TfIdfWeights::save_tsv(std::ostream& out) const {
    char buf[64];
    for (const auto& [token, w] : idf) {
        auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), w);
        out << token << '\t' << std::string_view(buf, static_cast<std::size_t>(end - buf)) << '\n';
    }
}

TfIdfWeights tfidf_index(const std::vector<TokenSequence>& corpus, bool smoothed) {
    if (corpus.empty()) throw InvalidArgument("tfidf_index: corpus is empty");
    TfIdfWeights w;
    w.doc_count = corpus.size();
    w.smoothed = smoothed;
    for (const auto& doc : corpus) {
        std::set<Token> seen;
        for (const auto& t : doc) {
            if (!is_empty_token(t)) seen.insert(t);
        }
        for (const auto& t : seen) ++w.df[t];
    }
    const double n = static_cast<double>(w.doc_count);
    for (const auto& [t, df] : w.df) {
        const double d = static_cast<double>(df);
        w.idf[t] = smoothed ? std::log((1.0 + n) / (1.0 + d)) : std::log(n / d);
    }
    return w;
}

// ---------------------------------------------------------------------------
// Document vectors

std::vector<Vector> token_vectors(const TokenSequence& tokens, const EmbeddingTable& table) {
    std::vector<Vector> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        if (!is_empty_token(t)) out.push_back(table.lookup(t));
    }
    return out;
}

Vector doc_vector(const TokenSequence& tokens, const EmbeddingTable& table, DocVectorMode mode,
                  const TfIdfWeights* weights) {
    if (mode == DocVectorMode::tfidf_mean && weights == nullptr) {
        throw InvalidArgument("doc_vector: tfidf_mean requires weights");
    }
    const std::size_t dim = table.dim();
    Vector acc(dim, 0.0);
    double total_weight = 0.0;
    std::size_t resolved = 0;
    for (const auto& t : tokens) {
        if (is_empty_token(t)) continue;
        auto v = table.find(t);
        if (!v) continue;
        ++resolved;
        switch (mode) {
        case DocVectorMode::mean:
            for (std::size_t k = 0; k < dim; ++k) acc[k] += (*v)[k];
            total_weight += 1.0;
            break;
        case DocVectorMode::tfidf_mean: {
            const double w = weights->weight(t);
            for (std::size_t k = 0; k < dim; ++k) acc[k] += w * (*v)[k];
            total_weight += w;
            break;
        }
        case DocVectorMode::extrema:
            for (std::size_t k = 0; k < dim; ++k) {
                const double x = (*v)[k];
                const double cur = acc[k];
                // Largest magnitude wins; equal magnitudes resolve to the positive value.
                if (resolved == 1 || std::abs(x) > std::abs(cur) ||
                    (std::abs(x) == std::abs(cur) && x > cur)) {
                    acc[k] = x;
                }
            }
            break;
        }
    }
    if (resolved == 0) throw InvalidArgument("doc_vector: no token has an embedding");
    if (mode == DocVectorMode::extrema) return acc;
    if (total_weight == 0.0) {
        // Every token has idf 0: fall back to the unweighted mean.
        return doc_vector(tokens, table, DocVectorMode::mean);
    }
    for (auto& x : acc) x /= total_weight;
    return acc;
}

} // namespace simforge
