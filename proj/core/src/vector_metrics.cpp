#include "simforge/vector_metrics.hpp"

#include "simforge/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace simforge {

namespace {

void require_same_dim(VectorView a, VectorView b) {
    if (a.size() != b.size()) {
        throw InvalidArgument("vector dims differ: " + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()));
    }
    if (a.empty()) throw InvalidArgument("vectors must have dim >= 1");
}

double cosine(VectorView a, VectorView b) {
    const double na = l2_norm(a), nb = l2_norm(b);
    if (na == 0.0 || nb == 0.0) throw UndefinedValue("cosine of a zero vector");
    return inner(a, b) / (na * nb);
}

void require_probability(VectorView p, const char* name) {
    double sum = 0.0;
    for (double x : p) {
        if (!(x >= 0.0)) throw InvalidArgument(std::string(name) + " has a negative component");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InvalidArgument(std::string(name) + " does not sum to 1");
}

double kl(VectorView p, VectorView q) {
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        if (q[i] == 0.0) throw UndefinedValue("KL undefined: q is zero where p is positive");
        d += p[i] * std::log(p[i] / q[i]);
    }
    return std::max(d, 0.0);
}

double pearson(VectorView x, VectorView y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw UndefinedValue("correlation undefined: zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double kendall_tau_b(VectorView x, VectorView y) {
    double concordant = 0, discordant = 0, ties_x = 0, ties_y = 0, pairs = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            pairs += 1;
            const double dx = x[i] - x[j], dy = y[i] - y[j];
            if (dx == 0.0) ties_x += 1;
            if (dy == 0.0) ties_y += 1;
            if (dx == 0.0 || dy == 0.0) continue;
            ((dx > 0) == (dy > 0) ? concordant : discordant) += 1;
        }
    }
    const double denom = std::sqrt((pairs - ties_x) * (pairs - ties_y));
    if (denom == 0.0) throw UndefinedValue("kendall tau undefined: a side is constant");
    return std::clamp((concordant - discordant) / denom, -1.0, 1.0);
}

// mean over `from` of max cosine against `to`
double directional_greedy(const std::vector<Vector>& from, const std::vector<Vector>& to) {
    double sum = 0.0;
    for (const auto& a : from) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& b : to) best = std::max(best, cosine(a, b));
        sum += best;
    }
    return sum / static_cast<double>(from.size());
}

void require_nonempty(const std::vector<Vector>& a, const std::vector<Vector>& b) {
    if (a.empty() || b.empty()) throw InvalidArgument("token vector list is empty");
}

} // namespace

double inner(VectorView a, VectorView b) {
    require_same_dim(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double l2_norm(VectorView a) {
    double s = 0.0;
    for (double x : a) s += x * x;
    return std::sqrt(s);
}

double vector_similarity(SimilarityKind kind, VectorView a, VectorView b) {
    require_same_dim(a, b);
    const double ab = inner(a, b);
    const double aa = inner(a, a), bb = inner(b, b);
    switch (kind) {
    case SimilarityKind::cosine:
        return cosine(a, b);
    case SimilarityKind::inner:
        return ab;
    case SimilarityKind::jaccard_vec: {
        const double denom = aa + bb - ab;
        if (denom == 0.0) throw UndefinedValue("vector jaccard of zero vectors");
        return ab / denom;
    }
    case SimilarityKind::dice_vec:
        if (aa + bb == 0.0) throw UndefinedValue("vector dice of zero vectors");
        return 2.0 * ab / (aa + bb);
    case SimilarityKind::overlap_vec:
        if (std::min(aa, bb) == 0.0) throw UndefinedValue("vector overlap with a zero vector");
        return ab / std::min(aa, bb);
    }
    return 0.0;
}

double vector_distance(const DistanceKind& kind, VectorView a, VectorView b) {
    require_same_dim(a, b);
    auto require_nonneg = [&] {
        auto neg = [](double x) { return x < 0.0; };
        if (std::any_of(a.begin(), a.end(), neg) || std::any_of(b.begin(), b.end(), neg)) {
            throw InvalidArgument("distance requires nonnegative components");
        }
    };
    double acc = 0.0;
    switch (kind.family) {
    case DistanceFamily::lp:
        if (!(kind.p >= 1.0) || !std::isfinite(kind.p)) {
            throw InvalidArgument("lp distance requires finite p >= 1");
        }
        for (std::size_t i = 0; i < a.size(); ++i) acc += std::pow(std::abs(a[i] - b[i]), kind.p);
        return std::pow(acc, 1.0 / kind.p);
    case DistanceFamily::chebyshev:
        for (std::size_t i = 0; i < a.size(); ++i) acc = std::max(acc, std::abs(a[i] - b[i]));
        return acc;
    case DistanceFamily::canberra:
        require_nonneg();
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double denom = std::abs(a[i]) + std::abs(b[i]);
            if (denom > 0.0) acc += std::abs(a[i] - b[i]) / denom;
        }
        return acc;
    case DistanceFamily::chi_square:
        require_nonneg();
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double denom = a[i] + b[i];
            if (denom > 0.0) acc += (a[i] - b[i]) * (a[i] - b[i]) / denom;
        }
        return acc;
    case DistanceFamily::cosine_distance:
        return std::max(0.0, 1.0 - cosine(a, b));
    }
    return 0.0;
}

double divergence(DivergenceKind kind, VectorView p, VectorView q) {
    require_same_dim(p, q);
    require_probability(p, "p");
    require_probability(q, "q");
    if (kind == DivergenceKind::kl) return kl(p, q);
    Vector m(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) m[i] = 0.5 * (p[i] + q[i]);
    const double js = 0.5 * kl(p, m) + 0.5 * kl(q, m);
    return kind == DivergenceKind::js ? js : std::sqrt(js);
}

std::vector<double> average_ranks(VectorView x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(x.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double correlation(CorrelationKind kind, VectorView x, VectorView y) {
    if (x.size() != y.size()) throw InvalidArgument("correlation: dims differ");
    if (x.size() < 2) throw InvalidArgument("correlation needs at least two observations");
    switch (kind) {
    case CorrelationKind::pearson:
        return pearson(x, y);
    case CorrelationKind::spearman: {
        auto rx = average_ranks(x);
        auto ry = average_ranks(y);
        return pearson(rx, ry);
    }
    case CorrelationKind::kendall:
        return kendall_tau_b(x, y);
    }
    return 0.0;
}

double greedy_match_similarity(const std::vector<Vector>& a, const std::vector<Vector>& b) {
    require_nonempty(a, b);
    return 0.5 * (directional_greedy(a, b) + directional_greedy(b, a));
}

MetricResult embed_f1(const std::vector<Vector>& a, const std::vector<Vector>& b) {
    require_nonempty(a, b);
    const double recall = directional_greedy(a, b);
    const double precision = directional_greedy(b, a);
    MetricResult res;
    res.metric_id = "embedf1";
    res.precision = precision;
    res.recall = recall;
    const double denom = precision + recall;
    res.value = denom != 0.0 ? 2.0 * precision * recall / denom : 0.0;
    return res;
}

// ---------------------------------------------------------------------------
// WMD

WordMass word_mass(const TokenSequence& tokens) {
    WordMass mass;
    std::size_t total = 0;
    for (const auto& t : tokens) {
        if (is_empty_token(t)) continue;
        mass[t] += 1.0;
        ++total;
    }
    for (auto& kv : mass) kv.second /= static_cast<double>(total);
    return mass;
}

WmdResult wmd(const WordMass& a, const WordMass& b, const EmbeddingTable& table) {
    auto check_mass = [](const WordMass& w, const char* side) {
        if (w.empty()) throw InvalidArgument(std::string("wmd: ") + side + " bag is empty");
        double sum = 0.0;
        for (const auto& kv : w) {
            if (!(kv.second >= 0.0)) throw InvalidArgument("wmd: negative mass for '" + kv.first + "'");
            sum += kv.second;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            throw InvalidArgument(std::string("wmd: ") + side + " masses do not sum to 1");
        }
    };
    check_mass(a, "source");
    check_mass(b, "target");

    WmdResult res;
    std::vector<Vector> ea, eb;
    std::vector<double> supply, demand;
    for (const auto& [w, m] : a) {
        res.source_words.push_back(w);
        ea.push_back(table.lookup(w));
        supply.push_back(m);
    }
    for (const auto& [w, m] : b) {
        res.target_words.push_back(w);
        eb.push_back(table.lookup(w));
        demand.push_back(m);
    }
    const std::size_t n = ea.size(), m = eb.size();
    std::vector<double> cost(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            cost[i * m + j] = vector_distance(DistanceKind{}, ea[i], eb[j]);
        }
    }

    if (n <= kWmdExactSupportCap && m <= kWmdExactSupportCap) {
        res.plan = solve_transport(supply, demand, cost);
        res.distance = res.plan.cost;
        return res;
    }

    // Relaxed: each side ships all of its mass to its nearest counterpart.
    TransportPlan forward, backward;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < m; ++j) {
            if (cost[i * m + j] < cost[i * m + best]) best = j;
        }
        if (supply[i] > 0) forward.flows[{i, best}] += supply[i];
        forward.cost += supply[i] * cost[i * m + best];
    }
    for (std::size_t j = 0; j < m; ++j) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < n; ++i) {
            if (cost[i * m + j] < cost[best * m + j]) best = i;
        }
        if (demand[j] > 0) backward.flows[{best, j}] += demand[j];
        backward.cost += demand[j] * cost[best * m + j];
    }
    res.relaxed = true;
    res.plan = forward.cost >= backward.cost ? std::move(forward) : std::move(backward);
    res.distance = res.plan.cost;
    return res;
}

// ---------------------------------------------------------------------------
// SIMILE

double length_penalty(std::size_t len_a, std::size_t len_b) {
    if (len_a == 0 || len_b == 0) throw InvalidArgument("simile: lengths must be >= 1");
    const double hi = static_cast<double>(std::max(len_a, len_b));
    const double lo = static_cast<double>(std::min(len_a, len_b));
    return std::exp(1.0 - hi / lo);
}

double simile(VectorView a, VectorView b, std::size_t len_a, std::size_t len_b, double k) {
    if (!(k >= 0.0)) throw InvalidArgument("simile: k must be >= 0");
    return std::pow(length_penalty(len_a, len_b), k) * inner(a, b);
}

} // namespace simforge
