// Transportation simplex (northwest-corner start, u-v potentials).
#include "simforge/error.hpp"
#include "simforge/vector_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>

namespace simforge {

namespace {

struct Cell {
    std::size_t row;
    std::size_t col;
};

class TransportSimplex {
public:
    TransportSimplex(std::span<const double> supply, std::span<const double> demand,
                     std::span<const double> cost)
        : n_(supply.size()), m_(demand.size()), cost_(cost.begin(), cost.end()),
          flow_(n_ * m_, 0.0), basic_(n_ * m_, false) {
        northwest_corner(supply, demand);
        double scale = 0.0;
        for (double c : cost_) scale = std::max(scale, std::abs(c));
        eps_ = 1e-12 * std::max(scale, 1.0);
    }

    void solve() {
        // Bland's rule after a run of degenerate pivots.
        std::size_t degenerate_run = 0;
        const std::size_t max_iters = 50 * (n_ + m_) * (n_ + m_) + 1000;
        for (std::size_t iter = 0; iter < max_iters; ++iter) {
            compute_potentials();
            const bool bland = degenerate_run > n_ + m_;
            auto entering = pick_entering(bland);
            if (!entering) return;
            degenerate_run = pivot(*entering) ? 0 : degenerate_run + 1;
        }
        throw Error("transportation simplex did not converge");
    }

    TransportPlan plan() const {
        TransportPlan out;
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < m_; ++j) {
                double f = flow_[i * m_ + j];
                if (f > 0.0) {
                    out.flows[{i, j}] = f;
                    out.cost += f * cost_[i * m_ + j];
                }
            }
        }
        return out;
    }

private:
    std::size_t idx(std::size_t i, std::size_t j) const { return i * m_ + j; }

    void northwest_corner(std::span<const double> supply, std::span<const double> demand) {
        std::vector<double> s(supply.begin(), supply.end());
        std::vector<double> d(demand.begin(), demand.end());
        std::size_t i = 0, j = 0;
        while (true) {
            const double x = std::min(s[i], d[j]);
            flow_[idx(i, j)] = std::max(x, 0.0);
            basic_[idx(i, j)] = true;
            s[i] -= x;
            d[j] -= x;
            if (i == n_ - 1 && j == m_ - 1) break;
            if (j == m_ - 1 || (i < n_ - 1 && s[i] <= d[j])) {
                ++i;
            } else {
                ++j;
            }
        }
    }

    // Tree over n_ row nodes [0, n_) and m_ column nodes [n_, n_+m_).
    std::vector<std::vector<std::size_t>> adjacency() const {
        std::vector<std::vector<std::size_t>> adj(n_ + m_);
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < m_; ++j) {
                if (!basic_[idx(i, j)]) continue;
                adj[i].push_back(n_ + j);
                adj[n_ + j].push_back(i);
            }
        }
        return adj;
    }

    void compute_potentials() {
        const auto adj = adjacency();
        u_.assign(n_, 0.0);
        v_.assign(m_, 0.0);
        std::vector<bool> seen(n_ + m_, false);
        std::queue<std::size_t> q;
        seen[0] = true;
        q.push(0);
        while (!q.empty()) {
            std::size_t node = q.front();
            q.pop();
            for (std::size_t next : adj[node]) {
                if (seen[next]) continue;
                seen[next] = true;
                if (node < n_) {
                    v_[next - n_] = cost_[idx(node, next - n_)] - u_[node];
                } else {
                    u_[next] = cost_[idx(next, node - n_)] - v_[node - n_];
                }
                q.push(next);
            }
        }
    }

    std::optional<Cell> pick_entering(bool bland) const {
        std::optional<Cell> best;
        double best_reduced = -eps_;
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < m_; ++j) {
                if (basic_[idx(i, j)]) continue;
                const double reduced = cost_[idx(i, j)] - u_[i] - v_[j];
                if (reduced < best_reduced) {
                    if (bland) return Cell{i, j};
                    best_reduced = reduced;
                    best = Cell{i, j};
                }
            }
        }
        return best;
    }

    // Returns true when the pivot moved a positive amount of flow.
    bool pivot(Cell entering) {
        // Tree path from row node `entering.row` to column node `entering.col`.
        const auto adj = adjacency();
        const std::size_t start = entering.row;
        const std::size_t goal = n_ + entering.col;
        std::vector<std::size_t> parent(n_ + m_, std::numeric_limits<std::size_t>::max());
        std::queue<std::size_t> q;
        parent[start] = start;
        q.push(start);
        while (!q.empty() && parent[goal] == std::numeric_limits<std::size_t>::max()) {
            std::size_t node = q.front();
            q.pop();
            for (std::size_t next : adj[node]) {
                if (parent[next] != std::numeric_limits<std::size_t>::max()) continue;
                parent[next] = node;
                q.push(next);
            }
        }
        std::vector<std::size_t> path;  // goal ... start
        for (std::size_t node = goal; node != start; node = parent[node]) path.push_back(node);
        path.push_back(start);
        std::reverse(path.begin(), path.end());

        // Edges along start -> goal alternate -, +, -, ..., -.
        std::vector<std::size_t> cells;
        for (std::size_t k = 0; k + 1 < path.size(); ++k) {
            std::size_t a = path[k], b = path[k + 1];
            std::size_t row = a < n_ ? a : b;
            std::size_t col = (a < n_ ? b : a) - n_;
            cells.push_back(idx(row, col));
        }
        double theta = std::numeric_limits<double>::infinity();
        std::size_t leaving = cells.front();
        for (std::size_t k = 0; k < cells.size(); k += 2) {
            const double f = flow_[cells[k]];
            if (f < theta || (f == theta && cells[k] < leaving)) {
                theta = f;
                leaving = cells[k];
            }
        }
        const std::size_t enter = idx(entering.row, entering.col);
        flow_[enter] = theta;
        for (std::size_t k = 0; k < cells.size(); ++k) {
            double& f = flow_[cells[k]];
            f = (k % 2 == 0) ? f - theta : f + theta;
            if (f < 0.0) f = 0.0;
        }
        basic_[enter] = true;
        basic_[leaving] = false;
        flow_[leaving] = 0.0;
        return theta > 0.0;
    }

    std::size_t n_;
    std::size_t m_;
    std::vector<double> cost_;
    std::vector<double> flow_;
    std::vector<bool> basic_;
    std::vector<double> u_;
    std::vector<double> v_;
    double eps_ = 1e-12;
};

} // namespace

TransportPlan solve_transport(std::span<const double> supply, std::span<const double> demand,
                              std::span<const double> cost) {
    if (supply.empty() || demand.empty()) throw InvalidArgument("transport: empty support");
    if (cost.size() != supply.size() * demand.size()) {
        throw InvalidArgument("transport: cost matrix has wrong size");
    }
    auto nonneg = [](double x) { return x >= 0.0 && std::isfinite(x); };
    if (!std::all_of(supply.begin(), supply.end(), nonneg) ||
        !std::all_of(demand.begin(), demand.end(), nonneg)) {
        throw InvalidArgument("transport: masses must be finite and nonnegative");
    }
    const double s = std::accumulate(supply.begin(), supply.end(), 0.0);
    const double d = std::accumulate(demand.begin(), demand.end(), 0.0);
    if (std::abs(s - d) > 1e-9) throw InvalidArgument("transport: unbalanced masses");
    if (!std::all_of(cost.begin(), cost.end(), [](double c) { return std::isfinite(c); })) {
        throw InvalidArgument("transport: non-finite cost");
    }

    TransportSimplex solver(supply, demand, cost);
    solver.solve();
    return solver.plan();
}

} // namespace simforge
