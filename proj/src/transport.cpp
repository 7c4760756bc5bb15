#include "hyprec/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyprec/errors.hpp"

namespace hyprec {

namespace {

constexpr double kReducedCostTol = 1e-12;

void validate(std::span<const double> mu, std::span<const double> nu, const Matrix& cost,
              std::size_t cap) {
  if (mu.size() > cap || nu.size() > cap) {
    throw std::invalid_argument("transport support of size " +
                                std::to_string(std::max(mu.size(), nu.size())) + " exceeds cap " +
                                std::to_string(cap) + "; subsample the neighbourhood");
  }
  if (mu.empty() || nu.empty()) throw std::invalid_argument("transport support is empty");
  if (cost.rows != mu.size() || cost.cols != nu.size()) {
    throw std::invalid_argument("transport cost matrix shape does not match supports");
  }
  double smu = 0.0;
  double snu = 0.0;
  for (double m : mu) {
    if (!(m >= 0.0)) throw std::invalid_argument("transport mass must be non-negative");
    smu += m;
  }
  for (double m : nu) {
    if (!(m >= 0.0)) throw std::invalid_argument("transport mass must be non-negative");
    snu += m;
  }
  if (std::abs(smu - 1.0) > 1e-12 || std::abs(snu - 1.0) > 1e-12) {
    throw std::invalid_argument("transport distributions must each sum to 1");
  }
}

// Transportation simplex. The basis is a spanning tree over m row nodes and n
// column nodes (ids m..m+n-1) with exactly m + n - 1 cells, zero-flow cells allowed.
class TransportSimplex {
 public:
  TransportSimplex(std::span<const double> supply, std::span<const double> demand,
                   const Matrix& cost)
      : m_(supply.size()), n_(demand.size()), cost_(cost), flow_(m_, n_), basic_(m_ * n_, 0) {
    north_west_corner(supply, demand);
  }

  Matrix solve() {
    std::vector<double> u(m_), v(n_);
    const std::size_t max_iter = 50 * (m_ + n_) * (m_ + n_) + 1000;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
      potentials(u, v);
      // Bland's rule: first improving cell in row-major order.
      std::size_t enter = m_ * n_;
      for (std::size_t c = 0; c < m_ * n_ && enter == m_ * n_; ++c) {
        if (basic_[c]) continue;
        const std::size_t i = c / n_;
        const std::size_t j = c % n_;
        if (cost_(i, j) - u[i] - v[j] < -kReducedCostTol) enter = c;
      }
      if (enter == m_ * n_) return flow_;
      pivot(enter);
    }
    throw NumericalError("transportation simplex did not converge");
  }

 private:
  void north_west_corner(std::span<const double> supply, std::span<const double> demand) {
    std::vector<double> s(supply.begin(), supply.end());
    std::vector<double> d(demand.begin(), demand.end());
    std::size_t i = 0;
    std::size_t j = 0;
    while (true) {
      const double x = std::min(s[i], d[j]);
      flow_(i, j) = x;
      basic_[i * n_ + j] = 1;
      s[i] -= x;
      d[j] -= x;
      if (i == m_ - 1 && j == n_ - 1) break;
      if (i == m_ - 1) {
        ++j;
      } else if (j == n_ - 1) {
        ++i;
      } else if (s[i] <= d[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  // Tree adjacency over the current basis.
  std::vector<std::vector<std::size_t>> tree() const {
    std::vector<std::vector<std::size_t>> adj(m_ + n_);
    for (std::size_t c = 0; c < m_ * n_; ++c) {
      if (!basic_[c]) continue;
      const std::size_t i = c / n_;
      const std::size_t j = c % n_;
      adj[i].push_back(m_ + j);
      adj[m_ + j].push_back(i);
    }
    return adj;
  }

  void potentials(std::vector<double>& u, std::vector<double>& v) const {
    const auto adj = tree();
    std::vector<char> seen(m_ + n_, 0);
    std::vector<std::size_t> stack{0};
    u[0] = 0.0;
    seen[0] = 1;
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      for (std::size_t b : adj[a]) {
        if (seen[b]) continue;
        seen[b] = 1;
        if (a < m_) {
          v[b - m_] = cost_(a, b - m_) - u[a];
        } else {
          u[b] = cost_(b, a - m_) - v[a - m_];
        }
        stack.push_back(b);
      }
    }
  }

  void pivot(std::size_t enter) {
    const std::size_t ei = enter / n_;
    const std::size_t ej = enter % n_;
    // Tree path from column node ej to row node ei.
    const auto adj = tree();
    std::vector<std::size_t> parent(m_ + n_, std::numeric_limits<std::size_t>::max());
    std::vector<std::size_t> stack{m_ + ej};
    parent[m_ + ej] = m_ + ej;
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      if (a == ei) break;
      for (std::size_t b : adj[a]) {
        if (parent[b] != std::numeric_limits<std::size_t>::max()) continue;
        parent[b] = a;
        stack.push_back(b);
      }
    }
    // Walk back from ei; cells alternate +, -, ... starting at ei's edge, which is
    // the cell adjacent to the entering cell's row and therefore '-'.
    std::vector<std::size_t> cells;
    for (std::size_t a = ei; a != m_ + ej; a = parent[a]) {
      const std::size_t b = parent[a];
      const std::size_t row = a < m_ ? a : b;
      const std::size_t col = a < m_ ? b - m_ : a - m_;
      cells.push_back(row * n_ + col);
    }
    // cells[0] touches row ei: sign '-'; cells[1]: '+', ...
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leave = m_ * n_;
    for (std::size_t k = 0; k < cells.size(); k += 2) {
      const double f = flow_.data[cells[k]];
      if (f < theta || (f == theta && cells[k] < leave)) {
        theta = f;
        leave = cells[k];
      }
    }
    flow_.data[enter] += theta;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      double& f = flow_.data[cells[k]];
      f += (k % 2 == 0) ? -theta : theta;
      if (f < 0.0) f = 0.0;
    }
    flow_.data[leave] = 0.0;
    basic_[leave] = 0;
    basic_[enter] = 1;
  }

  std::size_t m_;
  std::size_t n_;
  const Matrix& cost_;
  Matrix flow_;
  std::vector<char> basic_;
};

}  // namespace

Matrix transport_plan(std::span<const double> mu, std::span<const double> nu, const Matrix& cost,
                      std::size_t cap) {
  validate(mu, nu, cost, cap);
  return TransportSimplex(mu, nu, cost).solve();
}

double wasserstein1(std::span<const double> mu, std::span<const double> nu, const Matrix& cost,
                    std::size_t cap) {
  const Matrix plan = transport_plan(mu, nu, cost, cap);
  double w = 0.0;
  for (std::size_t c = 0; c < plan.size(); ++c) w += plan.data[c] * cost.data[c];
  return w;
}

}  // namespace hyprec
