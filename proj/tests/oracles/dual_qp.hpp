#pragma once

// Soft-margin SVM dual solved by projected gradient ascent:
//   max  sum a - 1/2 sum a_p a_q y_p y_q K_pq   s.t. 0 <= a <= C, sum a y = 0.
// The projection onto {box, hyperplane} is found by bisection on the
// multiplier of the equality constraint.

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

inline std::vector<double> project_feasible(const std::vector<double>& v, const std::vector<int>& y, double c) {
  auto clipped = [&](double mu, std::vector<double>& out) {
    double s = 0.0;
    for (std::size_t p = 0; p < v.size(); ++p) {
      out[p] = std::clamp(v[p] - mu * y[p], 0.0, c);
      s += out[p] * y[p];
    }
    return s;
  };
  std::vector<double> out(v.size());
  double lo = -1e6, hi = 1e6;  // s(mu) is non-increasing in mu
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (clipped(mid, out) > 0.0) lo = mid;
    else hi = mid;
  }
  clipped(0.5 * (lo + hi), out);
  return out;
}

inline double dual_value(const std::vector<std::vector<double>>& k, const std::vector<int>& y,
                         const std::vector<double>& a) {
  double lin = 0.0, quad = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) {
    lin += a[p];
    for (std::size_t q = 0; q < a.size(); ++q) quad += a[p] * a[q] * y[p] * y[q] * k[p][q];
  }
  return lin - 0.5 * quad;
}

inline std::vector<double> solve_dual(const std::vector<std::vector<double>>& k, const std::vector<int>& y,
                                      double c, int iterations = 200000) {
  const std::size_t n = y.size();
  double lipschitz = 0.0;  // Frobenius bound on the Hessian norm
  for (const auto& row : k)
    for (double v : row) lipschitz += v * v;
  const double step = 1.0 / std::max(1e-12, std::sqrt(lipschitz));
  std::vector<double> a(n, 0.0), grad(n);
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t p = 0; p < n; ++p) {
      double s = 0.0;
      for (std::size_t q = 0; q < n; ++q) s += y[p] * y[q] * k[p][q] * a[q];
      grad[p] = 1.0 - s;
    }
    std::vector<double> next(n);
    for (std::size_t p = 0; p < n; ++p) next[p] = a[p] + step * grad[p];
    next = project_feasible(next, y, c);
    double moved = 0.0;
    for (std::size_t p = 0; p < n; ++p) moved = std::max(moved, std::abs(next[p] - a[p]));
    a = std::move(next);
    if (moved < 1e-13) break;
  }
  return a;
}

}  // namespace oracle
