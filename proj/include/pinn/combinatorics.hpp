// Bell numbers, set partitions, and the tanh derivative polynomials.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace pinn {

inline std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// B_{n+1} = sum_k C(n,k) B_k, B_0 = 1.
inline std::int64_t bell_number(int n) {
  if (n < 0) throw std::invalid_argument("bell_number: n must be >= 0");
  if (n > 20) throw std::invalid_argument("bell_number: n > 20 overflows int64");
  std::vector<std::int64_t> b{1};
  for (int m = 0; m < n; ++m) {
    std::int64_t next = 0;
    for (int k = 0; k <= m; ++k) next += binomial(m, k) * b[k];
    b.push_back(next);
  }
  return b[n];
}

// All partitions of {0,...,n-1}, each a list of blocks (sorted elements,
// blocks ordered by smallest element). Enumerated via restricted growth
// strings, so the output order is deterministic.
inline std::vector<std::vector<std::vector<int>>> set_partitions(int n) {
  std::vector<std::vector<std::vector<int>>> out;
  if (n < 0) throw std::invalid_argument("set_partitions: n must be >= 0");
  if (n == 0) {
    out.push_back({});
    return out;
  }
  std::vector<int> label(n, 0);
  while (true) {
    int nblocks = 0;
    for (int i = 0; i < n; ++i) nblocks = std::max(nblocks, label[i] + 1);
    std::vector<std::vector<int>> part(nblocks);
    for (int i = 0; i < n; ++i) part[label[i]].push_back(i);
    out.push_back(std::move(part));

    // next restricted growth string
    int i = n - 1;
    for (; i > 0; --i) {
      int maxprev = 0;
      for (int j = 0; j < i; ++j) maxprev = std::max(maxprev, label[j]);
      if (label[i] <= maxprev) break;
    }
    if (i == 0) break;
    ++label[i];
    for (int j = i + 1; j < n; ++j) label[j] = 0;
  }
  return out;
}

// Coefficients of P_K with tanh^(K) = P_K(tanh); P_0(X) = X and
// P_{K+1}(X) = (1 - X^2) P_K'(X). Returned low-to-high degree, size K+2.
inline std::vector<double> tanh_deriv_poly(int order) {
  if (order < 0) throw std::invalid_argument("tanh_deriv_poly: order must be >= 0");
  if (order > 12) throw std::invalid_argument("tanh_deriv_poly: order capped at 12");
  std::vector<double> p{0.0, 1.0};  // X
  for (int k = 0; k < order; ++k) {
    std::vector<double> d(p.size() - 1, 0.0);
    for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = static_cast<double>(i) * p[i];
    std::vector<double> next(p.size() + 1, 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) {
      next[i] += d[i];
      next[i + 2] -= d[i];
    }
    p = std::move(next);
  }
  return p;
}

inline double eval_poly(const std::vector<double>& coeffs, double x) {
  double acc = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
  return acc;
}

}  // namespace pinn
