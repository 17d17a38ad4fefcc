// Closed-form networks with exploding parameter norm: the step interpolator,
// the traveling-bump initial-condition carrier, the characteristic-line bump
// train, and the sharpened sign chain. All are exact weight assignments, not
// approximations; their jet evaluations reproduce the closed forms.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pinn/mlp.hpp"

namespace pinn {

// Minimum pairwise gap among data abscissae and collocation points.
inline double min_point_gap(std::span<const double> xs, std::span<const double> colloc) {
  std::vector<double> all(xs.begin(), xs.end());
  all.insert(all.end(), colloc.begin(), colloc.end());
  std::sort(all.begin(), all.end());
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < all.size(); ++i) gap = std::min(gap, all[i] - all[i - 1]);
  return gap;
}

// Step interpolator for 1-d data (x_i, y_i):
//   u(x) = y_(1) + sum_i (y_(i+1) - y_(i))/2 * [s_p(x - x_(i) - gap/2) + 1],
// where s_p is the H-fold composition of t -> tanh(p t). Realized in width
// n-1: the first layer carries slope p at the shifted abscissae, the H-1
// middle layers keep slope p on the pass-through, the output layer holds the
// half-gap coefficients and the constant offset.
inline MlpParams friction_network(std::span<const double> xs, std::span<const double> ys,
                                  std::span<const double> colloc, double p, int h = 1) {
  const int n = static_cast<int>(xs.size());
  if (n < 2) throw std::invalid_argument("friction_network: need n >= 2");
  if (ys.size() != xs.size()) throw std::invalid_argument("friction_network: xs/ys mismatch");
  if (!(p > 0.0)) throw std::invalid_argument("friction_network: p must be > 0");
  double gap = min_point_gap(xs, colloc);
  if (!(gap > 0.0)) throw std::invalid_argument("friction_network: duplicate abscissae");

  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return xs[static_cast<std::size_t>(a)] < xs[static_cast<std::size_t>(b)]; });

  MlpParams net = MlpParams::zeros(h, n - 1, 1, 1);
  auto& first = net.layers.front();
  for (int i = 0; i < n - 1; ++i) {
    double xi = xs[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    first.at(0, i) = p;
    first.b[static_cast<std::size_t>(i)] = -p * (xi + gap / 2.0);
  }
  for (int k = 1; k < h; ++k) {
    auto& mid = net.layers[static_cast<std::size_t>(k)];
    for (int i = 0; i < n - 1; ++i) mid.at(i, i) = p;
  }
  auto& out = net.layers.back();
  double offset = ys[static_cast<std::size_t>(order[0])];
  for (int i = 0; i < n - 1; ++i) {
    double c = (ys[static_cast<std::size_t>(order[static_cast<std::size_t>(i + 1)])] -
                ys[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]) /
               2.0;
    out.at(i, 0) = c;
    offset += c;
  }
  out.b[0] = offset;
  return net;
}

// u(x,t) = g(x+0.5+pt) - g(x-0.5+pt) + g(0.5+pt) - g(1.5+pt) with
// g = tanh composed H times; at t = 0 this is the bell-shaped initial
// profile, and for large p it vanishes on the interior and the lateral
// boundary. Width 4, sharpness only inside the first affine layer.
inline MlpParams heat_counterexample_network(double p, int h) {
  if (!(p > 0.0)) throw std::invalid_argument("heat_counterexample_network: p must be > 0");
  if (h < 1) throw std::invalid_argument("heat_counterexample_network: h must be >= 1");
  MlpParams net = MlpParams::zeros(h, 4, 2, 1);
  auto& first = net.layers.front();
  const double xw[4] = {1.0, 1.0, 0.0, 0.0};
  const double bias[4] = {0.5, -0.5, 0.5, 1.5};
  for (int j = 0; j < 4; ++j) {
    first.at(0, j) = xw[j];
    first.at(1, j) = p;
    first.b[static_cast<std::size_t>(j)] = bias[j];
  }
  for (int k = 1; k < h; ++k) {
    auto& mid = net.layers[static_cast<std::size_t>(k)];
    for (int j = 0; j < 4; ++j) mid.at(j, j) = 1.0;
  }
  auto& out = net.layers.back();
  out.at(0, 0) = 1.0;
  out.at(1, 0) = -1.0;
  out.at(2, 0) = 1.0;
  out.at(3, 0) = -1.0;
  return net;
}

// u(x,t) = 1 + sum_i (y_i/2) [s_p(x-t-x_i+t_i+delta) - s_p(x-t-x_i+t_i-delta)]
// with s_p the H-fold composition of tanh(p .). Interpolating bumps along the
// characteristics x - t = x_i - t_i; width 2n.
inline MlpParams advection_bumps(std::span<const double> xs, std::span<const double> ts,
                                 std::span<const double> ys, double delta, double p, int h) {
  const int n = static_cast<int>(xs.size());
  if (n < 1 || ts.size() != xs.size() || ys.size() != xs.size())
    throw std::invalid_argument("advection_bumps: bad data");
  if (!(p > 0.0) || !(delta > 0.0))
    throw std::invalid_argument("advection_bumps: p and delta must be > 0");
  double sep = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j)
        sep = std::min(sep, std::abs(xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(j)] +
                                     ts[static_cast<std::size_t>(j)] - ts[static_cast<std::size_t>(i)]));
  if (n > 1 && !(delta <= 0.5 * sep))
    throw std::invalid_argument("advection_bumps: delta above half the characteristic gap");

  MlpParams net = MlpParams::zeros(h, 2 * n, 2, 1);
  auto& first = net.layers.front();
  for (int i = 0; i < n; ++i) {
    double shift = -xs[static_cast<std::size_t>(i)] + ts[static_cast<std::size_t>(i)];
    for (int s = 0; s < 2; ++s) {
      int j = 2 * i + s;
      first.at(0, j) = p;
      first.at(1, j) = -p;
      first.b[static_cast<std::size_t>(j)] = p * (shift + (s == 0 ? delta : -delta));
    }
  }
  for (int k = 1; k < h; ++k) {
    auto& mid = net.layers[static_cast<std::size_t>(k)];
    for (int j = 0; j < 2 * n; ++j) mid.at(j, j) = p;
  }
  auto& out = net.layers.back();
  for (int i = 0; i < n; ++i) {
    out.at(2 * i, 0) = ys[static_cast<std::size_t>(i)] / 2.0;
    out.at(2 * i + 1, 0) = -ys[static_cast<std::size_t>(i)] / 2.0;
  }
  out.b[0] = 1.0;
  return net;
}

// u_p = tanh(p .) applied after H-1 plain tanh layers; the pointwise limit is
// the sign function. One neuron per layer.
inline MlpParams sign_limit_network(double p, int h) {
  if (!(p > 0.0)) throw std::invalid_argument("sign_limit_network: p must be > 0");
  if (h < 1) throw std::invalid_argument("sign_limit_network: h must be >= 1");
  MlpParams net = MlpParams::zeros(h, 1, 1, 1);
  for (int k = 0; k < h; ++k) net.layers[static_cast<std::size_t>(k)].at(0, 0) = (k == h - 1) ? p : 1.0;
  net.layers.back().at(0, 0) = 1.0;
  return net;
}

}  // namespace pinn
