// Truncated multivariate jets: the table of partial derivatives d^alpha u,
// |alpha| <= K, of a scalar quantity at a point. Generic over the scalar so
// the same code runs on plain doubles and on tape-backed scalars.
#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "pinn/multi_index.hpp"
#include "pinn/tape.hpp"

namespace pinn {

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static double constant(double v) { return v; }
  static double value(double s) { return s; }
};

template <>
struct ScalarTraits<TapeScalar> {
  static TapeScalar constant(double v) { return make_const(v); }
  static double value(const TapeScalar& s) { return s.v; }
};

template <class S>
struct Jet {
  std::shared_ptr<const JetSpace> space;
  std::vector<double> base;
  std::vector<S> c;  // c[pos] = d^alpha u at base, alpha = space->index_at(pos)

  int dim() const { return space->dim(); }
  int order() const { return space->order(); }

  const S& at(const MultiIndex& alpha) const { return c[space->position(alpha)]; }
  double value_at(const MultiIndex& alpha) const { return ScalarTraits<S>::value(at(alpha)); }
};

namespace detail {
template <class S>
void require_compatible(const Jet<S>& a, const Jet<S>& b) {
  if (a.space->dim() != b.space->dim() || a.space->order() != b.space->order())
    throw std::invalid_argument("jet: mismatched dimension or order");
  if (a.base != b.base) throw std::invalid_argument("jet: mismatched base point");
}
}  // namespace detail

template <class S>
Jet<S> jet_constant(std::shared_ptr<const JetSpace> space, std::span<const double> x, S v) {
  Jet<S> j{std::move(space), std::vector<double>(x.begin(), x.end()), {}};
  j.c.assign(static_cast<std::size_t>(j.space->size()), ScalarTraits<S>::constant(0.0));
  j.c[0] = std::move(v);
  return j;
}

// Jet of the i-th coordinate function at x.
template <class S = double>
Jet<S> jet_variable(std::shared_ptr<const JetSpace> space, int i, std::span<const double> x) {
  if (i < 0 || i >= space->dim()) throw std::invalid_argument("jet_variable: index out of range");
  if (static_cast<int>(x.size()) != space->dim())
    throw std::invalid_argument("jet_variable: point dimension mismatch");
  Jet<S> j = jet_constant<S>(space, x, ScalarTraits<S>::constant(x[i]));
  if (j.order() >= 1) {
    MultiIndex ei{std::vector<int>(j.dim(), 0)};
    ei.e[i] = 1;
    j.c[static_cast<std::size_t>(j.space->position(ei))] = ScalarTraits<S>::constant(1.0);
  }
  return j;
}

template <class S>
Jet<S> jet_add(const Jet<S>& a, const Jet<S>& b) {
  detail::require_compatible(a, b);
  Jet<S> out = a;
  for (std::size_t k = 0; k < out.c.size(); ++k) out.c[k] = a.c[k] + b.c[k];
  return out;
}

template <class S>
Jet<S> jet_sub(const Jet<S>& a, const Jet<S>& b) {
  detail::require_compatible(a, b);
  Jet<S> out = a;
  for (std::size_t k = 0; k < out.c.size(); ++k) out.c[k] = a.c[k] - b.c[k];
  return out;
}

// Scale by a quantity that is constant in x (a number or a parameter scalar).
template <class S, class T>
Jet<S> jet_scale(const Jet<S>& a, const T& s) {
  Jet<S> out = a;
  for (auto& ck : out.c) ck = ck * s;
  return out;
}

// Leibniz product: c[alpha] = sum_{beta <= alpha} multinomial(alpha,beta)
// a[beta] b[alpha-beta].
template <class S>
Jet<S> jet_mul(const Jet<S>& a, const Jet<S>& b) {
  detail::require_compatible(a, b);
  Jet<S> out = jet_constant<S>(a.space, a.base, ScalarTraits<S>::constant(0.0));
  for (int pos = 0; pos < a.space->size(); ++pos) {
    S acc = ScalarTraits<S>::constant(0.0);
    for (const auto& t : a.space->leibniz(pos)) {
      acc = acc + a.c[static_cast<std::size_t>(t.left)] *
                      b.c[static_cast<std::size_t>(t.right)] * t.coeff;
    }
    out.c[static_cast<std::size_t>(pos)] = acc;
  }
  return out;
}

// Composition g(f) given derivs[k] = g^(k)(f value), k = 0..K: per alpha,
// sum over set partitions P of the derivative slots of
// g^(|P|)(f) * prod over blocks of d^{alpha(S)} f.
template <class S>
Jet<S> jet_compose(const Jet<S>& f, std::span<const S> derivs) {
  if (static_cast<int>(derivs.size()) < f.order() + 1)
    throw std::invalid_argument("jet_compose: need derivatives up to the jet order");
  Jet<S> out = jet_constant<S>(f.space, f.base, derivs[0]);
  for (int pos = 1; pos < f.space->size(); ++pos) {
    S acc = ScalarTraits<S>::constant(0.0);
    for (const auto& plan : f.space->composition_plan(pos)) {
      S term = derivs[static_cast<std::size_t>(plan.nblocks)];
      for (int bp : plan.block_pos) term = term * f.c[static_cast<std::size_t>(bp)];
      acc = acc + term;
    }
    out.c[static_cast<std::size_t>(pos)] = acc;
  }
  return out;
}

// tanh(f) with tanh^(k) = P_k(tanh) from the derivative polynomial recursion.
template <class S>
Jet<S> jet_tanh(const Jet<S>& f) {
  using std::tanh;
  const int K = f.order();
  S t = tanh(f.c[0]);
  std::vector<S> derivs;
  derivs.reserve(static_cast<std::size_t>(K) + 1);
  derivs.push_back(t);
  for (int k = 1; k <= K; ++k) {
    std::vector<double> p = tanh_deriv_poly(k);
    S acc = ScalarTraits<S>::constant(p.back());
    for (std::size_t i = p.size() - 1; i-- > 0;) acc = acc * t + p[i];
    derivs.push_back(acc);
  }
  return jet_compose(f, std::span<const S>(derivs));
}

inline Jet<double> jet_exp(const Jet<double>& f) {
  std::vector<double> derivs(static_cast<std::size_t>(f.order()) + 1, std::exp(f.c[0]));
  return jet_compose(f, std::span<const double>(derivs));
}

inline Jet<double> jet_sin(const Jet<double>& f) {
  double s = std::sin(f.c[0]), co = std::cos(f.c[0]);
  const double cycle[4] = {s, co, -s, -co};
  std::vector<double> derivs(static_cast<std::size_t>(f.order()) + 1);
  for (std::size_t k = 0; k < derivs.size(); ++k) derivs[k] = cycle[k % 4];
  return jet_compose(f, std::span<const double>(derivs));
}

inline Jet<double> jet_cos(const Jet<double>& f) {
  double s = std::sin(f.c[0]), co = std::cos(f.c[0]);
  const double cycle[4] = {co, -s, -co, s};
  std::vector<double> derivs(static_cast<std::size_t>(f.order()) + 1);
  for (std::size_t k = 0; k < derivs.size(); ++k) derivs[k] = cycle[k % 4];
  return jet_compose(f, std::span<const double>(derivs));
}

}  // namespace pinn
