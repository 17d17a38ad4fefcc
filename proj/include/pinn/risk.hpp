// Risk functionals: the empirical risk (data misfit + boundary misfit +
// squared residuals), its ridge and derivative-penalty extensions, and Monte
// Carlo estimates of the theoretical risk, physics inconsistency, and
// overfitting gap.
#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pinn/mlp.hpp"
#include "pinn/mlp_grad.hpp"
#include "pinn/operators.hpp"
#include "pinn/problem.hpp"

namespace pinn {

// Output vector norm: plain (unaveraged) Euclidean norm on R^{d2}. Pinned by
// tests; for d2 = 1 it coincides with the averaged convention.
inline constexpr bool kAveragedOutputNorm = false;

enum class RiskKind { kEmpirical, kRidge, kSobolev };

struct RiskSpec {
  double lambda_d = 0.0;
  double lambda_e = 0.0;
  double lambda_ridge = 0.0;
  double lambda_t = 0.0;
  int m = 0;  // derivative penalty runs over |alpha| <= m+1
  std::vector<Operator> operators;
  VectorField h;
  SampleSet samples;
  BoxDomain domain;
  BoundarySet boundary;

  int max_operator_order() const {
    int k = 0;
    for (const auto& op : operators) k = std::max(k, operator_order(op));
    return k;
  }

  // Jet order needed at collocation points.
  int jet_order() const {
    int k = max_operator_order();
    if (lambda_t > 0.0) k = std::max(k, m + 1);
    return k;
  }

  bool data_active() const { return lambda_d > 0.0 && samples.n > 0; }
  bool boundary_active() const { return lambda_e > 0.0 && samples.n_e > 0; }
  bool residual_active() const { return !operators.empty() && samples.n_r > 0; }
  bool sobolev_active() const { return lambda_t > 0.0 && samples.n_r > 0; }

  void validate() const {
    if (lambda_d < 0 || lambda_e < 0 || lambda_ridge < 0 || lambda_t < 0)
      throw std::invalid_argument("RiskSpec: negative hyperparameter");
    if (lambda_d == 0.0 && lambda_e == 0.0)
      throw std::invalid_argument("RiskSpec: lambda_d and lambda_e cannot both be 0");
    domain.validate();
    for (const auto& op : operators) {
      pinn::validate(op);
      if (std::visit([](const auto& o) { return o.d1; }, op) != domain.dim())
        throw std::invalid_argument("RiskSpec: operator d1 != domain dim");
      if (std::visit([](const auto& o) { return o.d2; }, op) != static_cast<int>(h.size()))
        throw std::invalid_argument("RiskSpec: operator d2 != output dim");
    }
    if (lambda_t > 0.0) {
      if (m + 1 > kMaxJetOrder)
        throw std::invalid_argument("RiskSpec: m + 1 above jet cap");
      // The pointwise-evaluation hypothesis m >= max(floor(d1/2), K) is
      // required in hybrid mode; in pure solver mode (no data term) the
      // floor(d1/2) part is unnecessary and lower m is accepted.
      if (lambda_d > 0.0 && samples.n > 0) {
        int need = std::max(domain.dim() / 2, max_operator_order());
        if (m < need)
          throw std::invalid_argument("RiskSpec: lambda_t > 0 needs m >= max(floor(d1/2), K)");
      }
    }
  }
};

struct RiskReport {
  double total = 0.0;
  double data = 0.0;      // lambda_d / n * sum
  double boundary = 0.0;  // lambda_e / n_e * sum
  std::vector<double> residual_per_op;
  double residual = 0.0;  // 1 / n_r * sum over operators
  double ridge = 0.0;     // lambda_ridge * |theta|^2
  double sobolev = 0.0;   // lambda_t / n_r * sum over |alpha| <= m+1
  int n = 0, n_e = 0, n_r = 0;
};

namespace detail {

inline std::vector<int> sobolev_positions(const JetSpace& space, int m) {
  std::vector<int> pos;
  for (int p = 0; p < space.size(); ++p)
    if (space.index_at(p).order() <= m + 1) pos.push_back(p);
  return pos;
}

}  // namespace detail

// Fast evaluation path: forward jets with plain doubles, hand-written
// backward, points processed in batched chunks. Boundary condition values
// and residual coefficient fields are evaluated once at construction (the
// sample points never move during a run). Single-threaded, one instance per
// training run.
class RiskEvaluator {
 public:
  static constexpr int kChunk = 256;

  RiskEvaluator(const RiskSpec& spec, const MlpParams& shape)
      : spec_(&spec),
        ws0_(shape, 0, kChunk),
        wsc_(shape, spec.jet_order(), kChunk),
        space_c_(JetSpace::get(shape.d1, spec.jet_order())) {
    spec.validate();
    if (shape.d1 != spec.domain.dim() || shape.d2 != static_cast<int>(spec.h.size()))
      throw std::invalid_argument("RiskEvaluator: network shape does not match the problem");
    for (const auto& op : spec.operators) plans_.push_back(ResidualPlan::build(op, *space_c_));
    if (spec.lambda_t > 0.0) sob_pos_ = detail::sobolev_positions(*space_c_, spec.m);
    const int d2 = shape.d2;
    adj_.assign(static_cast<std::size_t>(d2) * kChunk * space_c_->size(), 0.0);
    adj0_.assign(static_cast<std::size_t>(d2) * kChunk, 0.0);

    const SampleSet& smp = spec.samples;
    h_vals_.assign(static_cast<std::size_t>(smp.n_e) * d2, 0.0);
    for (int j = 0; j < smp.n_e; ++j) {
      auto x = smp.boundary_point(j);
      for (int c = 0; c < d2; ++c)
        h_vals_[static_cast<std::size_t>(j) * d2 + c] = spec.h[static_cast<std::size_t>(c)].eval(x);
    }
    phi_.resize(plans_.size());
    for (std::size_t k = 0; k < plans_.size(); ++k) {
      const auto& mono = plans_[k].monomials;
      phi_[k].assign(static_cast<std::size_t>(smp.n_r) * mono.size(), 0.0);
      for (int l = 0; l < smp.n_r; ++l) {
        auto x = smp.colloc_point(l);
        for (std::size_t mi = 0; mi < mono.size(); ++mi)
          phi_[k][static_cast<std::size_t>(l) * mono.size() + mi] = mono[mi].coef->eval(x);
      }
    }
  }

  RiskReport value(const MlpParams& theta, RiskKind kind) { return run(theta, kind, nullptr); }

  RiskReport value_and_grad(const MlpParams& theta, RiskKind kind, std::span<double> grad) {
    if (grad.size() != theta.param_count())
      throw std::invalid_argument("RiskEvaluator: gradient size mismatch");
    std::fill(grad.begin(), grad.end(), 0.0);
    return run(theta, kind, &grad);
  }

 private:
  RiskReport run(const MlpParams& theta, RiskKind kind, std::span<double>* grad) {
    const RiskSpec& s = *spec_;
    const SampleSet& smp = s.samples;
    RiskReport rep;
    rep.n = smp.n;
    rep.n_e = smp.n_e;
    rep.n_r = smp.n_r;
    rep.residual_per_op.assign(plans_.size(), 0.0);
    const int d2 = theta.d2;

    if (s.data_active()) {
      const double w = s.lambda_d / smp.n;
      double sum = 0.0;
      for (int start = 0; start < smp.n; start += kChunk) {
        const int B = std::min(kChunk, smp.n - start);
        ws0_.forward_batch(theta,
                           {smp.data_x.data() + static_cast<std::size_t>(start) * theta.d1,
                            static_cast<std::size_t>(B) * theta.d1},
                           B);
        for (int j = 0; j < d2; ++j) {
          const double* out = ws0_.output_at(j);
          for (int pnt = 0; pnt < B; ++pnt) {
            double r = out[pnt] - smp.data_y[static_cast<std::size_t>(start + pnt) * d2 + j];
            sum += r * r;
            adj0_[static_cast<std::size_t>(j) * B + pnt] = 2.0 * w * r;
          }
        }
        if (grad)
          ws0_.backward_batch(theta, {adj0_.data(), static_cast<std::size_t>(d2) * B}, *grad);
      }
      rep.data = w * sum;
    }

    if (s.boundary_active()) {
      const double w = s.lambda_e / smp.n_e;
      double sum = 0.0;
      for (int start = 0; start < smp.n_e; start += kChunk) {
        const int B = std::min(kChunk, smp.n_e - start);
        ws0_.forward_batch(theta,
                           {smp.boundary_x.data() + static_cast<std::size_t>(start) * theta.d1,
                            static_cast<std::size_t>(B) * theta.d1},
                           B);
        for (int j = 0; j < d2; ++j) {
          const double* out = ws0_.output_at(j);
          for (int pnt = 0; pnt < B; ++pnt) {
            double r = out[pnt] - h_vals_[static_cast<std::size_t>(start + pnt) * d2 + j];
            sum += r * r;
            adj0_[static_cast<std::size_t>(j) * B + pnt] = 2.0 * w * r;
          }
        }
        if (grad)
          ws0_.backward_batch(theta, {adj0_.data(), static_cast<std::size_t>(d2) * B}, *grad);
      }
      rep.boundary = w * sum;
    }

    const bool want_sobolev = kind == RiskKind::kSobolev && s.sobolev_active();
    if ((s.residual_active() || want_sobolev) && smp.n_r > 0) {
      const int C = space_c_->size();
      std::vector<double> res_sum(plans_.size(), 0.0);
      double sob_sum = 0.0;
      const double wr = 1.0 / smp.n_r;
      const double wt = s.lambda_t / smp.n_r;
      for (int start = 0; start < smp.n_r; start += kChunk) {
        const int B = std::min(kChunk, smp.n_r - start);
        wsc_.forward_batch(theta,
                           {smp.colloc_x.data() + static_cast<std::size_t>(start) * theta.d1,
                            static_cast<std::size_t>(B) * theta.d1},
                           B);
        const std::size_t bc = static_cast<std::size_t>(B) * C;
        std::fill(adj_.begin(), adj_.begin() + static_cast<std::size_t>(d2) * bc, 0.0);
        for (int pnt = 0; pnt < B; ++pnt) {
          const int l = start + pnt;
          auto get = [&](int comp, int pos) {
            return wsc_.output_at(comp)[static_cast<std::size_t>(pnt) * C + pos];
          };
          for (std::size_t k = 0; k < plans_.size(); ++k) {
            const auto& mono = plans_[k].monomials;
            const double* phis = phi_[k].data() + static_cast<std::size_t>(l) * mono.size();
            double f = 0.0;
            for (std::size_t mi = 0; mi < mono.size(); ++mi) {
              double term = phis[mi];
              for (const auto& fac : mono[mi].factors)
                for (int r = 0; r < fac.exp; ++r) term *= get(fac.comp, fac.pos);
              f += term;
            }
            res_sum[k] += f * f;
            if (grad) {
              const double scale = 2.0 * wr * f;
              for (std::size_t mi = 0; mi < mono.size(); ++mi) {
                const auto& facs = mono[mi].factors;
                for (std::size_t fi = 0; fi < facs.size(); ++fi) {
                  double excl = phis[mi];
                  for (std::size_t fj = 0; fj < facs.size(); ++fj) {
                    if (fj == fi) continue;
                    double u = get(facs[fj].comp, facs[fj].pos);
                    for (int r = 0; r < facs[fj].exp; ++r) excl *= u;
                  }
                  double v = get(facs[fi].comp, facs[fi].pos);
                  double dpow = static_cast<double>(facs[fi].exp);
                  for (int r = 0; r < facs[fi].exp - 1; ++r) dpow *= v;
                  adj_[static_cast<std::size_t>(facs[fi].comp) * bc +
                       static_cast<std::size_t>(pnt) * C + facs[fi].pos] += scale * excl * dpow;
                }
              }
            }
          }
          if (want_sobolev) {
            for (int comp = 0; comp < d2; ++comp) {
              for (int pos : sob_pos_) {
                double v = get(comp, pos);
                sob_sum += v * v;
                if (grad)
                  adj_[static_cast<std::size_t>(comp) * bc + static_cast<std::size_t>(pnt) * C +
                       pos] += 2.0 * wt * v;
              }
            }
          }
        }
        if (grad)
          wsc_.backward_batch(theta, {adj_.data(), static_cast<std::size_t>(d2) * bc}, *grad);
      }
      for (std::size_t k = 0; k < plans_.size(); ++k) {
        rep.residual_per_op[k] = wr * res_sum[k];
        rep.residual += rep.residual_per_op[k];
      }
      if (want_sobolev) rep.sobolev = wt * sob_sum;
    }

    if (kind != RiskKind::kEmpirical && s.lambda_ridge > 0.0) {
      rep.ridge = s.lambda_ridge * theta.param_norm_sq();
      if (grad) {
        std::vector<double> flat = theta.flatten();
        for (std::size_t i = 0; i < flat.size(); ++i)
          (*grad)[i] += 2.0 * s.lambda_ridge * flat[i];
      }
    }

    rep.total = rep.data + rep.boundary + rep.residual + rep.ridge + rep.sobolev;
    return rep;
  }

  const RiskSpec* spec_;
  MlpJetWorkspace ws0_;
  MlpJetWorkspace wsc_;
  std::shared_ptr<const JetSpace> space_c_;
  std::vector<ResidualPlan> plans_;
  std::vector<int> sob_pos_;
  std::vector<double> adj_, adj0_;
  std::vector<double> h_vals_;
  std::vector<std::vector<double>> phi_;
};

// ---------------------------------------------------------------------------
// Reference path: the same risks assembled as tape scalars. Slow but exact;
// gradients flow through grad_params.

struct TapeRisk {
  RiskReport report;
  TapeScalar total;
  TapeMlp mlp;
};

inline TapeRisk risk_on_tape(const MlpParams& theta, const RiskSpec& spec, RiskKind kind,
                             Tape& tape) {
  spec.validate();
  const SampleSet& smp = spec.samples;
  TapeRisk out{RiskReport{}, make_const(0.0), TapeMlp::attach(theta, tape)};
  RiskReport& rep = out.report;
  rep.n = smp.n;
  rep.n_e = smp.n_e;
  rep.n_r = smp.n_r;
  const int d2 = theta.d2;
  TapeScalar total = make_const(0.0);

  if (spec.data_active()) {
    TapeScalar sum = make_const(0.0);
    for (int i = 0; i < smp.n; ++i) {
      auto jets = out.mlp.forward(smp.data_point(i), 0);
      auto y = smp.data_value(i);
      for (int j = 0; j < d2; ++j) {
        TapeScalar r = jets[static_cast<std::size_t>(j)].c[0] - y[static_cast<std::size_t>(j)];
        sum = sum + r * r;
      }
    }
    TapeScalar term = sum * (spec.lambda_d / smp.n);
    rep.data = term.v;
    total = total + term;
  }

  if (spec.boundary_active()) {
    TapeScalar sum = make_const(0.0);
    for (int j = 0; j < smp.n_e; ++j) {
      auto x = smp.boundary_point(j);
      auto jets = out.mlp.forward(x, 0);
      for (int c = 0; c < d2; ++c) {
        TapeScalar r = jets[static_cast<std::size_t>(c)].c[0] -
                       spec.h[static_cast<std::size_t>(c)].eval(x);
        sum = sum + r * r;
      }
    }
    TapeScalar term = sum * (spec.lambda_e / smp.n_e);
    rep.boundary = term.v;
    total = total + term;
  }

  const bool want_sobolev = kind == RiskKind::kSobolev && spec.sobolev_active();
  rep.residual_per_op.assign(spec.operators.size(), 0.0);
  if ((spec.residual_active() || want_sobolev) && smp.n_r > 0) {
    const int order = spec.jet_order();
    auto space = JetSpace::get(theta.d1, order);
    std::vector<ResidualPlan> plans;
    for (const auto& op : spec.operators) plans.push_back(ResidualPlan::build(op, *space));
    std::vector<int> sob_pos =
        spec.lambda_t > 0.0 ? detail::sobolev_positions(*space, spec.m) : std::vector<int>{};
    std::vector<TapeScalar> res_sum(plans.size(), make_const(0.0));
    TapeScalar sob_sum = make_const(0.0);
    for (int l = 0; l < smp.n_r; ++l) {
      auto x = smp.colloc_point(l);
      auto jets = out.mlp.forward(x, order);
      for (std::size_t k = 0; k < plans.size(); ++k) {
        TapeScalar f = plans[k].template eval<TapeScalar>(x, [&](int comp, int pos) {
          return jets[static_cast<std::size_t>(comp)].c[static_cast<std::size_t>(pos)];
        });
        res_sum[k] = res_sum[k] + f * f;
      }
      if (want_sobolev) {
        for (int comp = 0; comp < d2; ++comp)
          for (int pos : sob_pos) {
            TapeScalar v = jets[static_cast<std::size_t>(comp)].c[static_cast<std::size_t>(pos)];
            sob_sum = sob_sum + v * v;
          }
      }
    }
    for (std::size_t k = 0; k < plans.size(); ++k) {
      TapeScalar term = res_sum[k] * (1.0 / smp.n_r);
      rep.residual_per_op[k] = term.v;
      rep.residual += term.v;
      total = total + term;
    }
    if (want_sobolev) {
      TapeScalar term = sob_sum * (spec.lambda_t / smp.n_r);
      rep.sobolev = term.v;
      total = total + term;
    }
  }

  if (kind != RiskKind::kEmpirical && spec.lambda_ridge > 0.0) {
    TapeScalar term = out.mlp.param_norm_sq() * spec.lambda_ridge;
    rep.ridge = term.v;
    total = total + term;
  }

  rep.total = total.v;
  out.total = total;
  return out;
}

// One-shot value wrappers.
inline RiskReport empirical_risk(const MlpParams& theta, const RiskSpec& spec) {
  RiskEvaluator ev(spec, theta);
  return ev.value(theta, RiskKind::kEmpirical);
}
inline RiskReport ridge_risk(const MlpParams& theta, const RiskSpec& spec) {
  RiskEvaluator ev(spec, theta);
  return ev.value(theta, RiskKind::kRidge);
}
inline RiskReport sobolev_risk(const MlpParams& theta, const RiskSpec& spec) {
  RiskEvaluator ev(spec, theta);
  return ev.value(theta, RiskKind::kSobolev);
}

// ---------------------------------------------------------------------------
// Monte Carlo estimates against an arbitrary jet-evaluable function.

struct JetFunction {
  int d1 = 0, d2 = 0;
  std::function<std::vector<Jet<double>>(std::span<const double>, int)> eval;

  // Workspace-backed network evaluation. The captured workspace cache is
  // mutable shared state: evaluate one JetFunction from one thread at a time.
  static JetFunction from_mlp(const MlpParams& p) {
    auto theta = std::make_shared<const MlpParams>(p);
    auto cache = std::make_shared<std::map<int, std::shared_ptr<MlpJetWorkspace>>>();
    return JetFunction{
        p.d1, p.d2, [theta, cache](std::span<const double> x, int order) {
          auto it = cache->find(order);
          if (it == cache->end())
            it = cache->emplace(order, std::make_shared<MlpJetWorkspace>(*theta, order)).first;
          MlpJetWorkspace& ws = *it->second;
          ws.forward(*theta, x);
          auto out = ws.output();
          const int C = ws.coeff_count();
          auto space = JetSpace::get(theta->d1, order);
          std::vector<Jet<double>> jets;
          jets.reserve(static_cast<std::size_t>(theta->d2));
          for (int comp = 0; comp < theta->d2; ++comp) {
            Jet<double> j{space, std::vector<double>(x.begin(), x.end()),
                          std::vector<double>(out.begin() + static_cast<std::ptrdiff_t>(comp) * C,
                                              out.begin() + static_cast<std::ptrdiff_t>(comp + 1) * C)};
            jets.push_back(std::move(j));
          }
          return jets;
        }};
  }

  static JetFunction from_field(const VectorField& f, int d1) {
    return JetFunction{d1, static_cast<int>(f.size()),
                       [f, d1](std::span<const double> x, int order) {
                         auto space = JetSpace::get(d1, order);
                         std::vector<Jet<double>> jets;
                         jets.reserve(f.size());
                         for (const auto& e : f) jets.push_back(e.eval_jet(space, x));
                         return jets;
                       }};
  }
};

struct McEstimate {
  double value = 0.0;
  double se = 0.0;
};

struct McRisk {
  double total = 0.0;
  double se = 0.0;
  double data = 0.0;
  McEstimate boundary;
  McEstimate interior;
};

namespace detail {
inline McEstimate mean_and_se(const std::vector<double>& g) {
  McEstimate e;
  if (g.empty()) return e;
  double sum = 0.0;
  for (double v : g) sum += v;
  e.value = sum / static_cast<double>(g.size());
  if (g.size() > 1) {
    double ss = 0.0;
    for (double v : g) ss += (v - e.value) * (v - e.value);
    e.se = std::sqrt(ss / (static_cast<double>(g.size()) - 1.0) /
                     static_cast<double>(g.size()));
  }
  return e;
}
}  // namespace detail

// Monte Carlo estimate of the theoretical risk: the data misfit stays the
// exact finite sum, the boundary misfit becomes an expectation under the
// face-weighted measure, and each residual integral (1/|Omega|) int F^2
// becomes an expectation under the uniform law on the domain.
inline McRisk theoretical_risk_mc(const JetFunction& u, const RiskSpec& spec, int n_mc_boundary,
                                  int n_mc_interior, std::uint64_t seed,
                                  bool include_data = true) {
  McRisk out;
  const bool boundary_on = spec.lambda_e > 0.0;
  const bool interior_on = !spec.operators.empty();
  if (boundary_on && n_mc_boundary <= 0)
    throw std::invalid_argument("theoretical_risk_mc: zero boundary MC count");
  if (interior_on && n_mc_interior <= 0)
    throw std::invalid_argument("theoretical_risk_mc: zero interior MC count");

  if (include_data && spec.lambda_d > 0.0 && spec.samples.n > 0) {
    double sum = 0.0;
    for (int i = 0; i < spec.samples.n; ++i) {
      auto jets = u.eval(spec.samples.data_point(i), 0);
      auto y = spec.samples.data_value(i);
      for (int j = 0; j < u.d2; ++j) {
        double r = jets[static_cast<std::size_t>(j)].c[0] - y[static_cast<std::size_t>(j)];
        sum += r * r;
      }
    }
    out.data = spec.lambda_d / spec.samples.n * sum;
  }

  std::vector<double> x(static_cast<std::size_t>(spec.domain.dim()));
  if (boundary_on) {
    RngStream rng(seed, StreamId::kMcBoundary);
    std::vector<double> g(static_cast<std::size_t>(n_mc_boundary));
    for (int j = 0; j < n_mc_boundary; ++j) {
      spec.boundary.sample(spec.domain, rng, x);
      auto jets = u.eval(x, 0);
      double sq = 0.0;
      for (int c = 0; c < u.d2; ++c) {
        double r = jets[static_cast<std::size_t>(c)].c[0] -
                   spec.h[static_cast<std::size_t>(c)].eval(x);
        sq += r * r;
      }
      g[static_cast<std::size_t>(j)] = sq;
    }
    McEstimate e = detail::mean_and_se(g);
    out.boundary = {spec.lambda_e * e.value, spec.lambda_e * e.se};
  }

  if (interior_on) {
    RngStream rng(seed, StreamId::kMcInterior);
    int order = spec.max_operator_order();
    auto space = JetSpace::get(spec.domain.dim(), order);
    std::vector<ResidualPlan> plans;
    for (const auto& op : spec.operators) plans.push_back(ResidualPlan::build(op, *space));
    std::vector<double> g(static_cast<std::size_t>(n_mc_interior));
    for (int l = 0; l < n_mc_interior; ++l) {
      spec.domain.sample_uniform(rng, x);
      auto jets = u.eval(x, order);
      double sq = 0.0;
      for (const auto& plan : plans) {
        double f = plan.template eval<double>(x, [&](int comp, int pos) {
          return jets[static_cast<std::size_t>(comp)].c[static_cast<std::size_t>(pos)];
        });
        sq += f * f;
      }
      g[static_cast<std::size_t>(l)] = sq;
    }
    out.interior = detail::mean_and_se(g);
  }

  out.total = out.data + out.boundary.value + out.interior.value;
  out.se = std::sqrt(out.boundary.se * out.boundary.se + out.interior.se * out.interior.se);
  return out;
}

// PI(u): boundary misfit expectation plus integrated squared residuals; no
// data term, so it does not depend on the data sample.
inline McEstimate physics_inconsistency(const JetFunction& u, const RiskSpec& spec,
                                        int n_mc_boundary, int n_mc_interior,
                                        std::uint64_t seed) {
  McRisk r = theoretical_risk_mc(u, spec, n_mc_boundary, n_mc_interior, seed,
                                 /*include_data=*/false);
  return McEstimate{r.total, r.se};
}

// OG = |ridge empirical risk - MC theoretical risk| at the same parameters.
inline McEstimate overfitting_gap(const MlpParams& theta, const RiskSpec& spec,
                                  int n_mc_boundary, int n_mc_interior, std::uint64_t seed) {
  RiskReport ridge = ridge_risk(theta, spec);
  McRisk mc = theoretical_risk_mc(JetFunction::from_mlp(theta), spec, n_mc_boundary,
                                  n_mc_interior, seed);
  return McEstimate{std::abs(ridge.total - mc.total), mc.se};
}

// Empirical risk of an arbitrary function (oracle injection); no parameter
// terms.
inline RiskReport empirical_risk_of(const JetFunction& u, const RiskSpec& spec) {
  const SampleSet& smp = spec.samples;
  RiskReport rep;
  rep.n = smp.n;
  rep.n_e = smp.n_e;
  rep.n_r = smp.n_r;
  if (spec.data_active()) {
    double sum = 0.0;
    for (int i = 0; i < smp.n; ++i) {
      auto jets = u.eval(smp.data_point(i), 0);
      auto y = smp.data_value(i);
      for (int j = 0; j < u.d2; ++j) {
        double r = jets[static_cast<std::size_t>(j)].c[0] - y[static_cast<std::size_t>(j)];
        sum += r * r;
      }
    }
    rep.data = spec.lambda_d / smp.n * sum;
  }
  if (spec.boundary_active()) {
    double sum = 0.0;
    for (int j = 0; j < smp.n_e; ++j) {
      auto x = smp.boundary_point(j);
      auto jets = u.eval(x, 0);
      for (int c = 0; c < u.d2; ++c) {
        double r = jets[static_cast<std::size_t>(c)].c[0] -
                   spec.h[static_cast<std::size_t>(c)].eval(x);
        sum += r * r;
      }
    }
    rep.boundary = spec.lambda_e / smp.n_e * sum;
  }
  rep.residual_per_op.assign(spec.operators.size(), 0.0);
  if (spec.residual_active()) {
    int order = spec.max_operator_order();
    auto space = JetSpace::get(spec.domain.dim(), order);
    std::vector<ResidualPlan> plans;
    for (const auto& op : spec.operators) plans.push_back(ResidualPlan::build(op, *space));
    for (int l = 0; l < smp.n_r; ++l) {
      auto x = smp.colloc_point(l);
      auto jets = u.eval(x, order);
      for (std::size_t k = 0; k < plans.size(); ++k) {
        double f = plans[k].template eval<double>(x, [&](int comp, int pos) {
          return jets[static_cast<std::size_t>(comp)].c[static_cast<std::size_t>(pos)];
        });
        rep.residual_per_op[k] += f * f / smp.n_r;
      }
    }
    for (double v : rep.residual_per_op) rep.residual += v;
  }
  rep.total = rep.data + rep.boundary + rep.residual;
  return rep;
}

}  // namespace pinn
