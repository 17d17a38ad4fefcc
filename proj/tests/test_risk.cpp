#include <doctest.h>

#include <cmath>

#include "pinn/experiments.hpp"
#include "pinn/risk.hpp"

using namespace pinn;

namespace {

// Advection transport setup with all four sample families populated.
RiskSpec make_spec(int n, int n_e, int n_r, std::uint64_t seed) {
  ProblemSpec p = advection_hybrid_problem(n, n_e, n_r, seed);
  RiskSpec spec;
  spec.operators = {advection_operator()};
  spec.h = p.h;
  spec.m = 1;
  spec.domain = p.domain;
  spec.boundary = p.boundary;
  spec.samples = p.sample();
  spec.lambda_d = 1.0;
  spec.lambda_e = 1.0;
  return spec;
}

}  // namespace

TEST_CASE("risk spec invariants") {
  RiskSpec spec = make_spec(4, 4, 4, 1);
  spec.lambda_d = 0.0;
  spec.lambda_e = 0.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.lambda_e = 1.0;
  spec.validate();

  // hybrid mode with a derivative penalty requires m >= max(floor(d1/2), K)
  spec.lambda_d = 1.0;
  spec.lambda_t = 0.1;
  spec.m = 0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.m = 1;
  spec.validate();
  // solver mode (no data term) accepts lower m
  spec.lambda_d = 0.0;
  spec.m = 0;
  spec.validate();
}

TEST_CASE("empirical risk: zero configuration, unit residual, transport oracle") {
  {
    // zero network, zero data, h = 0, operators with zero source
    BoxDomain domain{{{0.0, 1.0}, {0.0, 1.0}}};
    RiskSpec spec;
    spec.lambda_d = 1.0;
    spec.lambda_e = 1.0;
    spec.operators = {advection_operator()};
    spec.h = {Expr::parse("0")};
    spec.domain = domain;
    spec.boundary = BoundarySet::proportional(domain, {Face{1, false, 0.0}});
    spec.samples = sample(domain, spec.boundary, {Expr::parse("0")}, 0.0, std::nullopt, 3, 3, 3, 2);
    MlpParams zero = MlpParams::zeros(2, 4, 2, 1);
    RiskReport rep = empirical_risk(zero, spec);
    CHECK(rep.total == 0.0);
  }
  {
    // single data point, u(X1) = Y1 + 1, lambda_d = 1, n = 1, others off
    BoxDomain domain{{{0.0, 1.0}}};
    RiskSpec spec;
    spec.lambda_d = 1.0;
    spec.h = {Expr::parse("0")};
    spec.domain = domain;
    spec.samples.d1 = 1;
    spec.samples.d2 = 1;
    spec.samples.n = 1;
    spec.samples.data_x = {0.5};
    spec.samples.data_y = {0.0};
    MlpParams net = MlpParams::zeros(1, 1, 1, 1);
    net.layers[1].b[0] = 1.0;  // u == 1 everywhere, so u(X1) - Y1 = 1
    RiskReport rep = empirical_risk(net, spec);
    CHECK(rep.total == doctest::Approx(1.0));
    CHECK(rep.data == doctest::Approx(1.0));
  }
  {
    // oracle injection: the exact transport solution zeroes the residual and
    // boundary terms of the hybrid spec with lambda_d = 0
    RiskSpec spec = make_spec(0, 500, 500, 3);
    spec.lambda_d = 0.0;
    JetFunction model = JetFunction::from_field({Expr::parse("exp(x1-x0)")}, 2);
    RiskReport rep = empirical_risk_of(model, spec);
    CHECK(rep.boundary <= 1e-20);
    CHECK(rep.residual <= 1e-20);
  }
}

TEST_CASE("ridge risk: reduction to empirical risk, explicit value, random norms") {
  RiskSpec spec = make_spec(5, 5, 5, 4);
  MlpParams theta = MlpParams::glorot(2, 4, 2, 1, RngStream(2, StreamId::kInit));
  {
    spec.lambda_ridge = 0.0;
    RiskReport a = ridge_risk(theta, spec);
    RiskReport b = empirical_risk(theta, spec);
    CHECK(a.total == b.total);
  }
  {
    // |theta|^2 = 4 with every other term off
    BoxDomain domain{{{0.0, 1.0}}};
    RiskSpec pure;
    pure.lambda_e = 1.0;  // keeps the (lambda_d, lambda_e) invariant, no points
    pure.lambda_ridge = 0.5;
    pure.h = {Expr::parse("0")};
    pure.domain = domain;
    pure.samples.d1 = 1;
    pure.samples.d2 = 1;
    MlpParams net = MlpParams::zeros(1, 1, 1, 1);
    net.layers[0].at(0, 0) = 2.0;  // |theta|^2 = 4
    CHECK(ridge_risk(net, pure).total == doctest::Approx(2.0));
  }
  {
    spec.lambda_ridge = 0.37;
    RiskReport rep = ridge_risk(theta, spec);
    CHECK(rep.ridge == doctest::Approx(0.37 * theta.param_norm_sq()).epsilon(1e-14));
  }
}

TEST_CASE("derivative-penalty risk: zero network, constant network, definitional identity") {
  RiskSpec spec = make_spec(4, 4, 64, 5);
  spec.lambda_t = 0.3;
  {
    MlpParams zero = MlpParams::zeros(2, 4, 2, 1);
    CHECK(sobolev_risk(zero, spec).sobolev == 0.0);
  }
  {
    // constant-c network: first layer zero, output bias c; only alpha = 0
    // survives, so the penalty is exactly lambda_t c^2
    MlpParams net = MlpParams::zeros(2, 4, 2, 1);
    net.layers[2].b[0] = 0.7;
    RiskReport rep = sobolev_risk(net, spec);
    CHECK(rep.sobolev == doctest::Approx(0.3 * 0.49).epsilon(1e-14));
  }
  {
    // the penalty equals the summed squared residuals of the constraint
    // operators evaluated on the same collocation points
    MlpParams theta = MlpParams::glorot(2, 5, 2, 1, RngStream(6, StreamId::kInit));
    RiskReport rep = sobolev_risk(theta, spec);
    auto cons = sobolev_constraints(spec.m, 2, 1);
    double total = 0.0;
    for (int l = 0; l < spec.samples.n_r; ++l) {
      auto x = spec.samples.colloc_point(l);
      auto jets = mlp_forward_jet(theta, x, spec.m + 1);
      for (const auto& op : cons) {
        double r = residual(Operator{op}, std::span<const Jet<double>>(jets), x);
        total += r * r;
      }
    }
    total *= spec.lambda_t / spec.samples.n_r;
    CHECK(rep.sobolev == doctest::Approx(total).epsilon(1e-12));
  }
}

TEST_CASE("risk nesting and decomposition identity") {
  RiskSpec spec = make_spec(6, 8, 32, 6);
  spec.lambda_ridge = 0.05;
  spec.lambda_t = 0.2;
  MlpParams theta = MlpParams::glorot(2, 6, 2, 1, RngStream(7, StreamId::kInit));
  RiskReport e = empirical_risk(theta, spec);
  RiskReport r = ridge_risk(theta, spec);
  RiskReport s = sobolev_risk(theta, spec);
  CHECK(e.total <= r.total);
  CHECK(r.total <= s.total);
  for (const RiskReport& rep : {e, r, s}) {
    double sum = rep.data + rep.boundary + rep.residual + rep.ridge + rep.sobolev;
    CHECK(rep.total == doctest::Approx(sum).epsilon(1e-15));
    double res = 0.0;
    for (double v : rep.residual_per_op) res += v;
    CHECK(rep.residual == doctest::Approx(res).epsilon(1e-15));
  }
}

TEST_CASE("output norm convention: plain Euclidean, no dimension averaging") {
  static_assert(!kAveragedOutputNorm);
  BoxDomain domain{{{0.0, 1.0}}};
  RiskSpec spec;
  spec.lambda_d = 1.0;
  spec.h = {Expr::parse("0"), Expr::parse("0")};
  spec.domain = domain;
  spec.samples.d1 = 1;
  spec.samples.d2 = 2;
  spec.samples.n = 1;
  spec.samples.data_x = {0.5};
  spec.samples.data_y = {0.0, 0.0};
  MlpParams net = MlpParams::zeros(1, 2, 1, 2);
  net.layers[1].b = {1.0, 1.0};  // u = (1, 1): squared norm 2, not 1
  CHECK(empirical_risk(net, spec).total == doctest::Approx(2.0));
}

TEST_CASE("gradients of all three risks match finite differences") {
  RiskSpec spec = make_spec(5, 12, 24, 8);
  spec.lambda_ridge = 0.04;
  spec.lambda_t = 0.15;
  MlpParams theta = MlpParams::glorot(2, 4, 2, 1, RngStream(9, StreamId::kInit));
  RiskEvaluator ev(spec, theta);
  std::vector<double> grad(theta.param_count());
  std::vector<double> flat = theta.flatten();
  for (RiskKind kind : {RiskKind::kEmpirical, RiskKind::kRidge, RiskKind::kSobolev}) {
    ev.value_and_grad(theta, kind, grad);
    for (std::size_t i = 0; i < flat.size(); i += 7) {
      double h = 1e-6;
      MlpParams tp = theta, tm = theta;
      auto fp = flat, fm = flat;
      fp[i] += h;
      fm[i] -= h;
      tp.set_from_flat(fp);
      tm.set_from_flat(fm);
      double fd = (ev.value(tp, kind).total - ev.value(tm, kind).total) / (2 * h);
      CHECK(std::abs(grad[i] - fd) <= 1e-4 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("tape path and fast path agree on values and gradients") {
  RiskSpec spec = make_spec(4, 6, 12, 10);
  spec.lambda_ridge = 0.03;
  spec.lambda_t = 0.21;
  MlpParams theta = MlpParams::glorot(2, 4, 2, 1, RngStream(10, StreamId::kInit));
  RiskEvaluator ev(spec, theta);
  std::vector<double> grad(theta.param_count());
  for (RiskKind kind : {RiskKind::kEmpirical, RiskKind::kRidge, RiskKind::kSobolev}) {
    RiskReport fast = ev.value_and_grad(theta, kind, grad);
    Tape tape;
    TapeRisk ref = risk_on_tape(theta, spec, kind, tape);
    CHECK(fast.total == doctest::Approx(ref.report.total).epsilon(1e-13));
    CHECK(fast.data == doctest::Approx(ref.report.data).epsilon(1e-13));
    CHECK(fast.boundary == doctest::Approx(ref.report.boundary).epsilon(1e-13));
    CHECK(fast.residual == doctest::Approx(ref.report.residual).epsilon(1e-13));
    CHECK(fast.sobolev == doctest::Approx(ref.report.sobolev).epsilon(1e-13));
    auto tgrad = grad_params(ref.total, ref.mlp.leaves);
    for (std::size_t i = 0; i < grad.size(); ++i)
      CHECK(std::abs(grad[i] - tgrad[i]) <= 1e-11 * std::max(1.0, std::abs(tgrad[i])));
  }
}

TEST_CASE("Monte Carlo theoretical risk: oracle zero, exact zero, SE scaling") {
  RiskSpec spec = make_spec(0, 100, 100, 11);
  spec.lambda_d = 0.0;
  {
    JetFunction model = JetFunction::from_field({Expr::parse("exp(x1-x0)")}, 2);
    McRisk mc = theoretical_risk_mc(model, spec, 4000, 4000, 77);
    CHECK(std::abs(mc.total) <= 1e-20);
  }
  {
    // constant u = 0 with zero-source operators and h = 0: exactly zero
    RiskSpec zspec = spec;
    zspec.h = {Expr::parse("0")};
    JetFunction zero = JetFunction::from_field({Expr::parse("0")}, 2);
    McRisk mc = theoretical_risk_mc(zero, zspec, 1000, 1000, 78);
    CHECK(mc.total == 0.0);
    CHECK(mc.se == 0.0);
  }
  {
    // SE shrinks like n_mc^{-1/2}: regression slope of ln SE vs ln n_mc
    JetFunction u = JetFunction::from_field({Expr::parse("exp(x1-x0) + 0.3*sin(3*x0)")}, 2);
    std::vector<double> lx, ly;
    for (int n_mc : {1000, 2000, 4000, 8000, 16000}) {
      McRisk mc = theoretical_risk_mc(u, spec, n_mc, n_mc, 79);
      lx.push_back(std::log(static_cast<double>(n_mc)));
      ly.push_back(std::log(mc.se));
    }
    OlsFit fit = ols_fit(lx, ly);
    CHECK(fit.slope == doctest::Approx(-0.5).epsilon(0.2));
  }
  CHECK_THROWS_AS(theoretical_risk_mc(JetFunction::from_field({Expr::parse("0")}, 2), spec, 0,
                                      100, 1),
                  std::invalid_argument);
}

TEST_CASE("physics inconsistency: transport model, reference value, data independence") {
  RiskSpec spec = make_spec(50, 100, 100, 12);
  {
    JetFunction model = JetFunction::from_field({Expr::parse("exp(x1-x0)")}, 2);
    McEstimate pi = physics_inconsistency(model, spec, 20000, 20000, 5);
    CHECK(std::abs(pi.value) <= 3.0 * std::max(pi.se, 1e-30));
  }
  {
    JetFunction u_star =
        JetFunction::from_field({Expr::parse("exp(x1-x0) + 0.1*cos(2*pi*x0)")}, 2);
    McEstimate pi = physics_inconsistency(u_star, spec, 20000, 20000, 5);
    // true value: 0.0075 boundary + 0.02 pi^2 residual
    double truth = 0.0075 + 0.02 * 3.14159265358979323846 * 3.14159265358979323846;
    CHECK(std::abs(pi.value - truth) <= 3.0 * pi.se);
    // the reported reference exp(-1.6) sits within 3 SE as well
    CHECK(std::abs(pi.value - std::exp(-1.6)) <= 3.0 * pi.se + 0.004);

    // changing the data seed leaves PI untouched
    RiskSpec other = make_spec(50, 100, 100, 999);
    McEstimate pi2 = physics_inconsistency(u_star, other, 20000, 20000, 5);
    CHECK(pi.value == pi2.value);
  }
}

TEST_CASE("overfitting gap: identical data sums cancel exactly") {
  // only the data term is active and the MC theoretical risk keeps the same
  // finite sum, so OG = 0 up to float identity
  BoxDomain domain{{{0.0, 1.0}}};
  RiskSpec spec;
  spec.lambda_d = 1.0;
  spec.lambda_e = 0.0;
  spec.h = {Expr::parse("0")};
  spec.domain = domain;
  spec.boundary.faces = {};
  spec.samples = sample(domain, BoundarySet{{Face{0, false, 1.0}}}, {Expr::parse("sin(3*x0)")},
                        0.1, std::nullopt, 20, 0, 0, 3);
  MlpParams theta = MlpParams::glorot(1, 4, 1, 1, RngStream(13, StreamId::kInit));
  McEstimate og = overfitting_gap(theta, spec, 1, 1, 17);
  CHECK(og.value == 0.0);
}
