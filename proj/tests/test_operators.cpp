#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pinn/experiments.hpp"
#include "pinn/operators.hpp"

using namespace pinn;

namespace {

MultiIndex mi(std::vector<int> e) { return MultiIndex{std::move(e)}; }

// Incompressible momentum component in z: d_t w - w d_z w - eta d_zz w +
// (1/rho) d_z p + g, over u = (u, v, w, p) in (x, y, z, t).
PolyOperator navier_stokes_f3() {
  PolyOperator op;
  op.d1 = 4;
  op.d2 = 4;
  op.monomials.push_back({Expr::parse("1"), {{2, mi({0, 0, 0, 1}), 1}}});
  op.monomials.push_back({Expr::parse("-1"), {{2, mi({0, 0, 0, 0}), 1}, {2, mi({0, 0, 1, 0}), 1}}});
  op.monomials.push_back({Expr::parse("-0.01"), {{2, mi({0, 0, 2, 0}), 1}}});
  op.monomials.push_back({Expr::parse("0.5"), {{3, mi({0, 0, 1, 0}), 1}}});
  op.monomials.push_back({Expr::parse("9.81"), {}});  // source, constant monomial
  op.validate();
  return op;
}

// The eight first-order electromagnetic constraints over (x, y, z, t) with
// u = (Ex, Ey, Ez, Bx, By, Bz).
std::vector<AffineOperator> maxwell_system() {
  auto term = [](int comp, std::vector<int> alpha, const char* coef) {
    return AffineOperator::Term{comp, MultiIndex{std::move(alpha)}, Expr::parse(coef)};
  };
  std::vector<AffineOperator> ops(8);
  for (auto& op : ops) {
    op.d1 = 4;
    op.d2 = 6;
  }
  // div E and div B
  ops[0].terms = {term(0, {1, 0, 0, 0}, "1"), term(1, {0, 1, 0, 0}, "1"), term(2, {0, 0, 1, 0}, "1")};
  ops[1].terms = {term(3, {1, 0, 0, 0}, "1"), term(4, {0, 1, 0, 0}, "1"), term(5, {0, 0, 1, 0}, "1")};
  // d_t E - curl B
  ops[2].terms = {term(0, {0, 0, 0, 1}, "1"), term(5, {0, 1, 0, 0}, "-1"), term(4, {0, 0, 1, 0}, "1")};
  ops[3].terms = {term(1, {0, 0, 0, 1}, "1"), term(3, {0, 0, 1, 0}, "-1"), term(5, {1, 0, 0, 0}, "1")};
  ops[4].terms = {term(2, {0, 0, 0, 1}, "1"), term(4, {1, 0, 0, 0}, "-1"), term(3, {0, 1, 0, 0}, "1")};
  // d_t B + curl E
  ops[5].terms = {term(3, {0, 0, 0, 1}, "1"), term(2, {0, 1, 0, 0}, "1"), term(1, {0, 0, 1, 0}, "-1")};
  ops[6].terms = {term(4, {0, 0, 0, 1}, "1"), term(0, {0, 0, 1, 0}, "1"), term(2, {1, 0, 0, 0}, "-1")};
  ops[7].terms = {term(5, {0, 0, 0, 1}, "1"), term(1, {1, 0, 0, 0}, "1"), term(0, {0, 1, 0, 0}, "-1")};
  for (auto& op : ops) op.validate();
  return ops;
}

std::vector<Jet<double>> field_jets(const VectorField& f, std::span<const double> x, int order) {
  auto space = JetSpace::get(static_cast<int>(x.size()), order);
  std::vector<Jet<double>> jets;
  for (const auto& e : f) jets.push_back(e.eval_jet(space, x));
  return jets;
}

}  // namespace

TEST_CASE("degree: momentum component, advection, heat, affine lowering") {
  CHECK(degree(navier_stokes_f3()) == 3);
  CHECK(degree(advection_operator()) == 2);
  CHECK(degree(heat_operator()) == 3);

  // affine operators of order K lower to polynomial degree K+1
  for (const Operator& op : {advection_operator(), heat_operator(), friction_operator()}) {
    const auto& aff = std::get<AffineOperator>(op);
    CHECK(degree(aff.to_poly()) == aff.order() + 1);
  }

  PolyOperator constant_only;
  constant_only.d1 = 1;
  constant_only.d2 = 1;
  constant_only.monomials.push_back({Expr::parse("3"), {}});
  CHECK_THROWS_AS(degree(constant_only), std::invalid_argument);
}

TEST_CASE("sobolev constraints: counts and degrees") {
  auto ops21 = sobolev_constraints(1, 2, 1);
  CHECK(ops21.size() == 6);  // |alpha| in {0,1,2}: 1+2+3
  auto ops10 = sobolev_constraints(0, 1, 1);
  CHECK(ops10.size() == 2);  // u and u'
  for (const auto& op : ops21) {
    int m_alpha = op.terms[0].alpha.order();
    CHECK(degree(op) == m_alpha + 1);
  }
  CHECK_THROWS_AS(sobolev_constraints(kMaxJetOrder, 1, 1), std::invalid_argument);
}

TEST_CASE("residual: heat on a linear profile, advection on the transport solution") {
  {
    // u(x,t) = x encoded directly as a jet
    auto space = JetSpace::get(2, 2);
    const double x[2] = {0.4, 0.8};
    std::vector<Jet<double>> jets{jet_variable<double>(space, 0, std::span<const double>(x, 2))};
    double r = residual(heat_operator(), std::span<const Jet<double>>(jets), std::span<const double>(x, 2));
    CHECK(r == doctest::Approx(0.0));
  }
  {
    VectorField model{Expr::parse("exp(x1-x0)")};
    RngStream rng(3, 9);
    for (int rep = 0; rep < 10; ++rep) {
      double x[2] = {rng.uniform(0, 1), rng.uniform(0, 1)};
      auto jets = field_jets(model, std::span<const double>(x, 2), 1);
      double r = residual(advection_operator(), std::span<const Jet<double>>(jets),
                          std::span<const double>(x, 2));
      CHECK(std::abs(r) < 1e-12);
    }
  }
  {
    VectorField u_star{Expr::parse("exp(x1-x0) + 0.1*cos(2*pi*x0)")};
    const double x[2] = {0.25, 0.0};
    auto jets = field_jets(u_star, std::span<const double>(x, 2), 1);
    double r = residual(advection_operator(), std::span<const Jet<double>>(jets),
                        std::span<const double>(x, 2));
    CHECK(r == doctest::Approx(-0.2 * 3.14159265358979323846).epsilon(1e-12));
    // cross-check by finite differences of the closed form
    oracles::ScalarFn f = [&](std::span<const double> p) { return u_star[0].eval(p); };
    double fd = oracles::fd_partial(f, {0.25, 0.0}, mi({1, 0}), 1e-5) +
                oracles::fd_partial(f, {0.25, 0.0}, mi({0, 1}), 1e-5);
    CHECK(r == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("residual errors: insufficient jet order") {
  auto space = JetSpace::get(2, 1);
  const double x[2] = {0.3, 0.3};
  std::vector<Jet<double>> jets{jet_variable<double>(space, 0, std::span<const double>(x, 2))};
  CHECK_THROWS_AS(residual(heat_operator(), std::span<const Jet<double>>(jets),
                           std::span<const double>(x, 2)),
                  std::invalid_argument);
}

TEST_CASE("affine residual is linear in u once the source is removed") {
  AffineOperator op = std::get<AffineOperator>(heat_operator());
  op.source = Expr::parse("sin(x0)");
  op.validate();
  RngStream rng(17, 2);
  VectorField f{Expr::parse("exp(x1-x0) + 0.3*sin(2*x0)")};
  for (int rep = 0; rep < 10; ++rep) {
    double a = rng.uniform(-2.0, 2.0);
    double x[2] = {rng.uniform(0, 1), rng.uniform(0, 1)};
    auto jets = field_jets(f, std::span<const double>(x, 2), 2);
    auto scaled = jets;
    scaled[0] = jet_scale(jets[0], a);
    Operator o{op};
    double b = op.source.eval(std::span<const double>(x, 2));
    double r1 = residual(o, std::span<const Jet<double>>(jets), std::span<const double>(x, 2));
    double ra = residual(o, std::span<const Jet<double>>(scaled), std::span<const double>(x, 2));
    CHECK(ra - b == doctest::Approx(a * (r1 - b)).epsilon(1e-10));
  }
}

TEST_CASE("residual of a polynomial operator matches finite differences of the closed form") {
  // F(u, x) = u * d_x u + sin(x) * d_t^2 u on a closed-form u
  PolyOperator op;
  op.d1 = 2;
  op.d2 = 1;
  op.monomials.push_back({Expr::parse("1"), {{0, mi({0, 0}), 1}, {0, mi({1, 0}), 1}}});
  op.monomials.push_back({Expr::parse("sin(x0)"), {{0, mi({0, 2}), 1}}});
  op.validate();
  VectorField f{Expr::parse("tanh(x0 - 0.5*x1) + 0.2*cos(x0*x1)")};
  oracles::ScalarFn fn = [&](std::span<const double> p) { return f[0].eval(p); };
  RngStream rng(31, 5);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> x = {rng.uniform(0, 1), rng.uniform(0, 1)};
    auto jets = field_jets(f, x, 2);
    double r = residual(Operator{op}, std::span<const Jet<double>>(jets), x);
    double expect = fn(x) * oracles::fd_partial(fn, x, mi({1, 0}), 1e-4) +
                    std::sin(x[0]) * oracles::fd_partial(fn, x, mi({0, 2}), 1e-4);
    CHECK(std::abs(r - expect) <= 1e-4 * std::max(1.0, std::abs(expect)));
  }
}

TEST_CASE("electromagnetic system: eight first-order constraints, plane wave passes") {
  auto ops = maxwell_system();
  CHECK(ops.size() == 8);
  for (const auto& op : ops) CHECK(op.order() == 1);

  // E = (0, 0, cos(x - t)), B = (0, -cos(x - t), 0) solves all eight; the
  // +cos variant for B fails the induction components.
  VectorField good{Expr::parse("0"), Expr::parse("0"), Expr::parse("cos(x0 - x3)"),
                   Expr::parse("0"), Expr::parse("-cos(x0 - x3)"), Expr::parse("0")};
  VectorField bad{Expr::parse("0"), Expr::parse("0"), Expr::parse("cos(x0 - x3)"),
                  Expr::parse("0"), Expr::parse("cos(x0 - x3)"), Expr::parse("0")};
  RngStream rng(8, 3);
  double worst_good = 0.0, worst_bad = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> x = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
                             rng.uniform(0, 1)};
    auto jg = field_jets(good, x, 1);
    auto jb = field_jets(bad, x, 1);
    for (const auto& op : ops) {
      worst_good = std::max(worst_good,
                            std::abs(residual(Operator{op}, std::span<const Jet<double>>(jg), x)));
      worst_bad = std::max(worst_bad,
                           std::abs(residual(Operator{op}, std::span<const Jet<double>>(jb), x)));
    }
  }
  CHECK(worst_good < 1e-12);
  CHECK(worst_bad > 0.1);
}

TEST_CASE("operator JSON round-trips and is validated at load") {
  Operator adv = advection_operator();
  nlohmann::json j = to_json(adv);
  Operator back = operator_from_json(j);
  CHECK(operator_order(back) == 1);
  CHECK(degree(back) == 2);

  Operator ns{navier_stokes_f3()};
  Operator ns2 = operator_from_json(to_json(ns));
  CHECK(degree(ns2) == 3);
  VectorField f{Expr::parse("x3"), Expr::parse("x3"), Expr::parse("tanh(x2)*x3"),
                Expr::parse("x2*x2")};
  std::vector<double> x = {0.1, 0.2, 0.3, 0.4};
  auto jets = field_jets(f, x, 2);
  CHECK(residual(ns, std::span<const Jet<double>>(jets), x) ==
        doctest::Approx(residual(ns2, std::span<const Jet<double>>(jets), x)).epsilon(1e-15));

  nlohmann::json badcomp = to_json(adv);
  badcomp["monomials"][0]["factors"][0]["i"] = 5;
  CHECK_THROWS_AS(operator_from_json(badcomp), std::invalid_argument);

  nlohmann::json badalpha = to_json(adv);
  badalpha["monomials"][0]["factors"][0]["alpha"] = {1, 0, 0};
  CHECK_THROWS_AS(operator_from_json(badalpha), std::invalid_argument);

  nlohmann::json badexp = to_json(adv);
  badexp["monomials"][0]["factors"][0]["exp"] = 2;
  CHECK_THROWS_AS(operator_from_json(badexp), std::invalid_argument);
}
