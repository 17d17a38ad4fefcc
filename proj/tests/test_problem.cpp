#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "pinn/io.hpp"
#include "pinn/problem.hpp"

using namespace pinn;

TEST_CASE("box domains validate and measure") {
  BoxDomain box{{{0.0, 1.0}, {-1.0, 3.0}}};
  box.validate();
  CHECK(box.volume() == doctest::Approx(4.0));
  CHECK(box.contains(BoxDomain{{{0.0, 0.5}, {0.0, 1.0}}}));
  CHECK(!box.contains(BoxDomain{{{-0.1, 0.5}, {0.0, 1.0}}}));
  BoxDomain degenerate{{{1.0, 1.0}}};
  CHECK_THROWS_AS(degenerate.validate(), std::invalid_argument);
}

TEST_CASE("sampling: exact values without noise, support restriction, determinism") {
  BoxDomain domain{{{0.0, 1.0}, {0.0, 1.0}}};
  BoundarySet boundary = BoundarySet::proportional(domain, {Face{1, false, 0.0}, Face{0, false, 0.0}});
  VectorField truth{Expr::parse("exp(x1-x0) + 0.1*cos(2*pi*x0)")};
  BoxDomain supp{{{0.0, 0.5}, {0.0, 1.0}}};

  SampleSet s0 = sample(domain, boundary, truth, 0.0, supp, 50, 20, 30, 42);
  for (int i = 0; i < s0.n; ++i) {
    auto x = s0.data_point(i);
    CHECK(x[0] < 0.5);  // first coordinate restricted to the support box
    CHECK(s0.data_value(i)[0] == truth[0].eval(x));
  }
  CHECK(s0.boundary_x.size() == 40);
  CHECK(s0.colloc_x.size() == 60);
  for (int j = 0; j < s0.n_e; ++j) {
    auto x = s0.boundary_point(j);
    CHECK((x[0] == 0.0 || x[1] == 0.0));
  }

  SampleSet s1 = sample(domain, boundary, truth, 0.0, supp, 50, 20, 30, 42);
  CHECK(s1.data_x == s0.data_x);
  CHECK(s1.data_y == s0.data_y);
  CHECK(s1.boundary_x == s0.boundary_x);
  CHECK(s1.colloc_x == s0.colloc_x);

  // independent streams: changing n_r never perturbs the data draws
  SampleSet s2 = sample(domain, boundary, truth, 0.0, supp, 50, 20, 500, 42);
  CHECK(s2.data_x == s0.data_x);
  CHECK(s2.boundary_x == s0.boundary_x);

  // noise is unbiased-looking and scales with sigma
  SampleSet sn = sample(domain, boundary, truth, 0.1, supp, 2000, 0, 0, 7);
  double mean = 0.0, var = 0.0;
  for (int i = 0; i < sn.n; ++i) {
    double eps = sn.data_value(i)[0] - truth[0].eval(sn.data_point(i));
    mean += eps;
    var += eps * eps;
  }
  mean /= sn.n;
  var = var / sn.n - mean * mean;
  CHECK(std::abs(mean) < 3.0 * 0.1 / std::sqrt(2000.0));
  CHECK(var == doctest::Approx(0.01).epsilon(0.15));

  CHECK_THROWS_AS(sample(domain, boundary, truth, 0.0,
                         BoxDomain{{{0.0, 1.5}, {0.0, 1.0}}}, 5, 5, 5, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(sample(domain, boundary, truth, 0.0, supp, -1, 5, 5, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(sample(domain, boundary, {}, 0.0, supp, 5, 5, 5, 1), std::invalid_argument);
}

TEST_CASE("collocation draws are uniform, boundary draws respect face weights") {
  BoxDomain domain{{{0.0, 2.0}, {0.0, 1.0}}};
  BoundarySet boundary = BoundarySet::proportional(
      domain, {Face{1, false, 0.0}, Face{0, false, 0.0}, Face{0, true, 0.0}});
  // weights proportional to face measure: bottom 2, sides 1 and 1
  CHECK(boundary.faces[0].weight == doctest::Approx(0.5));
  CHECK(boundary.faces[1].weight == doctest::Approx(0.25));
  CHECK(boundary.faces[2].weight == doctest::Approx(0.25));

  const int big = 100000;
  SampleSet s = sample(domain, boundary, {}, 0.0, std::nullopt, 0, big, big, 99);

  // empirical mean of each collocation coordinate within 3 sigma of the
  // interval midpoint
  for (int c = 0; c < 2; ++c) {
    double lo = domain.iv[c][0], hi = domain.iv[c][1];
    double m = 0.0;
    for (int l = 0; l < big; ++l) m += s.colloc_point(l)[c];
    m /= big;
    double sd = (hi - lo) / std::sqrt(12.0) / std::sqrt(static_cast<double>(big));
    CHECK(std::abs(m - (lo + hi) / 2) < 3.0 * sd);
  }

  int counts[3] = {0, 0, 0};
  for (int j = 0; j < big; ++j) {
    auto x = s.boundary_point(j);
    if (x[1] == 0.0)
      ++counts[0];
    else if (x[0] == 0.0)
      ++counts[1];
    else
      ++counts[2];
  }
  double expect[3] = {0.5 * big, 0.25 * big, 0.25 * big};
  for (int f = 0; f < 3; ++f) {
    double sd = std::sqrt(expect[f] * (1.0 - expect[f] / big));
    CHECK(std::abs(counts[f] - expect[f]) < 3.0 * sd);
  }
}

TEST_CASE("bell-shaped initial profile: zeros at the ends, symmetry, center value") {
  Expr u0 = heat_initial_condition(1);
  double xm[1] = {-1.0};
  CHECK(u0.eval(std::span<const double>(xm, 1)) == doctest::Approx(0.0).epsilon(1e-15));
  double xp[1] = {1.0};
  CHECK(u0.eval(std::span<const double>(xp, 1)) == doctest::Approx(0.0).epsilon(1e-15));
  double x0[1] = {0.0};
  double expect = 2 * std::tanh(0.5) + std::tanh(0.5) - std::tanh(1.5);
  CHECK(u0.eval(std::span<const double>(x0, 1)) == doctest::Approx(expect).epsilon(1e-15));
  RngStream rng(5, 0);
  for (int rep = 0; rep < 20; ++rep) {
    double x = rng.uniform(0.0, 1.0);
    double a[1] = {x}, b[1] = {-x};
    CHECK(u0.eval(std::span<const double>(a, 1)) ==
          doctest::Approx(u0.eval(std::span<const double>(b, 1))).epsilon(1e-14));
  }
  Expr u2 = heat_initial_condition(2);
  double c[1] = {0.3};
  double g = std::tanh(std::tanh(0.8)) - std::tanh(std::tanh(-0.2)) + std::tanh(std::tanh(0.5)) -
             std::tanh(std::tanh(1.5));
  CHECK(u2.eval(std::span<const double>(c, 1)) == doctest::Approx(g).epsilon(1e-15));
}

TEST_CASE("sample sets round-trip exactly through CSV") {
  BoxDomain domain{{{0.0, 1.0}, {0.0, 1.0}}};
  BoundarySet boundary = BoundarySet::proportional(domain, {Face{1, false, 0.0}});
  VectorField truth{Expr::parse("exp(x1-x0)")};
  SampleSet s = sample(domain, boundary, truth, 0.1, std::nullopt, 17, 11, 13, 5);
  auto dir = std::filesystem::temp_directory_path() / "pinn_test_samples";
  write_samples_csv(s, dir);
  SampleSet back = read_samples_csv(dir, 2, 1);
  CHECK(back.data_x == s.data_x);
  CHECK(back.data_y == s.data_y);
  CHECK(back.boundary_x == s.boundary_x);
  CHECK(back.colloc_x == s.colloc_x);
  std::filesystem::remove_all(dir);
}

TEST_CASE("problem specs round-trip through JSON") {
  nlohmann::json j = {
      {"domain", {{0.0, 1.0}, {0.0, 1.0}}},
      {"faces", nlohmann::json::array({{{"dim", 1}, {"side", "min"}}, {{"dim", 0}, {"side", "min"}}})},
      {"h", {"exp(x1-x0)"}},
      {"u_star", {"exp(x1-x0) + 0.1*cos(2*pi*x0)"}},
      {"sigma", 0.1},
      {"supp", {{0.0, 0.5}, {0.0, 1.0}}},
      {"counts", {{"n", 10}, {"n_e", 20}, {"n_r", 30}}},
      {"seed", 12}};
  ProblemSpec p = problem_from_json(j);
  CHECK(p.d1() == 2);
  CHECK(p.d2() == 1);
  CHECK(p.boundary.faces.size() == 2);
  CHECK(p.boundary.faces[0].weight == doctest::Approx(0.5));
  SampleSet s = p.sample();
  CHECK(s.n == 10);
  CHECK(s.n_e == 20);
  CHECK(s.n_r == 30);
  nlohmann::json j2 = problem_to_json(p);
  ProblemSpec q = problem_from_json(j2);
  SampleSet s2 = q.sample();
  CHECK(s2.data_x == s.data_x);
  CHECK(s2.data_y == s.data_y);
}
