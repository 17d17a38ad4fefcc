// Box domains, boundary faces, condition functions, and synthetic sample
// generation with per-family RNG streams.
#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pinn/expr.hpp"
#include "pinn/rng.hpp"

namespace pinn {

struct BoxDomain {
  std::vector<std::array<double, 2>> iv;  // per-dimension [a, b]

  int dim() const { return static_cast<int>(iv.size()); }

  double volume() const {
    double v = 1.0;
    for (const auto& ab : iv) v *= ab[1] - ab[0];
    return v;
  }

  void validate() const {
    if (iv.empty()) throw std::invalid_argument("BoxDomain: empty");
    for (const auto& ab : iv)
      if (!(ab[0] < ab[1])) throw std::invalid_argument("BoxDomain: needs a < b per dimension");
  }

  bool contains(const BoxDomain& inner) const {
    if (inner.dim() != dim()) return false;
    for (int i = 0; i < dim(); ++i)
      if (inner.iv[i][0] < iv[i][0] || inner.iv[i][1] > iv[i][1]) return false;
    return true;
  }

  void sample_uniform(RngStream& rng, std::span<double> out) const {
    for (int i = 0; i < dim(); ++i) out[static_cast<std::size_t>(i)] = rng.uniform(iv[i][0], iv[i][1]);
  }
};

// One face of the boundary: coordinate `coord` fixed at its lower or upper
// endpoint, the remaining coordinates free.
struct Face {
  int coord = 0;
  bool at_upper = false;
  double weight = 0.0;

  double measure(const BoxDomain& box) const {
    double m = 1.0;
    for (int i = 0; i < box.dim(); ++i)
      if (i != coord) m *= box.iv[i][1] - box.iv[i][0];
    return m;
  }
};

struct BoundarySet {
  std::vector<Face> faces;

  void validate(const BoxDomain& box) const {
    if (faces.empty()) throw std::invalid_argument("BoundarySet: no faces");
    double sum = 0.0;
    for (const auto& f : faces) {
      if (f.coord < 0 || f.coord >= box.dim())
        throw std::invalid_argument("BoundarySet: face coordinate out of range");
      if (f.weight < 0.0) throw std::invalid_argument("BoundarySet: negative weight");
      sum += f.weight;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("BoundarySet: weights must sum to 1");
  }

  // Default measure: weights proportional to face (d1-1)-volume.
  static BoundarySet proportional(const BoxDomain& box, const std::vector<Face>& faces) {
    BoundarySet bs;
    bs.faces = faces;
    double total = 0.0;
    for (auto& f : bs.faces) total += f.measure(box);
    for (auto& f : bs.faces) f.weight = f.measure(box) / total;
    return bs;
  }

  void sample(const BoxDomain& box, RngStream& rng, std::span<double> out) const {
    double u = rng.uniform();
    std::size_t pick = faces.size() - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < faces.size(); ++i) {
      acc += faces[i].weight;
      if (u < acc) {
        pick = i;
        break;
      }
    }
    const Face& f = faces[pick];
    for (int i = 0; i < box.dim(); ++i) {
      if (i == f.coord)
        out[static_cast<std::size_t>(i)] = f.at_upper ? box.iv[i][1] : box.iv[i][0];
      else
        out[static_cast<std::size_t>(i)] = rng.uniform(box.iv[i][0], box.iv[i][1]);
    }
  }
};

// d2-vector of closed-form components; h on the boundary, u* on the domain.
using VectorField = std::vector<Expr>;

inline std::vector<double> eval_field(const VectorField& f, std::span<const double> x) {
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].eval(x);
  return out;
}

// The bell-shaped initial temperature profile built from H-fold tanh
// compositions; zero at x = -1 and x = 1.
inline Expr heat_initial_condition(int h) {
  if (h < 1) throw std::invalid_argument("heat_initial_condition: h must be >= 1");
  auto nest = [&](const std::string& arg) {
    std::string s = arg;
    for (int k = 0; k < h; ++k) s = "tanh(" + s + ")";
    return s;
  };
  return Expr::parse(nest("x0+0.5") + " - " + nest("x0-0.5") + " + " + nest("0.5") + " - " +
                     nest("1.5"));
}

struct SampleSet {
  int d1 = 0, d2 = 0;
  int n = 0, n_e = 0, n_r = 0;
  std::uint64_t seed = 0;
  std::vector<double> data_x;      // n x d1
  std::vector<double> data_y;      // n x d2
  std::vector<double> boundary_x;  // n_e x d1
  std::vector<double> colloc_x;    // n_r x d1

  std::span<const double> data_point(int i) const {
    return {data_x.data() + static_cast<std::size_t>(i) * d1, static_cast<std::size_t>(d1)};
  }
  std::span<const double> data_value(int i) const {
    return {data_y.data() + static_cast<std::size_t>(i) * d2, static_cast<std::size_t>(d2)};
  }
  std::span<const double> boundary_point(int j) const {
    return {boundary_x.data() + static_cast<std::size_t>(j) * d1, static_cast<std::size_t>(d1)};
  }
  std::span<const double> colloc_point(int l) const {
    return {colloc_x.data() + static_cast<std::size_t>(l) * d1, static_cast<std::size_t>(d1)};
  }
};

// i.i.d. draws: data X uniform on supp (noisy Y = u*(X) + N(0, sigma^2)),
// boundary X^(e) from the face-weighted measure, collocation X^(r) uniform
// on the domain. One RNG stream per family, so changing one count never
// perturbs the other draws.
inline SampleSet sample(const BoxDomain& domain, const BoundarySet& boundary,
                        const VectorField& ground_truth, double sigma,
                        const std::optional<BoxDomain>& supp, int n, int n_e, int n_r,
                        std::uint64_t seed) {
  domain.validate();
  if (n < 0 || n_e < 0 || n_r < 0) throw std::invalid_argument("sample: negative count");
  if (n > 0 && ground_truth.empty())
    throw std::invalid_argument("sample: data requested without a ground truth");
  if (supp && !domain.contains(*supp)) throw std::invalid_argument("sample: supp outside domain");
  if (n_e > 0) boundary.validate(domain);
  if (sigma < 0.0) throw std::invalid_argument("sample: negative noise level");

  const BoxDomain& data_box = supp ? *supp : domain;
  SampleSet s;
  s.d1 = domain.dim();
  s.d2 = static_cast<int>(ground_truth.size());
  s.n = n;
  s.n_e = n_e;
  s.n_r = n_r;
  s.seed = seed;

  RngStream rd(seed, StreamId::kData);
  RngStream rn(seed, StreamId::kNoise);
  RngStream rb(seed, StreamId::kBoundary);
  RngStream rc(seed, StreamId::kCollocation);

  s.data_x.resize(static_cast<std::size_t>(n) * s.d1);
  s.data_y.resize(static_cast<std::size_t>(n) * s.d2);
  std::vector<double> x(static_cast<std::size_t>(s.d1));
  for (int i = 0; i < n; ++i) {
    data_box.sample_uniform(rd, x);
    std::copy(x.begin(), x.end(), s.data_x.begin() + static_cast<std::size_t>(i) * s.d1);
    for (int j = 0; j < s.d2; ++j) {
      double y = ground_truth[static_cast<std::size_t>(j)].eval(x);
      if (sigma > 0.0) y += sigma * rn.gaussian();
      s.data_y[static_cast<std::size_t>(i) * s.d2 + j] = y;
    }
  }
  s.boundary_x.resize(static_cast<std::size_t>(n_e) * s.d1);
  for (int j = 0; j < n_e; ++j) {
    boundary.sample(domain, rb, x);
    std::copy(x.begin(), x.end(), s.boundary_x.begin() + static_cast<std::size_t>(j) * s.d1);
  }
  s.colloc_x.resize(static_cast<std::size_t>(n_r) * s.d1);
  for (int l = 0; l < n_r; ++l) {
    domain.sample_uniform(rc, x);
    std::copy(x.begin(), x.end(), s.colloc_x.begin() + static_cast<std::size_t>(l) * s.d1);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Problem configuration (JSON schema documented in the README)

struct ProblemSpec {
  BoxDomain domain;
  BoundarySet boundary;
  VectorField h;       // condition function on the boundary subset
  VectorField u_star;  // ground truth; may be empty in pure solver mode
  double sigma = 0.0;
  std::optional<BoxDomain> supp;
  int n = 0, n_e = 0, n_r = 0;
  std::uint64_t seed = 0;

  int d1() const { return domain.dim(); }
  int d2() const { return static_cast<int>(h.size()); }

  SampleSet sample() const {
    return pinn::sample(domain, boundary, u_star, sigma, supp, n, n_e, n_r, seed);
  }
};

inline BoxDomain box_from_json(const nlohmann::json& j) {
  BoxDomain b;
  for (const auto& ab : j) b.iv.push_back({ab[0].get<double>(), ab[1].get<double>()});
  b.validate();
  return b;
}

inline nlohmann::json box_to_json(const BoxDomain& b) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& ab : b.iv) j.push_back({ab[0], ab[1]});
  return j;
}

inline ProblemSpec problem_from_json(const nlohmann::json& j) {
  ProblemSpec p;
  p.domain = box_from_json(j.at("domain"));
  if (j.contains("faces")) {
    std::vector<Face> faces;
    bool any_weight = false;
    for (const auto& fj : j.at("faces")) {
      Face f;
      f.coord = fj.at("dim").get<int>();
      std::string side = fj.at("side").get<std::string>();
      if (side != "min" && side != "max") throw std::invalid_argument("face side must be min|max");
      f.at_upper = side == "max";
      if (fj.contains("weight")) {
        f.weight = fj.at("weight").get<double>();
        any_weight = true;
      }
      faces.push_back(f);
    }
    p.boundary = any_weight ? BoundarySet{faces} : BoundarySet::proportional(p.domain, faces);
  }
  for (const auto& e : j.at("h")) p.h.push_back(Expr::parse(e.get<std::string>()));
  if (j.contains("u_star"))
    for (const auto& e : j.at("u_star")) p.u_star.push_back(Expr::parse(e.get<std::string>()));
  if (!p.u_star.empty() && p.u_star.size() != p.h.size())
    throw std::invalid_argument("problem: u_star and h must agree on d2");
  p.sigma = j.value("sigma", 0.0);
  if (j.contains("supp")) p.supp = box_from_json(j.at("supp"));
  const auto& counts = j.at("counts");
  p.n = counts.value("n", 0);
  p.n_e = counts.value("n_e", 0);
  p.n_r = counts.value("n_r", 0);
  p.seed = j.value("seed", std::uint64_t{0});
  return p;
}

inline nlohmann::json problem_to_json(const ProblemSpec& p) {
  nlohmann::json j;
  j["domain"] = box_to_json(p.domain);
  j["faces"] = nlohmann::json::array();
  for (const auto& f : p.boundary.faces)
    j["faces"].push_back({{"dim", f.coord}, {"side", f.at_upper ? "max" : "min"}, {"weight", f.weight}});
  j["h"] = nlohmann::json::array();
  for (const auto& e : p.h) j["h"].push_back(e.source());
  if (!p.u_star.empty()) {
    j["u_star"] = nlohmann::json::array();
    for (const auto& e : p.u_star) j["u_star"].push_back(e.source());
  }
  j["sigma"] = p.sigma;
  if (p.supp) j["supp"] = box_to_json(*p.supp);
  j["counts"] = {{"n", p.n}, {"n_e", p.n_e}, {"n_r", p.n_r}};
  j["seed"] = p.seed;
  return j;
}

}  // namespace pinn
