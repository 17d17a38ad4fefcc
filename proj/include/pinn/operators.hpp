// Symbolic differential operators: polynomial operators (monomials in the
// solution's partial derivatives with smooth coefficient fields) and affine
// operators (linear part plus source). Residuals evaluate against jets.
#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "pinn/expr.hpp"
#include "pinn/jet.hpp"

namespace pinn {

struct PolyOperator {
  struct Factor {
    int comp = 0;
    MultiIndex alpha;
    int exp = 1;
  };
  struct Monomial {
    Expr coef;
    std::vector<Factor> factors;  // empty: constant monomial
  };

  int d1 = 0, d2 = 0;
  std::vector<Monomial> monomials;

  int order() const {
    int k = 0;
    for (const auto& m : monomials)
      for (const auto& f : m.factors) k = std::max(k, f.alpha.order());
    return k;
  }

  void validate() const {
    if (d1 < 1 || d2 < 1) throw std::invalid_argument("PolyOperator: d1, d2 must be >= 1");
    for (const auto& m : monomials) {
      if (m.coef.empty()) throw std::invalid_argument("PolyOperator: missing coefficient");
      if (m.coef.max_coord() >= d1)
        throw std::invalid_argument("PolyOperator: coefficient uses coordinate >= d1");
      for (const auto& f : m.factors) {
        if (f.comp < 0 || f.comp >= d2)
          throw std::invalid_argument("PolyOperator: component index out of range");
        if (f.alpha.dim() != d1)
          throw std::invalid_argument("PolyOperator: multi-index length != d1");
        if (f.exp < 1) throw std::invalid_argument("PolyOperator: exponent must be >= 1");
        for (int e : f.alpha.e)
          if (e < 0) throw std::invalid_argument("PolyOperator: negative multi-index");
      }
    }
    if (order() > kMaxJetOrder)
      throw std::invalid_argument("PolyOperator: derivative order above jet cap");
  }
};

struct AffineOperator {
  struct Term {
    int comp = 0;
    MultiIndex alpha;
    Expr coef;
  };

  int d1 = 0, d2 = 0;
  std::vector<Term> terms;
  Expr source;  // may be empty (zero source)

  int order() const {
    int k = 0;
    for (const auto& t : terms) k = std::max(k, t.alpha.order());
    return k;
  }

  void validate() const {
    if (d1 < 1 || d2 < 1) throw std::invalid_argument("AffineOperator: d1, d2 must be >= 1");
    for (const auto& t : terms) {
      if (t.comp < 0 || t.comp >= d2)
        throw std::invalid_argument("AffineOperator: component index out of range");
      if (t.alpha.dim() != d1)
        throw std::invalid_argument("AffineOperator: multi-index length != d1");
      if (t.coef.empty()) throw std::invalid_argument("AffineOperator: missing coefficient");
      if (t.coef.max_coord() >= d1)
        throw std::invalid_argument("AffineOperator: coefficient uses coordinate >= d1");
    }
    if (!source.empty() && source.max_coord() >= d1)
      throw std::invalid_argument("AffineOperator: source uses coordinate >= d1");
    if (order() > kMaxJetOrder)
      throw std::invalid_argument("AffineOperator: derivative order above jet cap");
  }

  PolyOperator to_poly() const {
    PolyOperator p;
    p.d1 = d1;
    p.d2 = d2;
    for (const auto& t : terms)
      p.monomials.push_back({t.coef, {PolyOperator::Factor{t.comp, t.alpha, 1}}});
    if (!source.empty()) p.monomials.push_back({source, {}});
    return p;
  }
};

using Operator = std::variant<PolyOperator, AffineOperator>;

inline int operator_order(const Operator& op) {
  return std::visit([](const auto& o) { return o.order(); }, op);
}
inline void validate(const Operator& op) {
  std::visit([](const auto& o) { o.validate(); }, op);
}

// deg = max over monomials of sum_factors (1 + |alpha|) * exponent; constant
// monomials contribute 0. Requires at least one monomial with a factor.
inline int degree(const PolyOperator& op) {
  bool any = false;
  int deg = 0;
  for (const auto& m : op.monomials) {
    int s = 0;
    for (const auto& f : m.factors) {
      s += (1 + f.alpha.order()) * f.exp;
      any = true;
    }
    deg = std::max(deg, s);
  }
  if (!any) throw std::invalid_argument("degree: operator has no derivative factors");
  return deg;
}

inline int degree(const AffineOperator& op) { return degree(op.to_poly()); }

inline int degree(const Operator& op) {
  return std::visit([](const auto& o) { return degree(o); }, op);
}

// Position-resolved form for repeated residual evaluation against one jet
// layout. Affine operators lower to exponent-1 monomials plus a constant.
struct ResidualPlan {
  struct Factor {
    int comp;
    int pos;
    int exp;
  };
  struct Monomial {
    const Expr* coef;
    std::vector<Factor> factors;
  };
  std::vector<Monomial> monomials;
  int order = 0;

  static ResidualPlan build(const Operator& op, const JetSpace& space) {
    ResidualPlan plan;
    plan.order = operator_order(op);
    if (plan.order > space.order())
      throw std::invalid_argument("residual: jet order below operator order");
    if (const auto* poly = std::get_if<PolyOperator>(&op)) {
      if (poly->d1 != space.dim()) throw std::invalid_argument("residual: dimension mismatch");
      for (const auto& m : poly->monomials) {
        Monomial pm{&m.coef, {}};
        for (const auto& f : m.factors)
          pm.factors.push_back(Factor{f.comp, space.position(f.alpha), f.exp});
        plan.monomials.push_back(std::move(pm));
      }
    } else {
      const auto& aff = std::get<AffineOperator>(op);
      if (aff.d1 != space.dim()) throw std::invalid_argument("residual: dimension mismatch");
      for (const auto& t : aff.terms)
        plan.monomials.push_back(Monomial{&t.coef, {Factor{t.comp, space.position(t.alpha), 1}}});
      if (!aff.source.empty()) plan.monomials.push_back(Monomial{&aff.source, {}});
    }
    return plan;
  }

  // get(comp, pos) -> S: jet coefficient of output component `comp`.
  template <class S, class Get>
  S eval(std::span<const double> x, Get&& get) const {
    S acc = ScalarTraits<S>::constant(0.0);
    for (const auto& m : monomials) {
      S term = ScalarTraits<S>::constant(m.coef->eval(x));
      for (const auto& f : m.factors)
        for (int r = 0; r < f.exp; ++r) term = term * get(f.comp, f.pos);
      acc = acc + term;
    }
    return acc;
  }

  // d(residual)/d(jet coefficient), accumulated through add(comp, pos, v).
  template <class Get, class Acc>
  double eval_with_coeff_grad(std::span<const double> x, Get&& get, Acc&& add) const {
    double value = 0.0;
    for (const auto& m : monomials) {
      double phi = m.coef->eval(x);
      double term = phi;
      for (const auto& f : m.factors) {
        double v = get(f.comp, f.pos);
        for (int r = 0; r < f.exp; ++r) term *= v;
      }
      value += term;
      for (std::size_t fi = 0; fi < m.factors.size(); ++fi) {
        const auto& f = m.factors[fi];
        double v = get(f.comp, f.pos);
        double excl = phi;
        for (std::size_t fj = 0; fj < m.factors.size(); ++fj) {
          if (fj == fi) continue;
          const auto& g = m.factors[fj];
          double u = get(g.comp, g.pos);
          for (int r = 0; r < g.exp; ++r) excl *= u;
        }
        double dpow = static_cast<double>(f.exp);
        for (int r = 0; r < f.exp - 1; ++r) dpow *= v;
        add(f.comp, f.pos, excl * dpow);
      }
    }
    return value;
  }
};

// Un-squared residual of the operator against output jets at x.
template <class S>
S residual(const Operator& op, std::span<const Jet<S>> jets, std::span<const double> x) {
  if (jets.empty()) throw std::invalid_argument("residual: no output jets");
  ResidualPlan plan = ResidualPlan::build(op, *jets[0].space);
  return plan.template eval<S>(
      x, [&](int comp, int pos) { return jets[static_cast<std::size_t>(comp)].c[static_cast<std::size_t>(pos)]; });
}

// One constraint d^alpha u_i = 0 per output component and |alpha| <= m+1;
// summed squared residuals over these operators give the derivative penalty.
inline std::vector<AffineOperator> sobolev_constraints(int m, int d1, int d2) {
  if (m < 0) throw std::invalid_argument("sobolev_constraints: m must be >= 0");
  if (m + 1 > kMaxJetOrder)
    throw std::invalid_argument("sobolev_constraints: m + 1 above jet cap");
  auto space = JetSpace::get(d1, m + 1);
  std::vector<AffineOperator> ops;
  for (int i = 0; i < d2; ++i) {
    for (const auto& alpha : space->indices()) {
      AffineOperator op;
      op.d1 = d1;
      op.d2 = d2;
      op.terms.push_back(AffineOperator::Term{i, alpha, Expr::parse("1")});
      ops.push_back(std::move(op));
    }
  }
  return ops;
}

inline nlohmann::json to_json(const Operator& op) {
  nlohmann::json j;
  j["d1"] = std::visit([](const auto& o) { return o.d1; }, op);
  j["d2"] = std::visit([](const auto& o) { return o.d2; }, op);
  auto factor_json = [](int comp, const MultiIndex& alpha, int exp) {
    return nlohmann::json{{"i", comp}, {"alpha", alpha.e}, {"exp", exp}};
  };
  if (const auto* poly = std::get_if<PolyOperator>(&op)) {
    j["kind"] = "poly";
    j["monomials"] = nlohmann::json::array();
    for (const auto& m : poly->monomials) {
      nlohmann::json fm = nlohmann::json::array();
      for (const auto& f : m.factors) fm.push_back(factor_json(f.comp, f.alpha, f.exp));
      j["monomials"].push_back({{"coef", m.coef.source()}, {"factors", std::move(fm)}});
    }
  } else {
    const auto& aff = std::get<AffineOperator>(op);
    j["kind"] = "affine";
    j["monomials"] = nlohmann::json::array();
    for (const auto& t : aff.terms) {
      nlohmann::json fm = nlohmann::json::array();
      fm.push_back(factor_json(t.comp, t.alpha, 1));
      j["monomials"].push_back({{"coef", t.coef.source()}, {"factors", std::move(fm)}});
    }
    j["source"] = aff.source.empty() ? "0" : aff.source.source();
  }
  return j;
}

inline Operator operator_from_json(const nlohmann::json& j) {
  std::string kind = j.at("kind").get<std::string>();
  int d1 = j.at("d1").get<int>();
  int d2 = j.at("d2").get<int>();
  auto parse_factor = [&](const nlohmann::json& f) {
    PolyOperator::Factor out;
    out.comp = f.at("i").get<int>();
    out.alpha = MultiIndex{f.at("alpha").get<std::vector<int>>()};
    out.exp = f.value("exp", 1);
    return out;
  };
  if (kind == "poly") {
    PolyOperator op;
    op.d1 = d1;
    op.d2 = d2;
    for (const auto& m : j.at("monomials")) {
      PolyOperator::Monomial mono;
      mono.coef = Expr::parse(m.at("coef").get<std::string>());
      for (const auto& f : m.at("factors")) mono.factors.push_back(parse_factor(f));
      op.monomials.push_back(std::move(mono));
    }
    op.validate();
    return op;
  }
  if (kind == "affine") {
    AffineOperator op;
    op.d1 = d1;
    op.d2 = d2;
    for (const auto& m : j.at("monomials")) {
      const auto& factors = m.at("factors");
      if (factors.size() != 1 || factors[0].value("exp", 1) != 1)
        throw std::invalid_argument("operator: affine monomials must have one exponent-1 factor");
      auto f = parse_factor(factors[0]);
      op.terms.push_back(AffineOperator::Term{f.comp, f.alpha,
                                              Expr::parse(m.at("coef").get<std::string>())});
    }
    std::string src = j.value("source", std::string("0"));
    if (src != "0") op.source = Expr::parse(src);
    op.validate();
    return op;
  }
  throw std::invalid_argument("operator: kind must be 'poly' or 'affine'");
}

}  // namespace pinn
