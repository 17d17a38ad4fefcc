// The tanh multilayer perceptron: parameters, initialization, checkpoint
// serialization, and jet-forward evaluation (plain scalars or tape scalars).
#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pinn/jet.hpp"
#include "pinn/rng.hpp"

namespace pinn {

struct MlpParams {
  int h = 0;   // hidden layers
  int d = 0;   // hidden width
  int d1 = 0;  // input dim
  int d2 = 0;  // output dim

  struct Layer {
    int in = 0, out = 0;
    std::vector<double> w;  // row-major [in][out]
    std::vector<double> b;  // [out]

    double& at(int i, int j) { return w[static_cast<std::size_t>(i) * out + j]; }
    double at(int i, int j) const { return w[static_cast<std::size_t>(i) * out + j]; }
  };
  std::vector<Layer> layers;  // h+1 layers, shapes d1 -> d -> ... -> d -> d2

  static MlpParams zeros(int h, int d, int d1, int d2) {
    if (h < 1 || d < 1 || d1 < 1 || d2 < 1)
      throw std::invalid_argument("MlpParams: h, d, d1, d2 must be >= 1");
    MlpParams p;
    p.h = h;
    p.d = d;
    p.d1 = d1;
    p.d2 = d2;
    p.layers.resize(static_cast<std::size_t>(h) + 1);
    for (int k = 0; k <= h; ++k) {
      Layer& L = p.layers[static_cast<std::size_t>(k)];
      L.in = (k == 0) ? d1 : d;
      L.out = (k == h) ? d2 : d;
      L.w.assign(static_cast<std::size_t>(L.in) * L.out, 0.0);
      L.b.assign(static_cast<std::size_t>(L.out), 0.0);
    }
    return p;
  }

  // Symmetric uniform init on [-sqrt(6/(in+out)), +sqrt(6/(in+out))], zero biases.
  static MlpParams glorot(int h, int d, int d1, int d2, RngStream rng) {
    MlpParams p = zeros(h, d, d1, d2);
    for (auto& L : p.layers) {
      double lim = std::sqrt(6.0 / (L.in + L.out));
      for (auto& wij : L.w) wij = rng.uniform(-lim, lim);
    }
    return p;
  }

  std::size_t param_count() const {
    std::size_t n = 0;
    for (const auto& L : layers) n += L.w.size() + L.b.size();
    return n;
  }

  double param_norm_sq() const {
    double s = 0.0;
    for (const auto& L : layers) {
      for (double v : L.w) s += v * v;
      for (double v : L.b) s += v * v;
    }
    return s;
  }

  std::vector<double> flatten() const {
    std::vector<double> out;
    out.reserve(param_count());
    for (const auto& L : layers) {
      out.insert(out.end(), L.w.begin(), L.w.end());
      out.insert(out.end(), L.b.begin(), L.b.end());
    }
    return out;
  }

  void set_from_flat(std::span<const double> flat) {
    if (flat.size() != param_count()) throw std::invalid_argument("MlpParams: flat size mismatch");
    std::size_t k = 0;
    for (auto& L : layers) {
      for (auto& v : L.w) v = flat[k++];
      for (auto& v : L.b) v = flat[k++];
    }
  }
};

inline nlohmann::json to_json(const MlpParams& p) {
  nlohmann::json j;
  j["h"] = p.h;
  j["d"] = p.d;
  j["d1"] = p.d1;
  j["d2"] = p.d2;
  j["layers"] = nlohmann::json::array();
  for (const auto& L : p.layers) {
    nlohmann::json w = nlohmann::json::array();
    for (int i = 0; i < L.in; ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int j2 = 0; j2 < L.out; ++j2) row.push_back(L.at(i, j2));
      w.push_back(std::move(row));
    }
    j["layers"].push_back({{"w", std::move(w)}, {"b", L.b}});
  }
  return j;
}

inline MlpParams mlp_from_json(const nlohmann::json& j) {
  MlpParams p = MlpParams::zeros(j.at("h").get<int>(), j.at("d").get<int>(),
                                 j.at("d1").get<int>(), j.at("d2").get<int>());
  const auto& layers = j.at("layers");
  if (layers.size() != p.layers.size()) throw std::invalid_argument("checkpoint: layer count mismatch");
  for (std::size_t k = 0; k < p.layers.size(); ++k) {
    auto& L = p.layers[k];
    const auto& w = layers[k].at("w");
    if (static_cast<int>(w.size()) != L.in) throw std::invalid_argument("checkpoint: weight rows mismatch");
    for (int i = 0; i < L.in; ++i) {
      const auto& row = w[static_cast<std::size_t>(i)];
      if (static_cast<int>(row.size()) != L.out)
        throw std::invalid_argument("checkpoint: weight cols mismatch");
      for (int j2 = 0; j2 < L.out; ++j2) L.at(i, j2) = row[static_cast<std::size_t>(j2)].get<double>();
    }
    const auto& b = layers[k].at("b");
    if (static_cast<int>(b.size()) != L.out) throw std::invalid_argument("checkpoint: bias size mismatch");
    for (int j2 = 0; j2 < L.out; ++j2) L.b[static_cast<std::size_t>(j2)] = b[static_cast<std::size_t>(j2)].get<double>();
  }
  return p;
}

namespace detail {

// Shared forward pass; GetW/GetB return the parameter scalars so the same
// code drives the double and the tape-backed evaluation. Accumulation order
// (bias first, then inputs in ascending order) is part of the contract: the
// K=0 jet forward must be bit-identical to a plain forward pass.
template <class S, class GetW, class GetB>
std::vector<Jet<S>> mlp_forward_impl(const MlpParams& p, std::span<const double> x, int order,
                                     GetW&& getw, GetB&& getb) {
  if (static_cast<int>(x.size()) != p.d1)
    throw std::invalid_argument("mlp_forward_jet: input dimension mismatch");
  auto space = JetSpace::get(p.d1, order);
  std::vector<Jet<S>> act;
  act.reserve(static_cast<std::size_t>(p.d1));
  for (int i = 0; i < p.d1; ++i) act.push_back(jet_variable<S>(space, i, x));

  for (int k = 0; k <= p.h; ++k) {
    const auto& L = p.layers[static_cast<std::size_t>(k)];
    std::vector<Jet<S>> z;
    z.reserve(static_cast<std::size_t>(L.out));
    for (int j = 0; j < L.out; ++j) {
      Jet<S> acc = jet_constant<S>(space, x, S(getb(k, j)));
      for (int i = 0; i < L.in; ++i)
        acc = jet_add(acc, jet_scale(act[static_cast<std::size_t>(i)], getw(k, i, j)));
      z.push_back(std::move(acc));
    }
    if (k < p.h) {
      for (auto& zj : z) zj = jet_tanh(zj);
    }
    act = std::move(z);
  }
  return act;
}

}  // namespace detail

// Output jets carrying exact d^alpha u_theta(x) for |alpha| <= order.
inline std::vector<Jet<double>> mlp_forward_jet(const MlpParams& p, std::span<const double> x,
                                                int order) {
  return detail::mlp_forward_impl<double>(
      p, x, order, [&](int k, int i, int j) { return p.layers[static_cast<std::size_t>(k)].at(i, j); },
      [&](int k, int j) { return p.layers[static_cast<std::size_t>(k)].b[static_cast<std::size_t>(j)]; });
}

// Plain forward pass (values only).
inline std::vector<double> mlp_forward(const MlpParams& p, std::span<const double> x) {
  auto jets = mlp_forward_jet(p, x, 0);
  std::vector<double> out(jets.size());
  for (std::size_t i = 0; i < jets.size(); ++i) out[i] = jets[i].c[0];
  return out;
}

// Parameters registered as leaves on a tape; forward passes through this
// object are differentiable in theta via grad_params.
struct TapeMlp {
  const MlpParams* shape = nullptr;
  Tape* tape = nullptr;
  std::vector<TapeScalar> leaves;  // layout matches MlpParams::flatten()

  static TapeMlp attach(const MlpParams& p, Tape& tape) {
    TapeMlp m;
    m.shape = &p;
    m.tape = &tape;
    std::vector<double> flat = p.flatten();
    m.leaves.reserve(flat.size());
    for (double v : flat) m.leaves.push_back(tape.leaf(v));
    return m;
  }

  const TapeScalar& weight(int layer, int i, int j) const {
    return leaves[offset_w(layer) + static_cast<std::size_t>(i) *
                                        shape->layers[static_cast<std::size_t>(layer)].out +
                  static_cast<std::size_t>(j)];
  }
  const TapeScalar& bias(int layer, int j) const {
    return leaves[offset_b(layer) + static_cast<std::size_t>(j)];
  }

  std::vector<Jet<TapeScalar>> forward(std::span<const double> x, int order) const {
    return detail::mlp_forward_impl<TapeScalar>(
        *shape, x, order, [&](int k, int i, int j) { return weight(k, i, j); },
        [&](int k, int j) { return bias(k, j); });
  }

  TapeScalar param_norm_sq() const {
    TapeScalar acc = make_const(0.0);
    for (const auto& leaf : leaves) acc = acc + leaf * leaf;
    return acc;
  }

 private:
  std::size_t offset_w(int layer) const {
    std::size_t off = 0;
    for (int k = 0; k < layer; ++k) {
      const auto& L = shape->layers[static_cast<std::size_t>(k)];
      off += L.w.size() + L.b.size();
    }
    return off;
  }
  std::size_t offset_b(int layer) const {
    return offset_w(layer) + shape->layers[static_cast<std::size_t>(layer)].w.size();
  }
};

}  // namespace pinn
