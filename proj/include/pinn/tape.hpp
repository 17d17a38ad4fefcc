// Scalar reverse-mode tape. Records add/mul/tanh/affine elementary ops;
// constants are kept off the tape and folded into node partials.
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace pinn {

class Tape;

struct TapeScalar {
  double v = 0.0;
  std::int32_t id = -1;  // -1: constant, not on any tape
  Tape* tape = nullptr;
  std::uint64_t gen = 0;

  bool is_const() const { return id < 0; }
};

class Tape {
 public:
  struct Node {
    double da, db;
    std::int32_t a, b;  // parent ids, -1 if absent
  };

  TapeScalar leaf(double value) {
    nodes_.push_back(Node{0.0, 0.0, -1, -1});
    return TapeScalar{value, static_cast<std::int32_t>(nodes_.size() - 1), this, gen_};
  }

  TapeScalar record(double value, double da, std::int32_t a, double db, std::int32_t b) {
    nodes_.push_back(Node{da, db, a, b});
    return TapeScalar{value, static_cast<std::int32_t>(nodes_.size() - 1), this, gen_};
  }

  void clear() {
    nodes_.clear();
    ++gen_;
  }

  std::size_t size() const { return nodes_.size(); }
  std::uint64_t generation() const { return gen_; }

  // Reverse sweep from `output`; returns d(output)/d(leaf) for each leaf.
  // Leaves that do not reach the output (and constants) get 0.
  std::vector<double> gradient(const TapeScalar& output,
                               std::span<const TapeScalar> leaves) const {
    std::vector<double> grad(leaves.size(), 0.0);
    if (output.is_const()) return grad;
    check_live(output);
    std::vector<double> adj(nodes_.size(), 0.0);
    adj[static_cast<std::size_t>(output.id)] = 1.0;
    for (std::int32_t i = output.id; i >= 0; --i) {
      double w = adj[static_cast<std::size_t>(i)];
      if (w == 0.0) continue;
      const Node& n = nodes_[static_cast<std::size_t>(i)];
      if (n.a >= 0) adj[static_cast<std::size_t>(n.a)] += n.da * w;
      if (n.b >= 0) adj[static_cast<std::size_t>(n.b)] += n.db * w;
    }
    for (std::size_t k = 0; k < leaves.size(); ++k) {
      if (leaves[k].is_const()) continue;
      check_live(leaves[k]);
      grad[k] = adj[static_cast<std::size_t>(leaves[k].id)];
    }
    return grad;
  }

  void check_live(const TapeScalar& s) const {
    if (s.tape != this || s.gen != gen_ ||
        s.id >= static_cast<std::int32_t>(nodes_.size()))
      throw std::logic_error("Tape: stale node id (tape cleared or foreign tape)");
  }

 private:
  std::vector<Node> nodes_;
  std::uint64_t gen_ = 0;
};

inline TapeScalar make_const(double v) { return TapeScalar{v, -1, nullptr, 0}; }

namespace detail {
inline Tape* common_tape(const TapeScalar& a, const TapeScalar& b) {
  if (!a.is_const() && !b.is_const() && a.tape != b.tape)
    throw std::logic_error("TapeScalar: operands live on different tapes");
  return a.is_const() ? b.tape : a.tape;
}
}  // namespace detail

inline TapeScalar operator+(const TapeScalar& a, const TapeScalar& b) {
  if (a.is_const() && b.is_const()) return make_const(a.v + b.v);
  Tape* t = detail::common_tape(a, b);
  if (a.is_const()) return t->record(a.v + b.v, 1.0, b.id, 0.0, -1);
  if (b.is_const()) return t->record(a.v + b.v, 1.0, a.id, 0.0, -1);
  return t->record(a.v + b.v, 1.0, a.id, 1.0, b.id);
}

inline TapeScalar operator-(const TapeScalar& a, const TapeScalar& b) {
  if (a.is_const() && b.is_const()) return make_const(a.v - b.v);
  Tape* t = detail::common_tape(a, b);
  if (a.is_const()) return t->record(a.v - b.v, -1.0, b.id, 0.0, -1);
  if (b.is_const()) return t->record(a.v - b.v, 1.0, a.id, 0.0, -1);
  return t->record(a.v - b.v, 1.0, a.id, -1.0, b.id);
}

inline TapeScalar operator*(const TapeScalar& a, const TapeScalar& b) {
  if (a.is_const() && b.is_const()) return make_const(a.v * b.v);
  // A zero *constant* factor kills the other branch exactly.
  if (a.is_const() && a.v == 0.0) return make_const(0.0);
  if (b.is_const() && b.v == 0.0) return make_const(0.0);
  Tape* t = detail::common_tape(a, b);
  if (a.is_const()) return t->record(a.v * b.v, a.v, b.id, 0.0, -1);
  if (b.is_const()) return t->record(a.v * b.v, b.v, a.id, 0.0, -1);
  return t->record(a.v * b.v, b.v, a.id, a.v, b.id);
}

inline TapeScalar operator-(const TapeScalar& a) {
  if (a.is_const()) return make_const(-a.v);
  return a.tape->record(-a.v, -1.0, a.id, 0.0, -1);
}

inline TapeScalar operator+(const TapeScalar& a, double c) { return a + make_const(c); }
inline TapeScalar operator+(double c, const TapeScalar& a) { return make_const(c) + a; }
inline TapeScalar operator-(const TapeScalar& a, double c) { return a - make_const(c); }
inline TapeScalar operator-(double c, const TapeScalar& a) { return make_const(c) - a; }
inline TapeScalar operator*(const TapeScalar& a, double c) { return a * make_const(c); }
inline TapeScalar operator*(double c, const TapeScalar& a) { return make_const(c) * a; }

inline TapeScalar tanh(const TapeScalar& a) {
  double t = std::tanh(a.v);
  if (a.is_const()) return make_const(t);
  return a.tape->record(t, 1.0 - t * t, a.id, 0.0, -1);
}

// Exact reverse-mode gradient of `output` with respect to `leaves`.
inline std::vector<double> grad_params(const TapeScalar& output,
                                       std::span<const TapeScalar> leaves) {
  if (output.is_const() || output.tape == nullptr) {
    return std::vector<double>(leaves.size(), 0.0);
  }
  return output.tape->gradient(output, leaves);
}

}  // namespace pinn
