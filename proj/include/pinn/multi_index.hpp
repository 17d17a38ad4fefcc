// Multi-indices and the shared per-(dimension, order) jet layout: graded-lex
// enumeration of {|alpha| <= K}, Leibniz convolution pairs, and the set
// partition plans used for derivatives of compositions.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

#include "pinn/combinatorics.hpp"

namespace pinn {

inline constexpr int kMaxJetOrder = 4;

struct MultiIndex {
  std::vector<int> e;

  int order() const {
    int s = 0;
    for (int v : e) s += v;
    return s;
  }
  int dim() const { return static_cast<int>(e.size()); }
  bool operator==(const MultiIndex& o) const { return e == o.e; }
};

inline std::int64_t multinomial(const MultiIndex& alpha, const MultiIndex& beta) {
  std::int64_t r = 1;
  for (std::size_t i = 0; i < alpha.e.size(); ++i) r *= binomial(alpha.e[i], beta.e[i]);
  return r;
}

// Precomputed structure shared by every jet of a given (dim, order).
// Immutable after construction; safe to share across threads.
class JetSpace {
 public:
  struct LeibnizTerm {
    int left;   // position of beta
    int right;  // position of alpha - beta
    double coeff;
  };
  struct Partition {
    int nblocks;
    std::vector<int> block_pos;  // jet position of alpha(S) per block
  };

  JetSpace(int dim, int order) : dim_(dim), order_(order) {
    if (dim < 1) throw std::invalid_argument("JetSpace: dim must be >= 1");
    if (order < 0 || order > kMaxJetOrder)
      throw std::invalid_argument("JetSpace: order must be in [0, 4]");
    enumerate_indices();
    build_leibniz();
    build_partition_plans();
  }

  int dim() const { return dim_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(indices_.size()); }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  const MultiIndex& index_at(int pos) const { return indices_[pos]; }

  int position(const MultiIndex& alpha) const {
    auto it = lookup_.find(key_of(alpha));
    if (it == lookup_.end()) throw std::invalid_argument("JetSpace: multi-index out of range");
    return it->second;
  }
  bool contains(const MultiIndex& alpha) const {
    return lookup_.find(key_of(alpha)) != lookup_.end();
  }

  // coeffs[alpha] of a product: sum over beta <= alpha of
  // multinomial(alpha, beta) * a[beta] * b[alpha - beta].
  const std::vector<LeibnizTerm>& leibniz(int pos) const { return leibniz_[pos]; }

  // Derivative of a composition g(f): for |alpha| >= 1,
  // d^alpha g(f) = sum over partitions P of the |alpha| derivative slots of
  // g^(|P|)(f) * prod over blocks S of d^{alpha(S)} f.
  const std::vector<Partition>& composition_plan(int pos) const { return plans_[pos]; }

  // Same plans, flattened for hot loops: per partition [nblocks, pos...].
  const std::vector<std::int32_t>& composition_flat(int pos) const { return flat_plans_[pos]; }

  static std::shared_ptr<const JetSpace> get(int dim, int order) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const JetSpace>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(dim, order);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto space = std::make_shared<const JetSpace>(dim, order);
    cache.emplace(key, space);
    return space;
  }

 private:
  std::uint64_t key_of(const MultiIndex& alpha) const {
    if (alpha.dim() != dim_) throw std::invalid_argument("JetSpace: dimension mismatch");
    std::uint64_t k = 0;
    for (int v : alpha.e) {
      if (v < 0) throw std::invalid_argument("JetSpace: negative exponent");
      k = k * static_cast<std::uint64_t>(order_ + 1) + static_cast<std::uint64_t>(v);
    }
    return k;
  }

  // Graded lexicographic: by |alpha| ascending, then lexicographically
  // descending on the exponent tuple (x0 before x1).
  void enumerate_indices() {
    std::vector<MultiIndex> all;
    MultiIndex cur{std::vector<int>(dim_, 0)};
    gen(all, cur, 0, order_);
    std::sort(all.begin(), all.end(), [](const MultiIndex& a, const MultiIndex& b) {
      int oa = a.order(), ob = b.order();
      if (oa != ob) return oa < ob;
      return a.e > b.e;
    });
    indices_ = std::move(all);
    for (int i = 0; i < static_cast<int>(indices_.size()); ++i)
      lookup_.emplace(key_of(indices_[i]), i);
  }

  void gen(std::vector<MultiIndex>& out, MultiIndex& cur, int coord, int budget) {
    if (coord == dim_) {
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= budget; ++v) {
      cur.e[coord] = v;
      gen(out, cur, coord + 1, budget - v);
    }
    cur.e[coord] = 0;
  }

  void build_leibniz() {
    leibniz_.resize(indices_.size());
    for (int pos = 0; pos < size(); ++pos) {
      const MultiIndex& alpha = indices_[pos];
      MultiIndex beta{std::vector<int>(dim_, 0)};
      gen_sub(pos, alpha, beta, 0);
    }
  }

  void gen_sub(int pos, const MultiIndex& alpha, MultiIndex& beta, int coord) {
    if (coord == dim_) {
      MultiIndex rest{std::vector<int>(dim_, 0)};
      for (int i = 0; i < dim_; ++i) rest.e[i] = alpha.e[i] - beta.e[i];
      leibniz_[pos].push_back(LeibnizTerm{position(beta), position(rest),
                                          static_cast<double>(multinomial(alpha, beta))});
      return;
    }
    for (int v = 0; v <= alpha.e[coord]; ++v) {
      beta.e[coord] = v;
      gen_sub(pos, alpha, beta, coord + 1);
    }
    beta.e[coord] = 0;
  }

  void build_partition_plans() {
    plans_.resize(indices_.size());
    flat_plans_.resize(indices_.size());
    std::vector<std::vector<std::vector<std::vector<int>>>> parts_by_n(order_ + 1);
    for (int n = 1; n <= order_; ++n) parts_by_n[n] = set_partitions(n);
    for (int pos = 0; pos < size(); ++pos) {
      const MultiIndex& alpha = indices_[pos];
      int k = alpha.order();
      if (k == 0) continue;
      // slot -> coordinate: the first alpha_0 slots belong to x0, etc.
      std::vector<int> slot_coord;
      for (int i = 0; i < dim_; ++i)
        for (int r = 0; r < alpha.e[i]; ++r) slot_coord.push_back(i);
      for (const auto& part : parts_by_n[k]) {
        Partition plan;
        plan.nblocks = static_cast<int>(part.size());
        for (const auto& block : part) {
          MultiIndex bs{std::vector<int>(dim_, 0)};
          for (int slot : block) ++bs.e[slot_coord[slot]];
          plan.block_pos.push_back(position(bs));
        }
        flat_plans_[pos].push_back(plan.nblocks);
        for (int bp : plan.block_pos) flat_plans_[pos].push_back(bp);
        plans_[pos].push_back(std::move(plan));
      }
    }
  }

  int dim_;
  int order_;
  std::vector<MultiIndex> indices_;
  std::map<std::uint64_t, int> lookup_;
  std::vector<std::vector<LeibnizTerm>> leibniz_;
  std::vector<std::vector<Partition>> plans_;
  std::vector<std::vector<std::int32_t>> flat_plans_;
};

}  // namespace pinn
