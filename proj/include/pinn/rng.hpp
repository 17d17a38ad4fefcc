// Counter-based splittable RNG. Every draw is a pure function of
// (seed, stream id, counter), so streams can be split freely and changing
// how many values one stream consumes never perturbs another.
#pragma once

#include <cmath>
#include <cstdint>

namespace pinn {

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// Stream ids for the sampling families; keep stable, they are part of the
// reproducibility contract.
enum class StreamId : std::uint64_t {
  kData = 1,
  kNoise = 2,
  kBoundary = 3,
  kCollocation = 4,
  kInit = 5,
  kMcBoundary = 6,
  kMcInterior = 7,
  kMcData = 8,
};

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream)
      : key_(detail::mix64(seed ^ detail::mix64(stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL))) {}
  RngStream(std::uint64_t seed, StreamId stream)
      : RngStream(seed, static_cast<std::uint64_t>(stream)) {}

  RngStream split(std::uint64_t salt) const {
    RngStream s = *this;
    s.key_ = detail::mix64(key_ ^ detail::mix64(salt + 0x9e3779b97f4a7c15ULL));
    s.counter_ = 0;
    return s;
  }

  std::uint64_t next_u64() { return detail::mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  // uniform on [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // standard normal via Box-Muller; u1 is kept in (0, 1]
  double gaussian() {
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace pinn
