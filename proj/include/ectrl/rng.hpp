#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace ectrl {

// Portable PRNG (xoshiro256**) with hand-written distributions. The standard
// library distributions are implementation-defined, so everything that feeds
// a reproducible result goes through this class instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  // Uniform on [0, bound), bound > 0. Unbiased (Lemire's method).
  std::uint64_t below(std::uint64_t bound);
  // Uniform on [lo, hi], inclusive.
  std::int64_t range(std::int64_t lo, std::int64_t hi);
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t s_[4];
};

std::uint64_t splitmix64(std::uint64_t& state);

// Stable seed derivation: hash of an ordered tuple of integers. Used for
// realization seeds, hash(master, grid index, realization index), and for
// per-trial instantiation seeds.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts);

}  // namespace ectrl
