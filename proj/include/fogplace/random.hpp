#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace fogplace {

// Thin wrapper over mt19937_64 that owns all draw semantics itself.
// std::uniform_real_distribution and friends are implementation-defined, so
// identical seeds would stop producing identical runs across standard
// libraries; everything here is pinned to the raw 64-bit stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // [0,1) with 53 bits of mantissa.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Inclusive integer range via rejection-free scaling; bias is < 2^-53 and
  // irrelevant for the range sizes used here.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(uniform() * static_cast<double>(hi - lo + 1));
  }

  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n));
  }

  double exponential(double mean) {
    double u = uniform();
    return -mean * std::log1p(-u);
  }

  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[index(v.size())];
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

  // First k elements of a random permutation of 0..n-1.
  std::vector<int> sample_indices(int n, int k) {
    std::vector<int> ids(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < k; ++i) {
      int j = i + static_cast<int>(index(static_cast<std::size_t>(n - i)));
      std::swap(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(j)]);
    }
    ids.resize(static_cast<std::size_t>(k));
    return ids;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace fogplace
