// Copyright (c) 2026 the yoho-sed authors.
// Licensed under the Apache License, Version 2.0. See the LICENSE file in
// the project root for license terms.

#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace yoho {

// splitmix64 step; also used as a mixing function for stream derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  std::uint64_t s = seed + 0x9e3779b97f4a7c15ull * (value + 1);
  return splitmix64(s);
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::string_view tag) {
  std::uint64_t h = seed;
  for (char c : tag) h = hash_combine(h, static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
  return h;
}

// Deterministic generator with explicitly specified distributions, so that
// outputs are bit-identical across platforms and standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // warm up so that small seeds do not produce correlated first draws
    splitmix64(state_);
    splitmix64(state_);
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  // uniform in [0, 1) with 53 bits of precision
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

  // uniform integer in [lo, hi] inclusive
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  // Box-Muller standard normal
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // derive an independent stream, e.g. per file or per epoch
  Rng fork(std::uint64_t key) const { return Rng(hash_combine(state_, key)); }

private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Fisher-Yates with explicit draws (std::shuffle is implementation-defined).
template <class RandomIt>
void deterministic_shuffle(RandomIt first, RandomIt last, Rng& rng) {
  auto n = last - first;
  for (auto i = n - 1; i > 0; --i) {
    auto j = static_cast<decltype(i)>(rng.below(static_cast<std::uint64_t>(i + 1)));
    std::swap(first[i], first[j]);
  }
}

}  // namespace yoho
