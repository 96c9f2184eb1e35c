#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace otaform {

// Independent sub-seed for one stream of a scenario. Changing the draws of one
// stream (say, topology) never perturbs another (say, agent initialization).
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream) {
  // FNV-1a over the stream tag, then a splitmix64 finalizer.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : stream) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  std::uint64_t z = master ^ h;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Thin wrapper over mt19937_64. The real-valued draws are built from raw
// engine output so sequences do not depend on the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // [0, 1)
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // [lo, hi], both endpoints reachable.
  double uniform_closed(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) / static_cast<double>((1ULL << 53) - 1);
    return lo + (hi - lo) * u;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
  std::uint64_t index(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace otaform
