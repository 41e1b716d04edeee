#pragma once

#include <cstdint>
#include <string_view>
#include <random>

namespace fedswitch {

/// Deterministic random stream. All sampling helpers are implemented here
/// rather than via <random> distributions so the produced bits are identical
/// across standard libraries and across worker counts.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t u64() { return engine_(); }

  /// Unbiased integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform double in [0, 1), 53 random bits.
  double uniform();

  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Derives the seed of a dedicated substream from a base seed, a purpose
/// label, and up to two integer coordinates (typically round and client id).
/// Streams with distinct keys are independent for all practical purposes, so
/// the schedule of one consumer never perturbs another.
std::uint64_t derive_seed(std::uint64_t base, std::string_view label,
                          std::uint64_t a = 0, std::uint64_t b = 0);

/// Convenience: substream constructed from a derived seed.
inline Rng substream(std::uint64_t base, std::string_view label,
                     std::uint64_t a = 0, std::uint64_t b = 0) {
  return Rng(derive_seed(base, label, a, b));
}

}  // namespace fedswitch
