#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qswn {

// Identifier recorded in run manifests. The engine is std::mt19937_64, whose
// output sequence is fixed by the standard; distributions are implemented here
// rather than through <random> so draws are identical across standard libraries.
inline constexpr std::string_view kRngIdentifier =
    "mt19937_64+splitmix64-mix+uniform53+modulo-rejection+box-muller";

// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Order-dependent hash of a seed with a label; used to derive substreams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t label) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();

  // Uniform integer in [0, bound), unbiased. bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  // Standard normal via Box-Muller (no cached second variate).
  double normal();

  // Exponential with unit mean.
  double exponential();

 private:
  std::mt19937_64 engine_;
};

}  // namespace qswn
