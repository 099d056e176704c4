#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "qswn/spectra.hpp"

namespace qswn {

// Occupations may stray this far outside [0, 1] through rounding and are clamped.
inline constexpr double kOccupationClamp = 1e-12;
// Eigenvectors must be normalized to this tolerance.
inline constexpr double kStateNormTolerance = 1e-8;

// Binary entropy h(z) in bits with h(0) = h(1) = 0 exactly.
double site_entropy(double z);

// (1/N) log2 N: entropies are divided by this so extended states score ~1.
double entropy_scale(int n);

// N h(1/N) / log2 N, the scaled entropy of the uniform state.
double max_scaled_state_entropy(int n);

// (1/N) sum_n h(|psi_n|^2); divided by entropy_scale(N) when scaled.
double state_entropy(std::span<const double> psi, bool scaled = true);

struct EntropyProfile {
  int state_index = 0;
  double eigenvalue = 0.0;
  std::vector<double> site_entropies;  // bits, empty unless requested
  double state_entropy_raw = 0.0;
  double state_entropy_scaled = 0.0;
};

struct SpectrumEntropy {
  double value = 0.0;  // mean scaled state entropy
  int state_count = 0;
  std::vector<std::uint64_t> seeds;
};

// Average of the scaled state entropies over every eigenstate.
SpectrumEntropy spectrum_entropy(const SpectralDecomposition& decomposition);

// One profile per eigenstate in ascending-energy order. Site entropies are
// filled only when `with_sites` is set (N^2 values).
std::vector<EntropyProfile> eigenstate_profiles(const SpectralDecomposition& decomposition,
                                                bool with_sites = false);

// Mean of state_entropy_scaled, summed in state order like spectrum_entropy.
double mean_scaled_entropy(std::span<const EntropyProfile> profiles);

// CSV exports: `state_index,eigenvalue,state_entropy_scaled` and
// `state_index,site,site_entropy` (site 1-based).
void write_profile_csv(std::ostream& out, std::span<const EntropyProfile> profiles);
void write_site_entropy_csv(std::ostream& out, std::span<const EntropyProfile> profiles);

}  // namespace qswn
