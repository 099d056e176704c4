#include "qswn/entropy.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "qswn/error.hpp"

namespace qswn {

namespace {


double norm_squared(std::span<const double> psi) {
  double s = 0.0;
  for (double a : psi) s += a * a;
  return s;
}

void require_normalized(std::span<const double> psi) {
  const double norm = std::sqrt(norm_squared(psi));
  if (!(std::abs(norm - 1.0) <= kStateNormTolerance)) {
    throw DomainError("state is not normalized (|psi| = " + std::to_string(norm) + ")");
  }
}

double raw_state_entropy(std::span<const double> psi, std::vector<double>* sites) {
  double total = 0.0;
  if (sites) sites->resize(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double h = site_entropy(psi[i] * psi[i]);
    if (sites) (*sites)[i] = h;
    total += h;
  }
  return total / static_cast<double>(psi.size());
}

}  // namespace

double site_entropy(double z) {
  if (!(z >= -kOccupationClamp && z <= 1.0 + kOccupationClamp)) {
    throw DomainError("occupation " + std::to_string(z) + " outside [0, 1]");
  }
  if (z <= 0.0 || z >= 1.0) return 0.0;
  return -z * std::log2(z) - (1.0 - z) * std::log2(1.0 - z);
}

double entropy_scale(int n) {
  if (n < 2) throw DomainError("entropy scaling needs N >= 2");
  return std::log2(static_cast<double>(n)) / static_cast<double>(n);
}

double max_scaled_state_entropy(int n) {
  return site_entropy(1.0 / n) / entropy_scale(n);
}

double state_entropy(std::span<const double> psi, bool scaled) {
  if (psi.empty()) throw DomainError("empty state");
  require_normalized(psi);
  const double raw = raw_state_entropy(psi, nullptr);
  return scaled ? raw / entropy_scale(static_cast<int>(psi.size())) : raw;
}

std::vector<EntropyProfile> eigenstate_profiles(const SpectralDecomposition& d, bool with_sites) {
  const int n = d.size();
  const double scale = entropy_scale(n);
  std::vector<EntropyProfile> profiles(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    const auto psi = d.eigenvector(a);
    require_normalized(psi);
    EntropyProfile& p = profiles[a];
    p.state_index = a;
    p.eigenvalue = d.eigenvalues()[a];
    p.state_entropy_raw = raw_state_entropy(psi, with_sites ? &p.site_entropies : nullptr);
    p.state_entropy_scaled = p.state_entropy_raw / scale;
  }
  return profiles;
}

double mean_scaled_entropy(std::span<const EntropyProfile> profiles) {
  if (profiles.empty()) throw DomainError("no profiles to average");
  double total = 0.0;
  for (const EntropyProfile& p : profiles) total += p.state_entropy_scaled;
  return total / static_cast<double>(profiles.size());
}

SpectrumEntropy spectrum_entropy(const SpectralDecomposition& d) {
  const auto profiles = eigenstate_profiles(d, false);
  SpectrumEntropy result;
  result.value = mean_scaled_entropy(profiles);
  result.state_count = d.size();
  result.seeds = {d.source().graph_seed};
  if (d.source().potential.kind == PotentialKind::Anderson) {
    result.seeds.push_back(d.source().potential.seed);
  }
  return result;
}

void write_profile_csv(std::ostream& out, std::span<const EntropyProfile> profiles) {
  const auto old_precision = out.precision(17);
  out << "state_index,eigenvalue,state_entropy_scaled\n";
  for (const EntropyProfile& p : profiles) {
    out << p.state_index << ',' << p.eigenvalue << ',' << p.state_entropy_scaled << '\n';
  }
  out.precision(old_precision);
}

void write_site_entropy_csv(std::ostream& out, std::span<const EntropyProfile> profiles) {
  const auto old_precision = out.precision(17);
  out << "state_index,site,site_entropy\n";
  for (const EntropyProfile& p : profiles) {
    for (std::size_t i = 0; i < p.site_entropies.size(); ++i) {
      out << p.state_index << ',' << i + 1 << ',' << p.site_entropies[i] << '\n';
    }
  }
  out.precision(old_precision);
}

}  // namespace qswn
