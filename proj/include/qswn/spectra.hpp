#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>

#include <Eigen/Dense>

#include "qswn/model.hpp"

namespace qswn {

// Ascending eigenvalues with orthonormal eigenvectors; column a is psi^a.
class SpectralDecomposition {
 public:
  SpectralDecomposition(Eigen::VectorXd eigenvalues, Eigen::MatrixXd eigenvectors,
                        HamiltonianProvenance source);

  int size() const noexcept { return static_cast<int>(eigenvalues_.size()); }
  const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
  const Eigen::MatrixXd& eigenvectors() const noexcept { return eigenvectors_; }
  const HamiltonianProvenance& source() const noexcept { return source_; }

  std::span<const double> eigenvalue_span() const {
    return {eigenvalues_.data(), static_cast<std::size_t>(eigenvalues_.size())};
  }
  // Column-major storage makes each eigenvector contiguous.
  std::span<const double> eigenvector(int index) const {
    return {eigenvectors_.col(index).data(), static_cast<std::size_t>(eigenvectors_.rows())};
  }

  // `index,eigenvalue` with a header row, 0-based index.
  void write_eigenvalue_csv(std::ostream& out) const;

 private:
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
  HamiltonianProvenance source_;
};

// Full dense decomposition (LAPACK dsyevd, lower triangle).
SpectralDecomposition eigendecompose(const Hamiltonian& h);

// Tolerances a decomposition must meet.
inline constexpr double kNormTolerance = 1e-10;
inline constexpr double kOrthogonalityTolerance = 1e-8;
inline constexpr double kResidualTolerance = 1e-8;

struct DecompositionCheck {
  bool sorted = false;
  double max_norm_error = 0.0;
  double max_overlap = 0.0;
  // max over states of |H psi - E psi| / (1 + |E|)
  double max_scaled_residual = 0.0;

  bool ok() const {
    return sorted && max_norm_error <= kNormTolerance && max_overlap <= kOrthogonalityTolerance &&
           max_scaled_residual <= kResidualTolerance;
  }
};

DecompositionCheck check_decomposition(const Hamiltonian& h, const SpectralDecomposition& d);

// Mean adjacent-gap ratio <r> = mean_n min(s_n, s_{n+1}) / max(s_n, s_{n+1}).
// Degenerate neighbours (both gaps zero) contribute r = 0.
double gap_ratio_statistic(std::span<const double> ascending_eigenvalues);

// 2 ln 2 - 1, the value for uncorrelated (Poisson) levels.
double poisson_gap_ratio();
// Large-N orthogonal-ensemble value used as the delocalized reference.
inline constexpr double kGoeGapRatio = 0.5307;

// Monte Carlo references: <r> from iid exponential spacings, and from the
// spectra of dense GOE matrices (off-diagonal N(0,1), diagonal N(0,2)).
double sample_poisson_gap_ratio(std::size_t spacings, std::uint64_t seed);
double sample_goe_gap_ratio(int n, int matrices, std::uint64_t seed);

}  // namespace qswn
