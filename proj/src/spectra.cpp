#include "qswn/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <ostream>
#include <vector>

#include <lapacke.h>

#include "qswn/error.hpp"
#include "qswn/rng.hpp"

#ifdef QSWN_HAVE_OPENBLAS
extern "C" void openblas_set_num_threads(int);
#endif

namespace qswn {

namespace {

void pin_blas_threads() {
#ifdef QSWN_HAVE_OPENBLAS
  static std::once_flag once;
  std::call_once(once, [] { openblas_set_num_threads(1); });
#endif
}

Eigen::VectorXd decompose_in_place(Eigen::MatrixXd& work, const std::string& what) {
  pin_blas_threads();
  const auto n = static_cast<lapack_int>(work.rows());
  Eigen::VectorXd w(n);
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, work.data(), n, w.data());
  if (info != 0) {
    throw NumericalError("dsyevd failed (info = " + std::to_string(info) + ") for " + what);
  }
  return w;
}

}  // namespace

SpectralDecomposition::SpectralDecomposition(Eigen::VectorXd eigenvalues, Eigen::MatrixXd eigenvectors,
                                             HamiltonianProvenance source)
    : eigenvalues_(std::move(eigenvalues)),
      eigenvectors_(std::move(eigenvectors)),
      source_(std::move(source)) {
  if (eigenvectors_.rows() != eigenvalues_.size() || eigenvectors_.cols() != eigenvalues_.size()) {
    throw DimensionError("eigenvector matrix does not match the eigenvalue count");
  }
}

void SpectralDecomposition::write_eigenvalue_csv(std::ostream& out) const {
  const auto old_precision = out.precision(17);
  out << "index,eigenvalue\n";
  for (Eigen::Index i = 0; i < eigenvalues_.size(); ++i) out << i << ',' << eigenvalues_[i] << '\n';
  out.precision(old_precision);
}

SpectralDecomposition eigendecompose(const Hamiltonian& h) {
  if (h.n() == 0) throw DimensionError("cannot decompose an empty Hamiltonian");
  Eigen::MatrixXd work = h.entries();
  const std::string what = "graph seed " + std::to_string(h.provenance().graph_seed) + ", " +
                           h.provenance().potential.describe();
  Eigen::VectorXd w = decompose_in_place(work, what);
  if (!w.allFinite() || !work.allFinite()) throw NumericalError("non-finite eigenpairs for " + what);
  return SpectralDecomposition(std::move(w), std::move(work), h.provenance());
}

DecompositionCheck check_decomposition(const Hamiltonian& h, const SpectralDecomposition& d) {
  DecompositionCheck check;
  const auto& w = d.eigenvalues();
  const auto& v = d.eigenvectors();
  check.sorted = std::is_sorted(w.data(), w.data() + w.size());
  const Eigen::MatrixXd gram = v.transpose() * v;
  for (Eigen::Index a = 0; a < gram.rows(); ++a) {
    check.max_norm_error = std::max(check.max_norm_error, std::abs(std::sqrt(gram(a, a)) - 1.0));
    for (Eigen::Index b = 0; b < gram.cols(); ++b) {
      if (a != b) check.max_overlap = std::max(check.max_overlap, std::abs(gram(a, b)));
    }
  }
  const Eigen::MatrixXd residual = h.entries() * v - v * w.asDiagonal();
  for (Eigen::Index a = 0; a < residual.cols(); ++a) {
    check.max_scaled_residual =
        std::max(check.max_scaled_residual, residual.col(a).norm() / (1.0 + std::abs(w[a])));
  }
  return check;
}

double gap_ratio_statistic(std::span<const double> levels) {
  if (levels.size() < 3) throw DomainError("gap ratio needs at least 3 levels");
  double sum = 0.0;
  for (std::size_t i = 0; i + 2 < levels.size(); ++i) {
    const double s0 = levels[i + 1] - levels[i];
    const double s1 = levels[i + 2] - levels[i + 1];
    if (s0 < 0.0 || s1 < 0.0) throw DomainError("gap ratio needs ascending levels");
    const double hi = std::max(s0, s1);
    sum += hi > 0.0 ? std::min(s0, s1) / hi : 0.0;
  }
  return sum / static_cast<double>(levels.size() - 2);
}

double poisson_gap_ratio() { return 2.0 * std::numbers::ln2 - 1.0; }

double sample_poisson_gap_ratio(std::size_t spacings, std::uint64_t seed) {
  if (spacings < 2) throw DomainError("need at least two spacings");
  Rng rng(seed);
  std::vector<double> levels(spacings + 1, 0.0);
  for (std::size_t i = 1; i < levels.size(); ++i) levels[i] = levels[i - 1] + rng.exponential();
  return gap_ratio_statistic(levels);
}

double sample_goe_gap_ratio(int n, int matrices, std::uint64_t seed) {
  if (n < 3 || matrices < 1) throw DomainError("GOE sampling needs n >= 3 and at least one matrix");
  double total = 0.0;
  for (int m = 0; m < matrices; ++m) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(m)));
    Eigen::MatrixXd a(n, n);
    for (int j = 0; j < n; ++j) {
      a(j, j) = std::numbers::sqrt2 * rng.normal();
      for (int i = j + 1; i < n; ++i) a(i, j) = a(j, i) = rng.normal();
    }
    const Eigen::VectorXd w = decompose_in_place(a, "GOE sample " + std::to_string(m));
    total += gap_ratio_statistic({w.data(), static_cast<std::size_t>(w.size())});
  }
  return total / matrices;
}

}  // namespace qswn
