#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "qswn/error.hpp"
#include "qswn/rng.hpp"
#include "qswn/spectra.hpp"

using namespace qswn;

namespace {

Hamiltonian random_hamiltonian(int n, std::size_t shortcuts, double width, std::uint64_t seed) {
  const auto g = generate_small_world(n, shortcuts, seed);
  const auto spec = PotentialSpec::anderson(width, seed + 1);
  return build_hamiltonian(g, sample_potential(spec, n), 1.0, 1.0, spec);
}

}  // namespace

TEST_CASE("3-ring spectrum") {
  const auto h = build_hamiltonian(SmallWorldGraph(3, {}), std::vector<double>(3, 0.0));
  const auto d = eigendecompose(h);
  CHECK(d.eigenvalues()[0] == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(d.eigenvalues()[1] == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(d.eigenvalues()[2] == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(check_decomposition(h, d).ok());
}

TEST_CASE("ring spectrum matches 2t cos(2 pi k / N)") {
  const int n = 24;
  const auto d = eigendecompose(build_hamiltonian(SmallWorldGraph(n, {}), std::vector<double>(n, 0.0)));
  std::vector<double> expected;
  for (int k = 0; k < n; ++k) expected.push_back(2.0 * std::cos(2.0 * M_PI * k / n));
  std::sort(expected.begin(), expected.end());
  for (int k = 0; k < n; ++k) CHECK(d.eigenvalues()[k] == doctest::Approx(expected[k]).epsilon(1e-12));
}

TEST_CASE("decoupled sites give the sorted potential and a permuted identity") {
  const std::vector<double> eps = {0.3, -1.2, 2.5, 0.0, -0.7};
  const auto h = build_hamiltonian(SmallWorldGraph(5, {}), eps, 0.0, 0.0);
  const auto d = eigendecompose(h);
  std::vector<double> sorted = eps;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 5; ++i) {
    CHECK(d.eigenvalues()[i] == sorted[i]);
    const auto col = d.eigenvectors().col(i).cwiseAbs();
    CHECK(col.maxCoeff() == doctest::Approx(1.0));
    CHECK(col.sum() == doctest::Approx(1.0));
  }
}

TEST_CASE("decomposition invariants on random Hamiltonians") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto h = random_hamiltonian(60 + 20 * static_cast<int>(seed), 30 * seed, 4.0, seed);
    const auto d = eigendecompose(h);
    const auto check = check_decomposition(h, d);
    CHECK(check.sorted);
    CHECK(check.max_norm_error <= kNormTolerance);
    CHECK(check.max_overlap <= kOrthogonalityTolerance);
    CHECK(check.max_scaled_residual <= kResidualTolerance);
    // Trace identity.
    CHECK(std::abs(d.eigenvalues().sum() - h.entries().trace()) <= 1e-8 * h.n());
    // Independent solver as oracle for the eigenvalues.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> oracle(h.entries());
    CHECK((oracle.eigenvalues() - d.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("Harper approximant spectrum lies inside the Gershgorin bound") {
  const double lambda = 3.0;
  const auto spec = PotentialSpec::harper_for_size(lambda, 987);
  const auto h = build_hamiltonian(SmallWorldGraph(987, {}), sample_potential(spec, 987), 1.0, 1.0, spec);
  const auto d = eigendecompose(h);
  CHECK(check_decomposition(h, d).ok());
  CHECK(d.eigenvalues().minCoeff() >= -lambda - 2.0);
  CHECK(d.eigenvalues().maxCoeff() <= lambda + 2.0);
}

TEST_CASE("spectrum is invariant under vertex relabelling") {
  const auto h = random_hamiltonian(80, 40, 3.0, 17);
  std::vector<int> perm(80);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(5);
  for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(80, 80);
  for (int i = 0; i < 80; ++i) p(i, perm[i]) = 1.0;
  const Hamiltonian relabelled(p * h.entries() * p.transpose(), 1.0, 1.0, h.provenance());
  const auto a = eigendecompose(h);
  const auto b = eigendecompose(relabelled);
  CHECK((a.eigenvalues() - b.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("constant potential shift moves every level by the same amount") {
  const int n = 70;
  const auto g = generate_small_world(n, 25, 3);
  auto eps = sample_potential(PotentialSpec::anderson(2.0, 4), n);
  const auto a = eigendecompose(build_hamiltonian(g, eps));
  const double c = 1.75;
  for (double& e : eps) e += c;
  const auto b = eigendecompose(build_hamiltonian(g, eps));
  CHECK(((b.eigenvalues().array() - c) - a.eigenvalues().array()).abs().maxCoeff() <= 1e-9);
  CHECK(gap_ratio_statistic(a.eigenvalue_span()) ==
        doctest::Approx(gap_ratio_statistic(b.eigenvalue_span())).epsilon(1e-6));
}

TEST_CASE("gap ratio basics") {
  std::vector<double> equal(50);
  std::iota(equal.begin(), equal.end(), 0.0);
  CHECK(gap_ratio_statistic(equal) == doctest::Approx(1.0));
  CHECK(gap_ratio_statistic(std::vector<double>{0.0, 1.0, 3.0}) == doctest::Approx(0.5));
  CHECK(gap_ratio_statistic(std::vector<double>{1.0, 1.0, 1.0}) == 0.0);
  CHECK_THROWS_AS(gap_ratio_statistic(std::vector<double>{1.0, 2.0}), DomainError);
  CHECK_THROWS_AS(gap_ratio_statistic(std::vector<double>{2.0, 1.0, 3.0}), DomainError);

  // Affine invariance.
  Rng rng(8);
  std::vector<double> levels(200);
  for (double& x : levels) x = rng.normal();
  std::sort(levels.begin(), levels.end());
  std::vector<double> affine(levels);
  for (double& x : affine) x = 3.5 * x - 12.0;
  CHECK(gap_ratio_statistic(levels) == doctest::Approx(gap_ratio_statistic(affine)).epsilon(1e-9));
}

TEST_CASE("Poisson reference from exponential spacings") {
  CHECK(poisson_gap_ratio() == doctest::Approx(0.3862943611198906));
  CHECK(std::abs(sample_poisson_gap_ratio(100000, 21) - poisson_gap_ratio()) <= 0.005);
}

TEST_CASE("GOE reference from sampled random matrices") {
  const double r = sample_goe_gap_ratio(200, 200, 1234);
  CHECK(std::abs(r - 0.53) <= 0.01);
  CHECK(std::abs(r - kGoeGapRatio) <= 0.01);
}

TEST_CASE("eigenvalue csv export") {
  const auto d = eigendecompose(build_hamiltonian(SmallWorldGraph(3, {}), std::vector<double>(3, 0.0)));
  std::ostringstream out;
  d.write_eigenvalue_csv(out);
  CHECK(out.str().rfind("index,eigenvalue\n0,", 0) == 0);
}
