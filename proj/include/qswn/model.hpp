#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qswn/graph.hpp"

namespace qswn {

enum class PotentialKind { Periodic, Anderson, Harper };

std::string to_string(PotentialKind kind);
PotentialKind parse_potential_kind(const std::string& text);

// On-site potential choice.
//   Periodic: eps_n = 0
//   Anderson: eps_n iid uniform on [-W/2, W/2], drawn from `seed`
//   Harper:   eps_n = lambda * cos(2 pi n sigma_num / sigma_den), sites n = 1..N,
//             with (sigma_num, sigma_den) = (F_{k-1}, F_k) consecutive Fibonacci numbers
struct PotentialSpec {
  PotentialKind kind = PotentialKind::Periodic;
  double width = 0.0;
  double lambda = 0.0;
  std::uint64_t sigma_num = 0;
  std::uint64_t sigma_den = 0;
  std::uint64_t seed = 0;

  static PotentialSpec periodic();
  static PotentialSpec anderson(double width, std::uint64_t seed);
  // sigma = F_{k-1}/F_k where F_k == n; throws if n is not a Fibonacci number.
  static PotentialSpec harper_for_size(double lambda, int n);
  static PotentialSpec harper(double lambda, std::uint64_t sigma_num, std::uint64_t sigma_den);

  void validate() const;
  std::string describe() const;
};

// F_0 = 0, F_1 = 1, F_2 = 1, ...
std::uint64_t fibonacci(int index);
// Index k >= 2 with F_k == value, or -1.
int fibonacci_index(std::uint64_t value);
bool is_fibonacci(std::uint64_t value);

enum class SizePolicy {
  Strict,  // Harper requires n == sigma_den
  Warn     // proceed with a warning on stderr
};

std::vector<double> sample_potential(const PotentialSpec& spec, int n,
                                     SizePolicy policy = SizePolicy::Strict);

// Harper value at an arbitrary (possibly out-of-range) site index.
double harper_site_energy(const PotentialSpec& spec, std::int64_t site);

struct HamiltonianProvenance {
  std::uint64_t graph_seed = 0;
  PotentialSpec potential;
};

// Dense real symmetric tight-binding matrix: ring hopping t between
// neighbours (periodic boundary), shortcut hopping t1, on-site eps on the
// diagonal. Entries are written pairwise so symmetry is exact.
class Hamiltonian {
 public:
  Hamiltonian(Eigen::MatrixXd entries, double t, double t1, HamiltonianProvenance provenance);

  int n() const noexcept { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  double t() const noexcept { return t_; }
  double t1() const noexcept { return t1_; }
  const HamiltonianProvenance& provenance() const noexcept { return provenance_; }

  std::size_t off_diagonal_nonzeros() const;

  // `i j value` per nonzero, 1-based, row-major order.
  void write_triplets(std::ostream& out) const;

 private:
  Eigen::MatrixXd entries_;
  double t_;
  double t1_;
  HamiltonianProvenance provenance_;
};

Hamiltonian build_hamiltonian(const SmallWorldGraph& graph, std::span<const double> epsilon,
                              double t = 1.0, double t1 = 1.0, PotentialSpec potential = {});

}  // namespace qswn
