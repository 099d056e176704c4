#include "qswn/model.hpp"

#include <cmath>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "qswn/error.hpp"
#include "qswn/rng.hpp"

namespace qswn {

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::Periodic: return "periodic";
    case PotentialKind::Anderson: return "anderson";
    case PotentialKind::Harper: return "harper";
  }
  return "unknown";
}

PotentialKind parse_potential_kind(const std::string& text) {
  if (text == "periodic") return PotentialKind::Periodic;
  if (text == "anderson") return PotentialKind::Anderson;
  if (text == "harper") return PotentialKind::Harper;
  throw ConfigError("kind", "unknown potential '" + text + "' (periodic|anderson|harper)");
}

std::uint64_t fibonacci(int index) {
  if (index < 0 || index > 93) throw DomainError("Fibonacci index out of range");
  std::uint64_t a = 0, b = 1;
  for (int i = 0; i < index; ++i) {
    const std::uint64_t next = a + b;
    a = b;
    b = next;
  }
  return a;
}

int fibonacci_index(std::uint64_t value) {
  std::uint64_t a = 1, b = 2;  // F_2, F_3
  if (value == 1) return 2;
  for (int k = 3; k <= 93; ++k) {
    if (b == value) return k;
    if (b > value) return -1;
    const std::uint64_t next = a + b;
    a = b;
    b = next;
  }
  return -1;
}

bool is_fibonacci(std::uint64_t value) { return fibonacci_index(value) >= 0; }

PotentialSpec PotentialSpec::periodic() { return {}; }

PotentialSpec PotentialSpec::anderson(double width, std::uint64_t seed) {
  PotentialSpec spec;
  spec.kind = PotentialKind::Anderson;
  spec.width = width;
  spec.seed = seed;
  spec.validate();
  return spec;
}

PotentialSpec PotentialSpec::harper_for_size(double lambda, int n) {
  const int k = n > 0 ? fibonacci_index(static_cast<std::uint64_t>(n)) : -1;
  if (k < 3) {
    throw ConfigError("n", "Harper approximant needs n = F_k (k >= 3), got " + std::to_string(n));
  }
  return harper(lambda, fibonacci(k - 1), fibonacci(k));
}

PotentialSpec PotentialSpec::harper(double lambda, std::uint64_t sigma_num, std::uint64_t sigma_den) {
  PotentialSpec spec;
  spec.kind = PotentialKind::Harper;
  spec.lambda = lambda;
  spec.sigma_num = sigma_num;
  spec.sigma_den = sigma_den;
  spec.validate();
  return spec;
}

void PotentialSpec::validate() const {
  switch (kind) {
    case PotentialKind::Periodic:
      return;
    case PotentialKind::Anderson:
      if (!(width > 0.0) || !std::isfinite(width)) {
        throw ConfigError("width", "Anderson disorder width must be finite and > 0");
      }
      return;
    case PotentialKind::Harper: {
      if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw ConfigError("lambda", "Harper strength must be finite and >= 0");
      }
      const int k = fibonacci_index(sigma_den);
      if (k < 3 || fibonacci(k - 1) != sigma_num) {
        throw ConfigError("sigma", "sigma must be F_{k-1}/F_k, got " + std::to_string(sigma_num) +
                                       "/" + std::to_string(sigma_den));
      }
      if (sigma_den >= (1ULL << 31)) {
        throw ConfigError("sigma", "sigma denominator must be below 2^31");
      }
      if (std::gcd(sigma_num, sigma_den) != 1) {
        throw ConfigError("sigma", "sigma numerator and denominator must be coprime");
      }
      return;
    }
  }
}

std::string PotentialSpec::describe() const {
  std::ostringstream out;
  out << std::setprecision(17) << to_string(kind);
  if (kind == PotentialKind::Anderson) out << "(W=" << width << ", seed=" << seed << ")";
  if (kind == PotentialKind::Harper) {
    out << "(lambda=" << lambda << ", sigma=" << sigma_num << "/" << sigma_den << ")";
  }
  return out.str();
}

double harper_site_energy(const PotentialSpec& spec, std::int64_t site) {
  // Reduce sigma*n modulo 1 in exact integer arithmetic so the approximant is
  // exactly periodic with period sigma_den.
  const auto den = static_cast<std::int64_t>(spec.sigma_den);
  const auto num = static_cast<std::int64_t>(spec.sigma_num);
  std::int64_t reduced = site % den;
  if (reduced < 0) reduced += den;
  const std::int64_t r = (num * reduced) % den;
  const double phase = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(den);
  return spec.lambda * std::cos(phase);
}

std::vector<double> sample_potential(const PotentialSpec& spec, int n, SizePolicy policy) {
  if (n < 1) throw DomainError("potential needs at least one site");
  spec.validate();
  std::vector<double> eps(static_cast<std::size_t>(n), 0.0);
  switch (spec.kind) {
    case PotentialKind::Periodic:
      break;
    case PotentialKind::Anderson: {
      Rng rng(spec.seed);
      for (double& e : eps) e = spec.width * (rng.uniform() - 0.5);
      break;
    }
    case PotentialKind::Harper:
      if (static_cast<std::uint64_t>(n) != spec.sigma_den) {
        const std::string message = "Harper approximant sigma = " + std::to_string(spec.sigma_num) +
                                    "/" + std::to_string(spec.sigma_den) +
                                    " is not commensurate with n = " + std::to_string(n);
        if (policy == SizePolicy::Strict) throw ConfigError("n", message);
        std::cerr << "warning: " << message << '\n';
      }
      for (int site = 1; site <= n; ++site) eps[site - 1] = harper_site_energy(spec, site);
      break;
  }
  return eps;
}

Hamiltonian::Hamiltonian(Eigen::MatrixXd entries, double t, double t1, HamiltonianProvenance provenance)
    : entries_(std::move(entries)), t_(t), t1_(t1), provenance_(std::move(provenance)) {
  if (entries_.rows() != entries_.cols()) throw DimensionError("Hamiltonian must be square");
}

std::size_t Hamiltonian::off_diagonal_nonzeros() const {
  std::size_t count = 0;
  for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
    for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
      if (i != j && entries_(i, j) != 0.0) ++count;
    }
  }
  return count;
}

void Hamiltonian::write_triplets(std::ostream& out) const {
  const auto old_precision = out.precision(17);
  for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
    for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
      if (entries_(i, j) != 0.0) out << i + 1 << ' ' << j + 1 << ' ' << entries_(i, j) << '\n';
    }
  }
  out.precision(old_precision);
}

Hamiltonian build_hamiltonian(const SmallWorldGraph& graph, std::span<const double> epsilon, double t,
                              double t1, PotentialSpec potential) {
  const int n = graph.n();
  if (epsilon.size() != static_cast<std::size_t>(n)) {
    throw DimensionError("potential has " + std::to_string(epsilon.size()) +
                         " entries for a graph of " + std::to_string(n) + " vertices");
  }
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    h(i, i) = epsilon[i];
    const int j = (i + 1) % n;
    h(i, j) = t;
    h(j, i) = t;
  }
  for (const Shortcut& s : graph.shortcuts()) {
    h(s.first - 1, s.second - 1) = t1;
    h(s.second - 1, s.first - 1) = t1;
  }
  return Hamiltonian(std::move(h), t, t1, {graph.seed(), potential});
}

}  // namespace qswn
