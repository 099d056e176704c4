#include "qswn/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

#include "qswn/error.hpp"
#include "qswn/graph.hpp"
#include "qswn/rng.hpp"
#include "qswn/spectra.hpp"

namespace qswn {

std::string to_string(SweepAxis axis) { return axis == SweepAxis::Density ? "density" : "lambda"; }

void SweepConfig::validate() const {
  if (n < 3) throw ConfigError("n", "system size must be >= 3");
  if (grid.empty()) throw ConfigError("grid", "grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw ConfigError("grid", "grid values must be finite");
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw ConfigError("grid", "grid must be strictly increasing (entry " + std::to_string(i) + ")");
    }
  }
  if (realizations < 1) throw ConfigError("realizations", "need at least one realization");
  if (!std::isfinite(t) || !std::isfinite(t1)) throw ConfigError("t", "hoppings must be finite");
  if (!observables.spectrum_entropy && !observables.gap_ratio && !observables.profiles) {
    throw ConfigError("observables", "no observable requested");
  }
  switch (scenario) {
    case PotentialKind::Periodic:
      break;
    case PotentialKind::Anderson:
      if (!(width > 0.0) || !std::isfinite(width)) {
        throw ConfigError("width", "Anderson scenario needs a finite width > 0");
      }
      break;
    case PotentialKind::Harper:
      if (!is_fibonacci(static_cast<std::uint64_t>(n)) || n < 3) {
        throw ConfigError("n", "Harper scenario needs a Fibonacci system size, got " + std::to_string(n));
      }
      if (axis == SweepAxis::Density && !(lambda >= 0.0)) {
        throw ConfigError("lambda", "Harper strength must be >= 0");
      }
      break;
  }
  const std::uint64_t capacity = shortcut_capacity(n, strict_endpoints);
  if (axis == SweepAxis::Lambda) {
    if (scenario != PotentialKind::Harper) {
      throw ConfigError("axis", "lambda sweeps need the harper scenario");
    }
    if (grid.front() < 0.0) throw ConfigError("grid", "lambda values must be >= 0");
    if (shortcuts > capacity) {
      throw ConfigError("shortcuts", std::to_string(shortcuts) + " exceeds the capacity " +
                                         std::to_string(capacity));
    }
  } else {
    if (grid.front() < 0.0) throw ConfigError("grid", "densities must be >= 0");
    for (double p : grid) {
      if (p * n > static_cast<double>(capacity) + 0.5) {
        throw ConfigError("grid", "density " + std::to_string(p) + " exceeds the shortcut capacity");
      }
    }
  }
}

std::size_t SweepConfig::shortcut_count_at(std::size_t grid_index) const {
  if (axis == SweepAxis::Lambda) return shortcuts;
  return shortcut_count_from_density(n, grid.at(grid_index));
}

PotentialSpec SweepConfig::potential_at(std::size_t grid_index, std::uint64_t potential_seed) const {
  switch (scenario) {
    case PotentialKind::Periodic:
      return PotentialSpec::periodic();
    case PotentialKind::Anderson:
      return PotentialSpec::anderson(width, potential_seed);
    case PotentialKind::Harper:
      return PotentialSpec::harper_for_size(axis == SweepAxis::Lambda ? grid.at(grid_index) : lambda, n);
  }
  throw ConfigError("scenario", "unknown scenario");
}

bool SweepConfig::deterministic_at(std::size_t grid_index) const {
  return scenario != PotentialKind::Anderson && shortcut_count_at(grid_index) == 0;
}

std::uint64_t realization_seed(std::uint64_t master_seed, std::size_t grid_index,
                               std::size_t realization_index) {
  return mix_seed(mix_seed(master_seed, grid_index), realization_index);
}

std::uint64_t graph_substream(std::uint64_t seed) { return mix_seed(seed, 0x67726170ULL); }
std::uint64_t potential_substream(std::uint64_t seed) { return mix_seed(seed, 0x706f7465ULL); }

RealizationResult run_realization(const SweepConfig& config, std::size_t grid_index,
                                  std::size_t realization_index) {
  if (grid_index >= config.grid.size() ||
      realization_index >= static_cast<std::size_t>(config.realizations)) {
    throw DomainError("realization index out of range");
  }
  RealizationResult result;
  result.grid_index = grid_index;
  result.realization_index = realization_index;
  result.seed = realization_seed(config.master_seed, grid_index, realization_index);
  result.shortcut_count = config.shortcut_count_at(grid_index);
  result.gap_ratio = std::numeric_limits<double>::quiet_NaN();

  try {
    const SmallWorldGraph graph = generate_small_world(
        config.n, result.shortcut_count, graph_substream(result.seed), config.strict_endpoints);
    const PotentialSpec potential = config.potential_at(grid_index, potential_substream(result.seed));
    const std::vector<double> eps = sample_potential(potential, config.n);
    const Hamiltonian h = build_hamiltonian(graph, eps, config.t, config.t1, potential);
    const SpectralDecomposition d = eigendecompose(h);

    if (config.observables.spectrum_entropy || config.observables.profiles) {
      auto profiles = eigenstate_profiles(d, false);
      result.spectrum_entropy = mean_scaled_entropy(profiles);
      if (config.observables.profiles) result.profiles = std::move(profiles);
    }
    if (config.observables.gap_ratio) result.gap_ratio = gap_ratio_statistic(d.eigenvalue_span());
  } catch (const Error& e) {
    throw NumericalError(std::string(e.what()) + " [grid_index " + std::to_string(grid_index) +
                         ", realization " + std::to_string(realization_index) + "]");
  }
  return result;
}

bool SweepResult::complete() const {
  return std::all_of(points.begin(), points.end(), [](const GridPointResult& p) { return p.complete; });
}

namespace {

bool all_equal(const std::vector<double>& values) {
  return std::adjacent_find(values.begin(), values.end(), std::not_equal_to<>()) == values.end();
}

// Replicated deterministic points keep their exact value and a zero error.
double mean_of(const std::vector<double>& values) {
  if (!values.empty() && all_equal(values)) return values.front();
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double standard_error(const std::vector<double>& values, double mean) {
  if (values.size() < 2 || all_equal(values)) return 0.0;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double variance = ss / static_cast<double>(values.size() - 1);
  return std::sqrt(variance / static_cast<double>(values.size()));
}

struct Task {
  std::size_t grid_index;
  std::size_t realization_index;
};

}  // namespace

SweepResult run_sweep(const SweepConfig& config, const SweepOptions& options) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t grid_size = config.grid.size();
  const auto reps = static_cast<std::size_t>(config.realizations);

  // Deterministic points are evaluated once and shared by every realization index.
  std::vector<Task> tasks;
  for (std::size_t g = 0; g < grid_size; ++g) {
    const std::size_t count = config.deterministic_at(g) ? 1 : reps;
    for (std::size_t r = 0; r < count; ++r) tasks.push_back({g, r});
  }

  const RealizationRunner runner = options.runner ? options.runner : RealizationRunner(run_realization);
  std::vector<std::optional<RealizationResult>> outcomes(tasks.size());
  std::vector<std::string> failures(tasks.size());
  std::atomic<std::size_t> next{0};
  std::size_t done = 0;
  std::mutex progress_mutex;

  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
      try {
        outcomes[i] = runner(config, tasks[i].grid_index, tasks[i].realization_index);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
      if (options.progress) {
        std::lock_guard lock(progress_mutex);
        options.progress(++done, tasks.size());
      }
    }
  };

  const int workers = std::max(1, std::min<int>(options.workers, static_cast<int>(tasks.size())));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  SweepResult result;
  result.config = config;
  result.points.resize(grid_size);
  for (std::size_t g = 0; g < grid_size; ++g) {
    GridPointResult& point = result.points[g];
    point.grid_value = config.grid[g];
    point.shortcut_count = config.shortcut_count_at(g);
    for (std::size_t r = 0; r < reps; ++r) point.seeds.push_back(realization_seed(config.master_seed, g, r));
  }
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    GridPointResult& point = result.points[tasks[i].grid_index];
    if (!outcomes[i]) {
      if (point.failure.empty()) point.failure = failures[i];
      continue;
    }
    const std::size_t copies = config.deterministic_at(tasks[i].grid_index) ? reps : 1;
    for (std::size_t c = 0; c < copies; ++c) {
      point.entropies.push_back(outcomes[i]->spectrum_entropy);
      point.gap_ratios.push_back(outcomes[i]->gap_ratio);
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (GridPointResult& point : result.points) {
    point.realizations = static_cast<int>(point.entropies.size());
    point.complete = point.failure.empty() && point.entropies.size() == reps;
    point.single_run = reps == 1;
    if (!point.complete) {
      point.mean_entropy = point.stderr_entropy = point.mean_gap_ratio = nan;
      continue;
    }
    point.mean_entropy = mean_of(point.entropies);
    point.stderr_entropy = standard_error(point.entropies, point.mean_entropy);
    point.mean_gap_ratio = config.observables.gap_ratio ? mean_of(point.gap_ratios) : nan;
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

SweepResult run_lambda_sweep(const SweepConfig& config, const SweepOptions& options) {
  if (config.axis != SweepAxis::Lambda || config.scenario != PotentialKind::Harper) {
    throw ConfigError("axis", "lambda sweep needs axis = lambda and the harper scenario");
  }
  return run_sweep(config, options);
}

}  // namespace qswn
