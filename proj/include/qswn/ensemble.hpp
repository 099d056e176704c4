#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qswn/entropy.hpp"
#include "qswn/model.hpp"

namespace qswn {

// What the grid ranges over: shortcut density p (shortcut count round(p*N))
// or Harper strength lambda at a fixed shortcut count.
enum class SweepAxis { Density, Lambda };

std::string to_string(SweepAxis axis);

struct Observables {
  bool spectrum_entropy = true;
  bool gap_ratio = false;
  bool profiles = false;
};

struct SweepConfig {
  PotentialKind scenario = PotentialKind::Periodic;
  double width = 0.0;   // Anderson W
  double lambda = 0.0;  // Harper strength on density sweeps
  int n = 0;
  SweepAxis axis = SweepAxis::Density;
  std::vector<double> grid;
  std::size_t shortcuts = 0;  // fixed shortcut count on lambda sweeps
  int realizations = 1;
  std::uint64_t master_seed = 0;
  double t = 1.0;
  double t1 = 1.0;
  Observables observables;
  bool strict_endpoints = false;

  // Throws ConfigError naming the offending field.
  void validate() const;

  std::size_t shortcut_count_at(std::size_t grid_index) const;
  PotentialSpec potential_at(std::size_t grid_index, std::uint64_t potential_seed) const;
  // True when a grid point has no randomness (no shortcuts, no disorder).
  bool deterministic_at(std::size_t grid_index) const;
};

// Seed of realization r at grid point g: a stable hash of the tuple.
std::uint64_t realization_seed(std::uint64_t master_seed, std::size_t grid_index,
                               std::size_t realization_index);
// Independent substreams for shortcut placement and on-site disorder.
std::uint64_t graph_substream(std::uint64_t realization_seed);
std::uint64_t potential_substream(std::uint64_t realization_seed);

struct RealizationResult {
  std::size_t grid_index = 0;
  std::size_t realization_index = 0;
  std::uint64_t seed = 0;
  std::size_t shortcut_count = 0;
  double spectrum_entropy = 0.0;
  double gap_ratio = 0.0;  // NaN unless requested
  std::vector<EntropyProfile> profiles;
};

RealizationResult run_realization(const SweepConfig& config, std::size_t grid_index,
                                  std::size_t realization_index);

struct GridPointResult {
  double grid_value = 0.0;
  std::size_t shortcut_count = 0;
  double mean_entropy = 0.0;
  double stderr_entropy = 0.0;  // sample std / sqrt(R); 0 for a single run
  double mean_gap_ratio = 0.0;  // NaN unless requested
  int realizations = 0;         // completed runs
  bool complete = false;
  bool single_run = false;
  std::vector<std::uint64_t> seeds;
  std::vector<double> entropies;
  std::vector<double> gap_ratios;
  std::string failure;  // first failure message when incomplete
};

struct SweepResult {
  SweepConfig config;
  std::vector<GridPointResult> points;
  double wall_seconds = 0.0;

  bool complete() const;
};

using RealizationRunner =
    std::function<RealizationResult(const SweepConfig&, std::size_t, std::size_t)>;

struct SweepOptions {
  int workers = 1;
  // Replaces run_realization; used to inject failures in tests.
  RealizationRunner runner;
  // Called after each finished task with (done, total); serialized.
  std::function<void(std::size_t, std::size_t)> progress;
};

// Aggregates run_realization over every (grid point, realization). The result
// does not depend on the worker count. A grid point with any failed
// realization is marked incomplete and carries no mean.
SweepResult run_sweep(const SweepConfig& config, const SweepOptions& options = {});

// run_sweep restricted to Harper lambda grids at a fixed shortcut count.
SweepResult run_lambda_sweep(const SweepConfig& config, const SweepOptions& options = {});

}  // namespace qswn
