#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "qswn/analysis.hpp"
#include "qswn/ensemble.hpp"

namespace qswn {

// One row of a sweep CSV.
struct SweepRow {
  double grid_value = 0.0;
  double mean_entropy = 0.0;    // nan for incomplete points
  double stderr_entropy = 0.0;
  double mean_gap_ratio = 0.0;  // nan when not requested
  int realizations = 0;
};

inline constexpr const char* kSweepCsvHeader =
    "grid_value,mean_entropy,stderr_entropy,mean_gap_ratio,realizations";

// Comma separated, `.` decimal, header row, LF endings, 17 significant digits.
void write_sweep_csv(std::ostream& out, const SweepResult& result);
std::vector<SweepRow> read_sweep_csv(std::istream& in);

// A row is complete when its mean is finite.
std::vector<CurvePoint> curve_points(const std::vector<SweepRow>& rows);

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

// Everything needed to rerun a sweep bit-for-bit: the config snapshot, seeds
// per grid point, RNG identifier and software version.
nlohmann::json sweep_manifest(const SweepResult& result, const std::vector<StageTiming>& timings,
                              const std::map<std::string, std::string>& outputs);

// Rebuilds the sweep configuration recorded in a manifest.
SweepConfig config_from_manifest(const nlohmann::json& manifest);

}  // namespace qswn
