#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qswn/ensemble.hpp"

namespace qswn {

struct FitPoint {
  double x = 0.0;
  double y = 0.0;
  double weight = 1.0;
};

// Least-squares polynomial. Internally the fit is done in the centred and
// scaled variable u = (x - center) / half_width for conditioning; the
// monomial coefficients in x are reconstructed for reporting.
class FittedCurve {
 public:
  FittedCurve() : FittedCurve({0.0}, 0.0, 1.0, 0.0, 0.0, 0.0) {}
  FittedCurve(std::vector<double> scaled_coefficients, double center, double half_width,
              double domain_min, double domain_max, double residual_rms);

  int degree() const noexcept { return static_cast<int>(scaled_.size()) - 1; }
  // c_0 + c_1 x + ... + c_d x^d
  const std::vector<double>& coefficients() const noexcept { return monomial_; }
  double domain_min() const noexcept { return domain_min_; }
  double domain_max() const noexcept { return domain_max_; }
  double residual_rms() const noexcept { return residual_rms_; }

  double operator()(double x) const;
  double derivative(double x) const;

 private:
  std::vector<double> scaled_;
  std::vector<double> monomial_;
  double center_;
  double half_width_;
  double domain_min_;
  double domain_max_;
  double residual_rms_;
};

// Weighted least squares; needs >= degree + 2 points with strictly increasing
// x and positive weights. Throws ConditioningError on rank deficiency.
FittedCurve fit_polynomial(std::span<const FitPoint> points, int degree);

inline constexpr int kDefaultFitDegree = 6;

// One sweep point as seen by the analysis: stderr 0 means "no error bar".
struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
  double stderr = 0.0;
  bool complete = true;
};

enum class PeakMode {
  Maximum,          // largest signed derivative (rising curves)
  AbsoluteMaximum   // largest |derivative| (sharp drops)
};

struct TransitionEstimate {
  bool interior = false;  // false: peak on the domain boundary or curve flat
  bool flat = false;
  double location = 0.0;
  double derivative_peak = 0.0;
  double window_min = 0.0;
  double window_max = 0.0;
  int degree = 0;
  std::vector<int> window_degrees;        // degrees that contributed to the window
  std::vector<double> window_locations;   // their interior peak locations
  FittedCurve curve;
  std::size_t fine_grid_points = 0;
};

// Error bars are floored at this fraction of the median error bar.
inline constexpr double kStderrFloorFraction = 0.01;

struct TransitionOptions {
  bool weighted = true;           // weights 1/stderr^2 when error bars exist
  bool allow_incomplete = false;  // drop incomplete points instead of refusing
};

// Fits the curve, differentiates analytically and scans a fine grid of at
// least ten times the data resolution for the derivative peak. The window
// spans the interior peaks found with degree-1, degree and degree+1.
//
// A peak on the domain boundary is reported as "no interior transition" when
// the steepest data segment is also at the boundary. Otherwise the boundary
// value is edge ringing of the polynomial and the largest interior local
// maximum of the derivative is used.
TransitionEstimate locate_peak(std::span<const CurvePoint> points, int degree, PeakMode mode,
                               const TransitionOptions& options = {});

std::vector<CurvePoint> curve_points(const SweepResult& sweep);

TransitionEstimate locate_transition(const SweepResult& sweep, int degree = kDefaultFitDegree,
                                     const TransitionOptions& options = {});
TransitionEstimate locate_lambda_drop(const SweepResult& lambda_sweep, int degree = kDefaultFitDegree,
                                      const TransitionOptions& options = {});

// Inverse participation ratio sum |psi_n|^4 of a normalized state.
double participation_ratio(std::span<const double> psi);

// Spearman rank correlation with average ranks for ties.
double spearman_correlation(std::span<const double> a, std::span<const double> b);

// `<axis>,<derivative column>` over the fine grid of the estimate.
void write_derivative_csv(std::ostream& out, const TransitionEstimate& estimate,
                          const std::string& axis_name = "p",
                          const std::string& derivative_name = "dEv_dp");

void write_analysis_report(std::ostream& out, const TransitionEstimate& estimate,
                           std::span<const CurvePoint> points, const std::string& axis_name = "p");

}  // namespace qswn
