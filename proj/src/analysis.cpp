#include "qswn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>

#include <Eigen/QR>

#include "qswn/error.hpp"

namespace qswn {

namespace {

double horner(const std::vector<double>& c, double u) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + *it;
  return acc;
}

std::vector<double> to_monomial(const std::vector<double>& scaled, double center, double half_width) {
  // sum_k b_k ((x - c)/h)^k expanded with binomial coefficients.
  const std::size_t m = scaled.size();
  std::vector<double> out(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const double bk = scaled[k] / std::pow(half_width, static_cast<double>(k));
    double binom = 1.0;
    for (std::size_t j = 0; j <= k; ++j) {
      // coefficient of x^j in (x - c)^k is C(k, j) (-c)^(k-j)
      out[j] += bk * binom * std::pow(-center, static_cast<double>(k - j));
      binom = binom * static_cast<double>(k - j) / static_cast<double>(j + 1);
    }
  }
  return out;
}

std::size_t fine_grid_size(std::size_t data_points) {
  return std::max<std::size_t>(1001, 10 * (data_points - 1) + 1);
}

struct Scan {
  bool interior = false;
  bool flat = false;
  double location = 0.0;
  double peak = 0.0;
};

double score_of(PeakMode mode, double d) { return mode == PeakMode::Maximum ? d : std::abs(d); }

// True when the steepest segment of the raw data touches the domain boundary,
// i.e. a boundary maximum of the fitted derivative is backed by the data
// rather than by polynomial ringing at the edges.
bool data_peak_on_boundary(std::span<const FitPoint> data, PeakMode mode) {
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < data.size(); ++i) {
    const double slope = (data[i + 1].y - data[i].y) / (data[i + 1].x - data[i].x);
    if (score_of(mode, slope) > best_score) {
      best_score = score_of(mode, slope);
      best = i;
    }
  }
  return best == 0 || best + 2 == data.size();
}

Scan scan_derivative(const FittedCurve& curve, std::span<const FitPoint> data, PeakMode mode,
                     std::size_t samples, double y_scale) {
  const double lo = curve.domain_min();
  const double hi = curve.domain_max();
  auto x_at = [&](std::size_t i) {
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
  };
  std::vector<double> score(samples);
  double max_abs = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double d = curve.derivative(x_at(i));
    max_abs = std::max(max_abs, std::abs(d));
    score[i] = score_of(mode, d);
  }
  Scan scan;
  scan.flat = max_abs * (hi - lo) <= 1e-8 * (1.0 + y_scale);
  std::size_t best = static_cast<std::size_t>(std::max_element(score.begin(), score.end()) - score.begin());
  bool interior = best != 0 && best != samples - 1;
  if (!interior && !data_peak_on_boundary(data, mode)) {
    // Boundary maximum caused by edge ringing: take the largest interior local maximum.
    double best_local = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < samples; ++i) {
      if (score[i] >= score[i - 1] && score[i] >= score[i + 1] && score[i] > best_local) {
        best_local = score[i];
        best = i;
        interior = true;
      }
    }
  }
  scan.location = x_at(best);
  scan.peak = curve.derivative(scan.location);
  scan.interior = !scan.flat && interior && (mode == PeakMode::AbsoluteMaximum || scan.peak > 0.0);
  return scan;
}

std::vector<FitPoint> fit_points(std::span<const CurvePoint> points, bool weighted) {
  std::vector<double> positive;
  for (const CurvePoint& p : points) {
    if (p.stderr > 0.0 && std::isfinite(p.stderr)) positive.push_back(p.stderr);
  }
  const bool use_errors = weighted && !positive.empty();
  // Error bars far below the typical one (round-off on a replicated value)
  // would dominate the weights and wreck the conditioning.
  double floor = 0.0;
  double tightest = 0.0;
  if (use_errors) {
    std::nth_element(positive.begin(), positive.begin() + positive.size() / 2, positive.end());
    floor = kStderrFloorFraction * positive[positive.size() / 2];
    tightest = std::max(floor, *std::min_element(positive.begin(), positive.end()));
  }
  std::vector<FitPoint> out;
  out.reserve(points.size());
  for (const CurvePoint& p : points) {
    // Points without an error bar (e.g. a deterministic p = 0 run) get the
    // tightest error bar present in the sweep.
    const double sigma = use_errors ? (p.stderr > 0.0 ? std::max(p.stderr, floor) : tightest) : 1.0;
    out.push_back({p.x, p.y, 1.0 / (sigma * sigma)});
  }
  return out;
}

}  // namespace

FittedCurve::FittedCurve(std::vector<double> scaled_coefficients, double center, double half_width,
                         double domain_min, double domain_max, double residual_rms)
    : scaled_(std::move(scaled_coefficients)),
      monomial_(to_monomial(scaled_, center, half_width)),
      center_(center),
      half_width_(half_width),
      domain_min_(domain_min),
      domain_max_(domain_max),
      residual_rms_(residual_rms) {}

double FittedCurve::operator()(double x) const { return horner(scaled_, (x - center_) / half_width_); }

double FittedCurve::derivative(double x) const {
  const double u = (x - center_) / half_width_;
  double acc = 0.0;
  for (std::size_t k = scaled_.size(); k-- > 1;) acc = acc * u + static_cast<double>(k) * scaled_[k];
  return acc / half_width_;
}

FittedCurve fit_polynomial(std::span<const FitPoint> points, int degree) {
  if (degree < 0) throw DomainError("polynomial degree must be >= 0");
  const auto m = static_cast<std::size_t>(degree) + 1;
  if (points.size() < m + 1) {
    throw DomainError("degree " + std::to_string(degree) + " fit needs at least " +
                      std::to_string(m + 1) + " points, got " + std::to_string(points.size()));
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i].x) || !std::isfinite(points[i].y)) {
      throw DomainError("fit points must be finite");
    }
    if (!(points[i].weight > 0.0) || !std::isfinite(points[i].weight)) {
      throw DomainError("fit weights must be finite and positive");
    }
    if (i > 0 && !(points[i].x > points[i - 1].x)) throw DomainError("fit x values must be strictly increasing");
  }
  const double lo = points.front().x;
  const double hi = points.back().x;
  const double center = 0.5 * (lo + hi);
  const double half_width = 0.5 * (hi - lo);
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].x - points[i - 1].x <= 1e-12 * (hi - lo)) {
      throw ConditioningError("near-duplicate x values at index " + std::to_string(i));
    }
  }

  const auto rows = static_cast<Eigen::Index>(points.size());
  const auto cols = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double sw = std::sqrt(points[i].weight);
    const double u = (points[i].x - center) / half_width;
    double power = 1.0;
    for (Eigen::Index k = 0; k < cols; ++k) {
      a(i, k) = sw * power;
      power *= u;
    }
    b[i] = sw * points[i].y;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-12);
  if (qr.rank() < cols) {
    throw ConditioningError("polynomial fit is rank deficient (rank " + std::to_string(qr.rank()) +
                            " < " + std::to_string(cols) + ")");
  }
  const Eigen::VectorXd solution = qr.solve(b);
  std::vector<double> scaled(solution.data(), solution.data() + solution.size());

  double ss = 0.0;
  for (const FitPoint& p : points) {
    const double r = p.y - horner(scaled, (p.x - center) / half_width);
    ss += r * r;
  }
  return FittedCurve(std::move(scaled), center, half_width, lo, hi,
                     std::sqrt(ss / static_cast<double>(points.size())));
}

TransitionEstimate locate_peak(std::span<const CurvePoint> input, int degree, PeakMode mode,
                               const TransitionOptions& options) {
  std::vector<CurvePoint> points;
  for (const CurvePoint& p : input) {
    if (p.complete && std::isfinite(p.y)) {
      points.push_back(p);
    } else if (!options.allow_incomplete) {
      throw DomainError("curve has an incomplete point at x = " + std::to_string(p.x) +
                        "; refusing to fit");
    }
  }
  const auto fits = fit_points(points, options.weighted);
  double y_scale = 0.0;
  for (const CurvePoint& p : points) y_scale = std::max(y_scale, std::abs(p.y));
  const std::size_t samples = fine_grid_size(points.size());

  FittedCurve main_curve = fit_polynomial(fits, degree);
  const Scan main_scan = scan_derivative(main_curve, fits, mode, samples, y_scale);

  TransitionEstimate estimate;
  estimate.curve = main_curve;
  estimate.degree = degree;
  estimate.interior = main_scan.interior;
  estimate.flat = main_scan.flat;
  estimate.location = main_scan.location;
  estimate.derivative_peak = main_scan.peak;
  estimate.fine_grid_points = samples;
  estimate.window_min = estimate.window_max = std::numeric_limits<double>::quiet_NaN();
  if (!estimate.interior) return estimate;

  estimate.window_min = estimate.window_max = main_scan.location;
  for (int d : {degree - 1, degree, degree + 1}) {
    if (d < 1 || points.size() < static_cast<std::size_t>(d) + 2) continue;
    const Scan scan =
        d == degree ? main_scan : scan_derivative(fit_polynomial(fits, d), fits, mode, samples, y_scale);
    if (!scan.interior) continue;
    estimate.window_degrees.push_back(d);
    estimate.window_locations.push_back(scan.location);
    estimate.window_min = std::min(estimate.window_min, scan.location);
    estimate.window_max = std::max(estimate.window_max, scan.location);
  }
  return estimate;
}

std::vector<CurvePoint> curve_points(const SweepResult& sweep) {
  std::vector<CurvePoint> out;
  out.reserve(sweep.points.size());
  for (const GridPointResult& p : sweep.points) {
    out.push_back({p.grid_value, p.mean_entropy, p.stderr_entropy, p.complete});
  }
  return out;
}

TransitionEstimate locate_transition(const SweepResult& sweep, int degree, const TransitionOptions& options) {
  return locate_peak(curve_points(sweep), degree, PeakMode::Maximum, options);
}

TransitionEstimate locate_lambda_drop(const SweepResult& sweep, int degree, const TransitionOptions& options) {
  if (sweep.config.axis != SweepAxis::Lambda) throw DomainError("expected a lambda sweep");
  return locate_peak(curve_points(sweep), degree, PeakMode::AbsoluteMaximum, options);
}

double participation_ratio(std::span<const double> psi) {
  if (psi.empty()) throw DomainError("empty state");
  double norm = 0.0, quartic = 0.0;
  for (double a : psi) {
    const double z = a * a;
    norm += z;
    quartic += z * z;
  }
  if (!(std::abs(std::sqrt(norm) - 1.0) <= 1e-8)) throw DomainError("state is not normalized");
  return quartic;
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j);
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw DimensionError("spearman needs equal-length samples");
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

void write_derivative_csv(std::ostream& out, const TransitionEstimate& estimate,
                          const std::string& axis_name, const std::string& derivative_name) {
  const auto old_precision = out.precision(17);
  out << axis_name << ',' << derivative_name << '\n';
  const double lo = estimate.curve.domain_min();
  const double hi = estimate.curve.domain_max();
  const std::size_t samples = estimate.fine_grid_points;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
    out << x << ',' << estimate.curve.derivative(x) << '\n';
  }
  out.precision(old_precision);
}

void write_analysis_report(std::ostream& out, const TransitionEstimate& estimate,
                           std::span<const CurvePoint> points, const std::string& axis_name) {
  const auto old_precision = out.precision(10);
  out << "[fit]\n";
  out << "degree = " << estimate.degree << '\n';
  out << "points = " << points.size() << '\n';
  out << "domain = " << estimate.curve.domain_min() << ", " << estimate.curve.domain_max() << '\n';
  out << "residual_rms = " << estimate.curve.residual_rms() << '\n';
  out << "coefficients =";
  for (std::size_t i = 0; i < estimate.curve.coefficients().size(); ++i) {
    out << (i ? ", " : " ") << estimate.curve.coefficients()[i];
  }
  out << "\n\n[transition]\n";
  if (!estimate.interior) {
    out << "status = no interior transition\n";
    out << "reason = " << (estimate.flat ? "flat curve" : "derivative peak on the domain boundary") << '\n';
    out << "peak_" << axis_name << " = " << estimate.location << '\n';
  } else {
    out << "status = interior transition\n";
    out << axis_name << "_star = " << estimate.location << '\n';
    out << "derivative_peak = " << estimate.derivative_peak << '\n';
    out << "window = " << estimate.window_min << ", " << estimate.window_max << '\n';
    out << "window_degrees =";
    for (std::size_t i = 0; i < estimate.window_degrees.size(); ++i) {
      out << (i ? ", " : " ") << estimate.window_degrees[i] << ':' << estimate.window_locations[i];
    }
    out << '\n';
  }
  out << "fine_grid_points = " << estimate.fine_grid_points << '\n';
  out.precision(old_precision);
}

}  // namespace qswn
