#include <cmath>
#include <numeric>
#include <sstream>
#include <algorithm>

#include "doctest.h"
#include "qswn/analysis.hpp"
#include "qswn/entropy.hpp"
#include "qswn/graph.hpp"
#include "qswn/model.hpp"
#include "qswn/spectra.hpp"
#include "qswn/error.hpp"
#include "qswn/rng.hpp"

using namespace qswn;

namespace {

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> g;
  for (int i = 0; lo + i * step <= hi + 1e-12; ++i) g.push_back(lo + i * step);
  return g;
}

std::vector<CurvePoint> sample_curve(const std::vector<double>& xs, auto&& f, double stderr = 0.0) {
  std::vector<CurvePoint> pts;
  for (double x : xs) pts.push_back({x, f(x), stderr, true});
  return pts;
}

double logistic(double x, double mid, double width) { return 1.0 / (1.0 + std::exp(-(x - mid) / width)); }

}  // namespace

TEST_CASE("exact polynomial recovery") {
  std::vector<FitPoint> pts;
  for (double x : grid(-1.0, 2.0, 0.25)) pts.push_back({x, 2 * x * x - 1, 1.0});
  const auto curve = fit_polynomial(pts, 2);
  REQUIRE(curve.coefficients().size() == 3);
  CHECK(std::abs(curve.coefficients()[0] + 1.0) <= 1e-10);
  CHECK(std::abs(curve.coefficients()[1]) <= 1e-10);
  CHECK(std::abs(curve.coefficients()[2] - 2.0) <= 1e-10);
  CHECK(curve.residual_rms() <= 1e-12);
  CHECK(curve(0.3) == doctest::Approx(2 * 0.09 - 1));
  CHECK(curve.derivative(0.3) == doctest::Approx(1.2));
}

TEST_CASE("weighted fit favours precise points") {
  // A line through two precise points with one noisy outlier.
  std::vector<FitPoint> pts = {{0.0, 0.0, 1e6}, {0.5, 3.0, 1e-6}, {1.0, 1.0, 1e6}};
  const auto curve = fit_polynomial(pts, 1);
  CHECK(curve(0.0) == doctest::Approx(0.0).epsilon(1e-5));
  CHECK(curve(1.0) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("constant data has zero derivative and no transition") {
  const auto pts = sample_curve(grid(0.0, 1.0, 0.05), [](double) { return 0.7; });
  std::vector<FitPoint> fp;
  for (const auto& p : pts) fp.push_back({p.x, p.y, 1.0});
  for (int degree : {1, 3, 6}) {
    const auto curve = fit_polynomial(fp, degree);
    for (double x : grid(0.0, 1.0, 0.01)) CHECK(std::abs(curve.derivative(x)) <= 1e-9);
  }
  const auto est = locate_peak(pts, 6, PeakMode::Maximum);
  CHECK_FALSE(est.interior);
  CHECK(est.flat);
  CHECK_FALSE(locate_peak(pts, 6, PeakMode::AbsoluteMaximum).interior);
}

TEST_CASE("fit preconditions") {
  std::vector<FitPoint> few = {{0, 0, 1}, {1, 1, 1}, {2, 2, 1}};
  CHECK_THROWS_AS(fit_polynomial(few, 2), DomainError);
  std::vector<FitPoint> unsorted = {{0, 0, 1}, {2, 1, 1}, {1, 2, 1}, {3, 2, 1}};
  CHECK_THROWS_AS(fit_polynomial(unsorted, 1), DomainError);
  std::vector<FitPoint> near_dup = {{0, 0, 1}, {1e-15, 1, 1}, {1, 2, 1}, {2, 2, 1}};
  CHECK_THROWS_AS(fit_polynomial(near_dup, 1), ConditioningError);
  std::vector<FitPoint> bad_weight = {{0, 0, 0}, {1, 1, 1}, {2, 2, 1}};
  CHECK_THROWS_AS(fit_polynomial(bad_weight, 1), DomainError);
}

TEST_CASE("analytic derivative matches central differences") {
  Rng rng(3);
  std::vector<FitPoint> pts;
  for (double x : grid(0.0, 1.0, 0.05)) pts.push_back({x, std::sin(3 * x) + 0.01 * rng.normal(), 1.0});
  const auto curve = fit_polynomial(pts, 6);
  const double h = 1e-5;
  for (double x : grid(0.0, 1.0, 0.01)) {
    const double fd = (curve(x + h) - curve(x - h)) / (2 * h);
    CHECK(std::abs(fd - curve.derivative(x)) <= 1e-6);
  }
}

TEST_CASE("symmetric sigmoid inflection is recovered to one fine-grid step") {
  const auto pts = sample_curve(grid(0.0, 1.0, 0.05), [](double x) { return std::tanh((x - 0.5) / 0.2); });
  const auto est = locate_peak(pts, 6, PeakMode::Maximum);
  REQUIRE(est.interior);
  const double fine_step = 1.0 / static_cast<double>(est.fine_grid_points - 1);
  CHECK(est.fine_grid_points >= 10 * 20 + 1);
  CHECK(std::abs(est.location - 0.5) <= fine_step);
}

TEST_CASE("off-centre polynomial sigmoid inflection is recovered to one fine-grid step") {
  // y' = x^2 (1 - x)^3 peaks at x = 2/5; y is exactly degree 6.
  const auto pts = sample_curve(grid(0.0, 1.0, 0.05), [](double x) {
    return std::pow(x, 3) / 3 - 3 * std::pow(x, 4) / 4 + 3 * std::pow(x, 5) / 5 - std::pow(x, 6) / 6;
  });
  const auto est = locate_peak(pts, 6, PeakMode::Maximum);
  REQUIRE(est.interior);
  const double fine_step = 1.0 / static_cast<double>(est.fine_grid_points - 1);
  CHECK(std::abs(est.location - 0.4) <= fine_step);
}

TEST_CASE("noisy logistic: derivative peak within one grid step of the midpoint") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    const double sigma = 0.005;
    auto pts = sample_curve(grid(0.0, 1.0, 0.05), [](double x) { return logistic(x, 0.35, 0.1); }, sigma);
    for (auto& p : pts) p.y += sigma * rng.normal();
    const auto est = locate_peak(pts, 6, PeakMode::Maximum);
    REQUIRE(est.interior);
    CHECK(std::abs(est.location - 0.35) <= 0.05);
    CHECK(est.window_min <= est.location);
    CHECK(est.window_max >= est.location);
  }
}

TEST_CASE("transition location ignores a constant offset") {
  auto pts = sample_curve(grid(0.0, 1.0, 0.05), [](double x) { return logistic(x, 0.3, 0.12); }, 0.01);
  const auto a = locate_peak(pts, 6, PeakMode::Maximum);
  for (auto& p : pts) p.y += 5.0;
  const auto b = locate_peak(pts, 6, PeakMode::Maximum);
  CHECK(a.interior);
  CHECK(std::abs(a.location - b.location) <= 1e-9);
  CHECK(a.window_min == doctest::Approx(b.window_min));
}

TEST_CASE("steep rise at the left edge is a boundary peak, not a transition") {
  // Saturating curve like the clean ring: steepest between the first two points.
  const auto pts = sample_curve(grid(0.0, 1.0, 0.05), [](double x) { return 1.0 - 0.3 * std::exp(-x / 0.03); });
  const auto est = locate_peak(pts, 6, PeakMode::Maximum);
  CHECK_FALSE(est.interior);
  CHECK_FALSE(est.flat);
  CHECK(std::isnan(est.window_min));
}

TEST_CASE("sharp interior drop is located despite edge ringing") {
  // Step-like curve whose degree-6 fit rings at both ends.
  const auto pts = sample_curve(grid(0.5, 3.5, 0.1), [](double x) { return 1.0 - 0.7 * logistic(x, 2.05, 0.06); });
  const auto est = locate_peak(pts, 6, PeakMode::AbsoluteMaximum);
  REQUIRE(est.interior);
  CHECK(est.derivative_peak < 0.0);
  CHECK(std::abs(est.location - 2.05) <= 0.15);
}

TEST_CASE("incomplete points are refused unless dropped") {
  auto pts = sample_curve(grid(0.0, 1.0, 0.05), [](double x) { return logistic(x, 0.5, 0.1); }, 0.01);
  pts[4].complete = false;
  pts[4].y = std::nan("");
  CHECK_THROWS_AS(locate_peak(pts, 6, PeakMode::Maximum), DomainError);
  TransitionOptions options;
  options.allow_incomplete = true;
  CHECK(locate_peak(pts, 6, PeakMode::Maximum, options).interior);
}

TEST_CASE("degree sensitivity widens the window") {
  auto pts = sample_curve(grid(0.0, 1.0, 0.05), [](double x) { return logistic(x, 0.3, 0.1); }, 0.01);
  const auto est = locate_peak(pts, 6, PeakMode::Maximum);
  REQUIRE(est.interior);
  CHECK(est.window_degrees.size() >= 2);
  for (double loc : est.window_locations) {
    CHECK(loc >= est.window_min);
    CHECK(loc <= est.window_max);
  }
}

TEST_CASE("participation ratio") {
  const std::vector<double> uniform(100, 0.1);
  CHECK(participation_ratio(uniform) == doctest::Approx(0.01));
  std::vector<double> delta(30, 0.0);
  delta[7] = 1.0;
  CHECK(participation_ratio(delta) == 1.0);
  CHECK_THROWS_AS(participation_ratio(std::vector<double>{0.5, 0.5}), DomainError);
}

TEST_CASE("spearman correlation") {
  const std::vector<double> a = {1, 2, 3, 4, 5};
  const std::vector<double> b = {10, 20, 30, 40, 50};
  const std::vector<double> c = {5, 4, 3, 2, 1};
  CHECK(spearman_correlation(a, b) == doctest::Approx(1.0));
  CHECK(spearman_correlation(a, c) == doctest::Approx(-1.0));
  const std::vector<double> ties = {1, 1, 2, 2, 3};
  CHECK(spearman_correlation(ties, a) > 0.9);
}

TEST_CASE("Harper IPR grows on localization and anticorrelates with entropy") {
  auto spectrum_ipr = [](double lambda, std::vector<double>* iprs, std::vector<double>* entropies) {
    const auto spec = PotentialSpec::harper_for_size(lambda, 987);
    const auto d = eigendecompose(build_hamiltonian(SmallWorldGraph(987, {}), sample_potential(spec, 987), 1.0, 1.0, spec));
    double total = 0.0;
    const auto profiles = eigenstate_profiles(d);
    for (int a = 0; a < d.size(); ++a) {
      const double ipr = participation_ratio(d.eigenvector(a));
      total += ipr;
      if (iprs) iprs->push_back(ipr);
      if (entropies) entropies->push_back(profiles[a].state_entropy_scaled);
    }
    return total / d.size();
  };
  std::vector<double> iprs, entropies;
  const double localized = spectrum_ipr(3.0, &iprs, &entropies);
  const double extended = spectrum_ipr(1.0, nullptr, nullptr);
  CHECK(localized >= 10.0 * extended);
  CHECK(spearman_correlation(iprs, entropies) < 0.0);
}

TEST_CASE("report and derivative csv") {
  const auto pts = sample_curve(grid(0.0, 1.0, 0.05), [](double x) { return logistic(x, 0.3, 0.1); }, 0.01);
  const auto est = locate_peak(pts, 6, PeakMode::Maximum);
  std::ostringstream report, csv;
  write_analysis_report(report, est, pts);
  write_derivative_csv(csv, est);
  CHECK(report.str().find("status = interior transition") != std::string::npos);
  CHECK(report.str().find("p_star = ") != std::string::npos);
  CHECK(csv.str().rfind("p,dEv_dp\n", 0) == 0);
  const std::string text = csv.str();
  const auto lines = std::count(text.begin(), text.end(), '\n');
  CHECK(lines == static_cast<long>(est.fine_grid_points) + 1);
}

TEST_CASE("round-off sized error bars do not wreck the fit") {
  auto pts = sample_curve(grid(0.0, 1.0, 0.05), [](double x) { return logistic(x, 0.4, 0.1); }, 0.001);
  pts[0].stderr = 0.0;
  const auto exact = locate_peak(pts, 6, PeakMode::Maximum);
  pts[0].stderr = 1e-17;
  const auto tiny = locate_peak(pts, 6, PeakMode::Maximum);
  REQUIRE(tiny.interior);
  CHECK(tiny.location == doctest::Approx(exact.location));
}
