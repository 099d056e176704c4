#include "qswn/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "qswn/analysis.hpp"
#include "qswn/config.hpp"
#include "qswn/error.hpp"
#include "qswn/graph.hpp"
#include "qswn/svg.hpp"
#include "qswn/sweep_io.hpp"
#include "qswn/version.hpp"

namespace qswn::cli {

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::string> overrides;
  bool quiet = false;
};

struct AnalyzeOptions {
  std::string input;
  std::string out_dir;
  int degree = kDefaultFitDegree;
  std::string axis = "p";
  bool allow_incomplete = false;
  bool unweighted = false;
};

struct ProfileOptions {
  CommonOptions common;
  double lambda = 0.0;
  std::size_t shortcuts = 0;
  bool sites = false;
};

struct GraphOptions {
  int n = 0;
  std::size_t shortcuts = 0;
  std::uint64_t seed = 0;
  bool strict = false;
  std::string out;
  std::string matrix;
};

class Timer {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "Scenario config file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out_dir, "Output directory")->required();
  cmd->add_option("--seed", o.seed, "Master seed (overrides QSWN_SEED and the config)");
  cmd->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--set", o.overrides, "Override a config key: section.key=value");
  cmd->add_flag("--quiet", o.quiet, "No progress output");
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

SweepConfig load_config(const CommonOptions& o) {
  ConfigFile file = ConfigFile::load(o.config_path);
  if (const char* env = std::getenv("QSWN_SEED"); env && *env) file.set("sweep.seed", env, "QSWN_SEED");
  if (o.seed) file.set("sweep.seed", std::to_string(*o.seed), "--seed");
  for (const std::string& assignment : o.overrides) file.apply_override(assignment);
  return sweep_config_from(file);
}

std::function<void(std::size_t, std::size_t)> progress_printer(bool quiet) {
  if (quiet) return {};
  return [last = std::size_t{0}](std::size_t done, std::size_t total) mutable {
    const std::size_t pct = 100 * done / total;
    if (pct / 10 != last / 10 || done == total) {
      std::cerr << "  " << done << "/" << total << " realizations\n";
      last = pct;
    }
  };
}

// Plots come from the CSV on disk so they never show data the CSV lacks.
void plot_sweep_csv(const fs::path& csv, const fs::path& svg, const SweepConfig& config) {
  std::ifstream in(csv);
  const auto rows = read_sweep_csv(in);
  PlotSeries series;
  series.label = to_string(config.scenario) + ", N = " + std::to_string(config.n);
  for (const SweepRow& r : rows) {
    series.x.push_back(r.grid_value);
    series.y.push_back(r.mean_entropy);
    series.error.push_back(r.stderr_entropy);
  }
  PlotSpec spec;
  spec.title = "Spectrum-averaged scaled entropy";
  spec.x_label = config.axis == SweepAxis::Density ? "shortcut density p" : "lambda";
  spec.y_label = "<E_v>";
  spec.series.push_back(std::move(series));
  auto out = open_output(svg);
  write_svg_plot(out, spec);
}

void report_failures(const SweepResult& result) {
  for (std::size_t g = 0; g < result.points.size(); ++g) {
    const GridPointResult& p = result.points[g];
    if (!p.complete) {
      std::cerr << "error: grid point " << g << " (value " << p.grid_value << ") incomplete: " << p.failure
                << '\n';
    }
  }
}

int do_sweep(const CommonOptions& o, bool lambda_only) {
  Timer timer;
  const SweepConfig config = load_config(o);
  if (lambda_only && config.axis != SweepAxis::Lambda) {
    throw ConfigError("sweep.axis", "lambda-sweep needs axis = lambda");
  }
  const double setup = timer.lap();
  fs::create_directories(o.out_dir);
  SweepOptions options;
  options.workers = o.workers;
  options.progress = progress_printer(o.quiet);
  const SweepResult result = lambda_only ? run_lambda_sweep(config, options) : run_sweep(config, options);
  const double compute = timer.lap();

  const fs::path dir(o.out_dir);
  {
    auto out = open_output(dir / "sweep.csv");
    write_sweep_csv(out, result);
  }
  plot_sweep_csv(dir / "sweep.csv", dir / "sweep.svg", config);
  const double write = timer.lap();
  const auto manifest = sweep_manifest(
      result, {{"setup", setup}, {"compute", compute}, {"write", write}},
      {{"csv", "sweep.csv"}, {"plot", "sweep.svg"}});
  {
    auto out = open_output(dir / "manifest.json");
    out << manifest.dump(2) << '\n';
  }
  if (!result.complete()) {
    report_failures(result);
    return kIncomplete;
  }
  if (!o.quiet) std::cerr << "wrote " << (dir / "sweep.csv").string() << '\n';
  return kOk;
}

int do_analyze(const AnalyzeOptions& o) {
  std::ifstream in(o.input);
  if (!in) throw Error("cannot open " + o.input);
  const auto rows = read_sweep_csv(in);
  const auto points = curve_points(rows);
  const bool lambda_axis = o.axis == "lambda";
  const PeakMode mode = lambda_axis ? PeakMode::AbsoluteMaximum : PeakMode::Maximum;
  TransitionOptions options;
  options.allow_incomplete = o.allow_incomplete;
  options.weighted = !o.unweighted;
  for (const CurvePoint& p : points) {
    if (!p.complete && !o.allow_incomplete) {
      std::cerr << "error: incomplete grid point at " << p.x << "; pass --allow-incomplete to drop it\n";
      return kIncomplete;
    }
  }
  const TransitionEstimate estimate = locate_peak(points, o.degree, mode, options);

  const std::string axis = lambda_axis ? "lambda" : "p";
  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  {
    auto out = open_output(dir / "analysis.txt");
    write_analysis_report(out, estimate, points, axis);
  }
  {
    auto out = open_output(dir / "derivative.csv");
    write_derivative_csv(out, estimate, axis, lambda_axis ? "dEv_dlambda" : "dEv_dp");
  }
  std::cout << std::setprecision(6);
  if (!estimate.interior) {
    std::cout << "no interior transition (degree " << o.degree << ")\n";
    return kNoTransition;
  }
  std::cout << axis << "* = " << estimate.location << "  window [" << estimate.window_min << ", "
            << estimate.window_max << "]  degree " << o.degree << '\n';
  return kOk;
}

int do_profile(const ProfileOptions& o) {
  Timer timer;
  SweepConfig config = load_config(o.common);
  if (config.scenario != PotentialKind::Harper) {
    throw ConfigError("scenario.kind", "profile runs need the harper scenario");
  }
  config.axis = SweepAxis::Lambda;
  config.grid = {o.lambda};
  config.shortcuts = o.shortcuts;
  config.observables = {true, false, true};
  config.validate();
  const double setup = timer.lap();

  const auto reps = static_cast<std::size_t>(config.realizations);
  std::vector<RealizationResult> runs(reps);
  SweepOptions options;
  options.workers = o.common.workers;
  options.progress = progress_printer(o.common.quiet);
  // Each task owns runs[r], so concurrent writes never alias.
  options.runner = [&runs](const SweepConfig& c, std::size_t g, std::size_t r) {
    runs[r] = run_realization(c, g, r);
    return runs[r];
  };
  const SweepResult result = run_sweep(config, options);
  const double compute = timer.lap();
  if (!result.complete()) {
    report_failures(result);
    return kIncomplete;
  }

  const fs::path dir(o.common.out_dir);
  fs::create_directories(dir);
  const std::size_t files = config.deterministic_at(0) ? 1 : reps;
  std::map<std::string, std::string> outputs;
  PlotSpec plot;
  plot.title = "Scaled state entropy, lambda = " + std::to_string(o.lambda) + ", L = " + std::to_string(o.shortcuts);
  plot.x_label = "eigenvalue";
  plot.y_label = "E_v^alpha (scaled)";
  for (std::size_t r = 0; r < files; ++r) {
    const std::string name = "profile_r" + std::to_string(r) + ".csv";
    {
      auto out = open_output(dir / name);
      write_profile_csv(out, runs[r].profiles);
    }
    const std::string eig = "eigenvalues_r" + std::to_string(r) + ".csv";
    {
      auto out = open_output(dir / eig);
      out << std::setprecision(17) << "index,eigenvalue\n";
      for (const EntropyProfile& p : runs[r].profiles) out << p.state_index << ',' << p.eigenvalue << '\n';
    }
    outputs["profile_" + std::to_string(r)] = name;
    outputs["eigenvalues_" + std::to_string(r)] = eig;
    std::cout << "realization " << r << ": <E_v> = " << std::setprecision(6)
              << runs[r].spectrum_entropy << '\n';

    std::ifstream back(dir / name);
    std::string line;
    std::getline(back, line);
    PlotSeries series;
    series.label = "realization " + std::to_string(r);
    series.connect = false;
    while (std::getline(back, line)) {
      std::istringstream ls(line);
      std::string idx, e, s;
      std::getline(ls, idx, ',');
      std::getline(ls, e, ',');
      std::getline(ls, s, ',');
      series.x.push_back(std::stod(e));
      series.y.push_back(std::stod(s));
    }
    plot.series.push_back(std::move(series));
  }
  if (o.sites) {
    for (std::size_t r = 0; r < files; ++r) {
      // Rebuild the same realization with per-site entropies retained.
      const std::uint64_t seed = realization_seed(config.master_seed, 0, r);
      const SmallWorldGraph graph =
          generate_small_world(config.n, config.shortcuts, graph_substream(seed), config.strict_endpoints);
      const PotentialSpec potential = config.potential_at(0, potential_substream(seed));
      const auto eps = sample_potential(potential, config.n);
      const auto d = eigendecompose(build_hamiltonian(graph, eps, config.t, config.t1, potential));
      const std::string name = "sites_r" + std::to_string(r) + ".csv";
      auto out = open_output(dir / name);
      write_site_entropy_csv(out, eigenstate_profiles(d, true));
      outputs["sites_" + std::to_string(r)] = name;
    }
  }
  {
    auto out = open_output(dir / "profile.svg");
    write_svg_plot(out, plot);
  }
  outputs["plot"] = "profile.svg";
  const double write = timer.lap();
  const auto manifest =
      sweep_manifest(result, {{"setup", setup}, {"compute", compute}, {"write", write}}, outputs);
  auto out = open_output(dir / "manifest.json");
  out << manifest.dump(2) << '\n';
  return kOk;
}

int do_graph(const GraphOptions& o) {
  std::uint64_t seed = o.seed;
  if (const char* env = std::getenv("QSWN_SEED"); env && *env && seed == 0) seed = std::stoull(env);
  const SmallWorldGraph graph = generate_small_world(o.n, o.shortcuts, seed, o.strict);
  if (o.out.empty() || o.out == "-") {
    graph.write_edge_list(std::cout);
  } else {
    auto out = open_output(o.out);
    graph.write_edge_list(out);
  }
  if (!o.matrix.empty()) {
    const std::vector<double> eps(static_cast<std::size_t>(o.n), 0.0);
    auto out = open_output(o.matrix);
    build_hamiltonian(graph, eps).write_triplets(out);
  }
  return kOk;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Electron localization on quantum small-world networks"};
  app.set_version_flag("--version", std::string("qswn ") + kVersion);
  app.require_subcommand(1);

  CommonOptions sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "Ensemble sweep over shortcut density (or lambda)");
  add_common(sweep, sweep_opts);

  CommonOptions lambda_opts;
  auto* lambda_sweep = app.add_subcommand("lambda-sweep", "Harper sweep over lambda at a fixed shortcut count");
  add_common(lambda_sweep, lambda_opts);

  AnalyzeOptions analyze_opts;
  auto* analyze = app.add_subcommand("analyze", "Fit a sweep CSV and locate the transition");
  analyze->add_option("input", analyze_opts.input, "Sweep CSV")->required()->check(CLI::ExistingFile);
  analyze->add_option("--out", analyze_opts.out_dir, "Output directory")->required();
  analyze->add_option("--degree", analyze_opts.degree, "Polynomial degree")->check(CLI::Range(1, 20));
  analyze->add_option("--axis", analyze_opts.axis, "Grid axis: p or lambda")
      ->check(CLI::IsMember({"p", "lambda"}));
  analyze->add_flag("--allow-incomplete", analyze_opts.allow_incomplete, "Drop incomplete grid points");
  analyze->add_flag("--unweighted", analyze_opts.unweighted, "Ignore error bars in the fit");

  ProfileOptions profile_opts;
  auto* profile = app.add_subcommand("profile", "Per-eigenstate entropies at fixed lambda and L");
  add_common(profile, profile_opts.common);
  profile->add_option("--lambda", profile_opts.lambda, "Harper strength")->required();
  profile->add_option("--shortcuts,-L", profile_opts.shortcuts, "Shortcut count L")->required();
  profile->add_flag("--sites", profile_opts.sites, "Also export per-site entropies");

  GraphOptions graph_opts;
  auto* graph = app.add_subcommand("graph", "Generate a small-world graph and dump its edge list");
  graph->add_option("--n", graph_opts.n, "Vertex count")->required();
  graph->add_option("--shortcuts,-L", graph_opts.shortcuts, "Shortcut count")->required();
  graph->add_option("--seed", graph_opts.seed, "RNG seed");
  graph->add_flag("--strict", graph_opts.strict, "Vertex-disjoint shortcuts");
  graph->add_option("--out", graph_opts.out, "Edge-list file (default stdout)");
  graph->add_option("--matrix", graph_opts.matrix, "Also write the eps = 0 Hamiltonian as triplets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*sweep) return do_sweep(sweep_opts, false);
    if (*lambda_sweep) return do_sweep(lambda_opts, true);
    if (*analyze) return do_analyze(analyze_opts);
    if (*profile) return do_profile(profile_opts);
    if (*graph) return do_graph(graph_opts);
  } catch (const ConfigError& e) {
    std::cerr << "error: invalid config: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIncomplete;
  }
  return kUsage;
}

}  // namespace qswn::cli
