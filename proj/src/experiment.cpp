#include "rds/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "rds/csv.hpp"
#include "rds/entropy.hpp"
#include "rds/lyapunov.hpp"
#include "rds/parallel.hpp"
#include "rds/skew_product.hpp"
#include "rds/version.hpp"

namespace rds {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::vector<std::string> analysis_names() {
  return {"stationary", "zero_noise", "lyapunov", "entropy", "entropy_gap", "cocycle_check"};
}

namespace {

[[noreturn]] void config_error(const std::string& msg) { fail(ErrorCode::Parse, msg); }

void check_keys(const ordered_json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      config_error("unknown key '" + it.key() + "' in " + where);
}

double require_number(const ordered_json& obj, const std::string& key,
                      const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number())
    config_error("missing numeric '" + key + "' in " + where);
  return obj[key].get<double>();
}

const std::set<std::string> kSdeAnalyses = {"stationary", "zero_noise", "cocycle_check"};

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) config_error("config must be a JSON object");
  check_keys(j,
             {"seed", "output_dir", "system", "kernel", "epsilon_schedule", "candidate",
              "analyses", "resolution"},
             "config");

  ExperimentConfig cfg;

  if (!j.contains("seed") || !j["seed"].is_number_unsigned())
    config_error("config requires an unsigned integer 'seed' (no silent nondeterminism)");
  cfg.seed = j["seed"].get<uint64_t>();

  if (!j.contains("output_dir") || !j["output_dir"].is_string())
    config_error("config requires 'output_dir'");
  cfg.output_dir = j["output_dir"].get<std::string>();

  if (!j.contains("system") || !j["system"].is_object())
    config_error("config requires a 'system' object");
  const auto& sys = j["system"];
  check_keys(sys, {"type", "name", "params", "dt", "horizon"}, "system");
  cfg.system.type = sys.value("type", "map");
  if (cfg.system.type != "map" && cfg.system.type != "sde")
    config_error("system.type must be 'map' or 'sde'");
  if (!sys.contains("name") || !sys["name"].is_string())
    config_error("system requires a 'name'");
  cfg.system.name = sys["name"].get<std::string>();
  if (sys.contains("params")) {
    if (!sys["params"].is_object()) config_error("system.params must be an object");
    for (auto it = sys["params"].begin(); it != sys["params"].end(); ++it) {
      if (!it.value().is_number()) config_error("system.params values must be numbers");
      cfg.system.params[it.key()] = it.value().get<double>();
    }
  }
  if (cfg.system.type == "map") {
    auto names = builtin_map_names();
    if (std::find(names.begin(), names.end(), cfg.system.name) == names.end())
      config_error("unknown map '" + cfg.system.name + "'; see list-systems");
    make_map(cfg.system.name, cfg.system.params);  // parameter validation
  } else {
    auto names = builtin_sde_names();
    if (std::find(names.begin(), names.end(), cfg.system.name) == names.end())
      config_error("unknown SDE system '" + cfg.system.name + "'; see list-systems");
    cfg.system.dt = sys.value("dt", 1e-3);
    cfg.system.horizon = sys.value("horizon", 20.0);
    if (!(cfg.system.dt > 0.0) || !(cfg.system.horizon > 0.0))
      config_error("sde requires dt > 0 and horizon > 0");
  }

  if (j.contains("kernel")) {
    const auto& ker = j["kernel"];
    check_keys(ker, {"variant", "epsilon"}, "kernel");
    KernelSpec spec;
    if (!ker.contains("variant") || !ker["variant"].is_string())
      config_error("kernel requires a 'variant'");
    spec.variant = ker["variant"].get<std::string>();
    auto variants = kernel_variant_names();
    if (std::find(variants.begin(), variants.end(), spec.variant) == variants.end())
      config_error("unknown kernel variant '" + spec.variant + "'; see list-kernels");
    if (spec.variant != "delta") {
      spec.epsilon = require_number(ker, "epsilon", "kernel");
      if (!(spec.epsilon > 0.0)) config_error("kernel.epsilon must be positive");
      if (spec.variant == "degenerate_trap" && spec.epsilon >= 0.125)
        config_error("degenerate_trap requires epsilon < 1/8");
    }
    cfg.kernel = spec;
  }

  if (j.contains("epsilon_schedule")) {
    if (!j["epsilon_schedule"].is_array())
      config_error("epsilon_schedule must be an array of numbers");
    for (const auto& v : j["epsilon_schedule"]) {
      if (!v.is_number() || !(v.get<double>() > 0.0))
        config_error("epsilon_schedule entries must be positive numbers");
      cfg.epsilon_schedule.push_back(v.get<double>());
    }
    for (size_t k = 0; k + 1 < cfg.epsilon_schedule.size(); ++k)
      if (!(cfg.epsilon_schedule[k] > cfg.epsilon_schedule[k + 1]))
        config_error("epsilon_schedule must be strictly decreasing");
  }

  if (j.contains("candidate")) {
    const auto& cand = j["candidate"];
    check_keys(cand, {"type", "at"}, "candidate");
    cfg.candidate.type = cand.value("type", "dirac");
    if (cfg.candidate.type != "dirac" && cfg.candidate.type != "lebesgue")
      config_error("candidate.type must be 'dirac' or 'lebesgue'");
    cfg.candidate.at = cand.value("at", 0.0);
  }

  if (!j.contains("analyses") || !j["analyses"].is_array() || j["analyses"].empty())
    config_error("config requires a non-empty 'analyses' array");
  auto known = analysis_names();
  for (const auto& a : j["analyses"]) {
    if (!a.is_string()) config_error("analyses entries must be strings");
    std::string name = a.get<std::string>();
    if (std::find(known.begin(), known.end(), name) == known.end())
      config_error("unknown analysis '" + name + "'");
    cfg.analyses.push_back(name);
  }

  if (j.contains("resolution")) {
    const auto& res = j["resolution"];
    check_keys(res,
               {"bins", "orbit_steps", "ensemble", "lyapunov_steps", "entropy_depth",
                "entropy_samples", "omega_samples", "entropy_level", "paths",
                "cocycle_pairs"},
               "resolution");
    ResolutionConfig& r = cfg.resolution;
    r.bins = static_cast<int>(res.value("bins", r.bins));
    r.orbit_steps = static_cast<long>(res.value("orbit_steps", r.orbit_steps));
    r.ensemble = static_cast<int>(res.value("ensemble", r.ensemble));
    r.lyapunov_steps = static_cast<long>(res.value("lyapunov_steps", r.lyapunov_steps));
    r.entropy_depth = static_cast<int>(res.value("entropy_depth", r.entropy_depth));
    r.entropy_samples = static_cast<long>(res.value("entropy_samples", r.entropy_samples));
    r.omega_samples = static_cast<int>(res.value("omega_samples", r.omega_samples));
    r.entropy_level = static_cast<int>(res.value("entropy_level", r.entropy_level));
    r.paths = static_cast<int>(res.value("paths", r.paths));
    r.cocycle_pairs = static_cast<int>(res.value("cocycle_pairs", r.cocycle_pairs));
    if (r.bins < 2 || r.ensemble < 1 || r.entropy_depth < 1 || r.paths < 1)
      config_error("resolution values out of range");
  }

  // Cross-field checks, before any computation.
  bool is_map = cfg.system.type == "map";
  for (const std::string& a : cfg.analyses) {
    if (is_map) {
      if (!cfg.kernel.has_value())
        config_error("analysis '" + a + "' on a map system requires a 'kernel'");
    } else if (!kSdeAnalyses.count(a)) {
      config_error("analysis '" + a + "' is not supported for sde systems");
    }
    if (a == "zero_noise" && cfg.epsilon_schedule.empty())
      config_error("zero_noise requires an epsilon_schedule");
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot read config file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return from_json_text(os.str());
}

std::string ExperimentConfig::echo_json() const {
  // The echo identifies the run's content; the output directory is a
  // runtime destination and stays out so that --out overrides reproduce
  // byte-identical artifacts.
  ordered_json j;
  j["seed"] = seed;
  ordered_json sys;
  sys["type"] = system.type;
  sys["name"] = system.name;
  ordered_json params = ordered_json::object();
  for (const auto& [k, v] : system.params) params[k] = v;
  sys["params"] = params;
  if (system.type == "sde") {
    sys["dt"] = system.dt;
    sys["horizon"] = system.horizon;
  }
  j["system"] = sys;
  if (kernel) {
    ordered_json ker;
    ker["variant"] = kernel->variant;
    ker["epsilon"] = kernel->epsilon;
    j["kernel"] = ker;
  }
  j["epsilon_schedule"] = epsilon_schedule;
  ordered_json cand;
  cand["type"] = candidate.type;
  cand["at"] = candidate.at;
  j["candidate"] = cand;
  j["analyses"] = analyses;
  ordered_json res;
  res["bins"] = resolution.bins;
  res["orbit_steps"] = resolution.orbit_steps;
  res["ensemble"] = resolution.ensemble;
  res["lyapunov_steps"] = resolution.lyapunov_steps;
  res["entropy_depth"] = resolution.entropy_depth;
  res["entropy_samples"] = resolution.entropy_samples;
  res["omega_samples"] = resolution.omega_samples;
  res["entropy_level"] = resolution.entropy_level;
  res["paths"] = resolution.paths;
  res["cocycle_pairs"] = resolution.cocycle_pairs;
  j["resolution"] = res;
  return j.dump(2);
}

std::string ExperimentConfig::config_hash() const { return sha256_hex(echo_json()); }

BaseMap system_map(const ExperimentConfig& config) {
  return make_map(config.system.name, config.system.params);
}

TransitionKernel build_kernel(const ExperimentConfig& config, double eps) {
  if (!config.kernel) fail(ErrorCode::Parse, "config has no kernel");
  const std::string& variant = config.kernel->variant;
  if (variant == "degenerate_trap") return TransitionKernel::degenerate_trap(eps);
  BaseMap map = system_map(config);
  if (variant == "additive_map") return TransitionKernel::additive(map, eps);
  if (variant == "random_jump") return TransitionKernel::random_jump(map, eps);
  if (variant == "parametric")
    return TransitionKernel::parametric(RandomMapLaw::additive(map), eps);
  if (variant == "delta") return TransitionKernel::delta(map);
  fail(ErrorCode::Parse, "unknown kernel variant '" + variant + "'");
}

namespace {

struct RunContext {
  const ExperimentConfig& cfg;
  fs::path out_dir;
  std::string hash;
  std::vector<OutputRecord>* outputs;
  AnalysisStatus* status;

  CsvWriter make_csv(std::vector<std::string> columns) const {
    CsvWriter csv(std::move(columns));
    csv.add_comment("rdslab " + std::string(kVersionString));
    csv.add_comment("config " + hash);
    return csv;
  }

  void emit(const std::string& filename, const CsvWriter& csv) const {
    fs::path path = out_dir / filename;
    csv.write_file(path.string());
    OutputRecord rec;
    rec.path = filename;
    rec.sha256 = sha256_file(path.string());
    rec.bytes = static_cast<uint64_t>(fs::file_size(path));
    outputs->push_back(rec);
    status->outputs.push_back(filename);
  }
};

BinnedMeasure candidate_measure(const ExperimentConfig& cfg, const StateSpace& space) {
  if (cfg.candidate.type == "lebesgue")
    return BinnedMeasure::uniform(space, cfg.resolution.bins);
  return BinnedMeasure::dirac(space, cfg.resolution.bins, cfg.candidate.at);
}

void run_stationary_map(const RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  TransitionKernel kernel = build_kernel(cfg, cfg.kernel->epsilon);
  UlamOperator op = build_ulam(kernel, cfg.resolution.bins);
  BinnedMeasure mu = stationary_vector(op);
  double residual = stationarity_residual(kernel, mu, 64, cfg.seed);

  CsvWriter measure = ctx.make_csv({"bin_center", "weight"});
  for (int j = 0; j < mu.bins(); ++j) measure.add_row({mu.bin_center(j), mu.weight(j)});
  ctx.emit("stationary_measure.csv", measure);

  CsvWriter summary = ctx.make_csv({"quantity", "value"});
  summary.add_text_row({"bins", format_double(mu.bins())});
  summary.add_text_row({"stationarity_residual", format_double(residual)});
  ctx.emit("stationary_summary.csv", summary);

  if (kernel.has_density()) {
    double x0 = mu.space().lower(0) + 0.25 * mu.space().length();
    CsvWriter density = ctx.make_csv({"y", "density"});
    for (int j = 0; j < mu.bins(); ++j) {
      double y = mu.bin_center(j);
      density.add_row({y, kernel.density(vec1(x0), vec1(y))});
    }
    ctx.emit("density_curve.csv", density);
  }

  // Monte Carlo time averages of the default observables, one trajectory per
  // ensemble member, merged in stream order.
  SkewSystem system = SkewSystem::from_kernel(kernel);
  struct Obs {
    std::string name;
    std::function<double(const Vec&)> fn;
  };
  std::vector<Obs> observables = {
      {"indicator_lower_half",
       [&](const Vec& x) {
         return x(0) < mu.space().lower(0) + 0.5 * mu.space().length() ? 1.0 : 0.0;
       }},
      {"cos_2pi_x", [](const Vec& x) { return std::cos(2.0 * M_PI * x(0)); }},
  };
  int members = cfg.resolution.ensemble;
  uint64_t steps = static_cast<uint64_t>(cfg.resolution.orbit_steps);
  CsvWriter ensemble = ctx.make_csv({"observable", "mean", "stderr", "n"});
  for (const Obs& obs : observables) {
    std::vector<double> values(members);
    parallel_for(members, [&](long s) {
      uint64_t seed = mix64(cfg.seed, 0xB00Bull + static_cast<uint64_t>(s));
      RngStream point(seed, 3);
      Vec x0 = vec1(point.uniform(mu.space().lower(0), mu.space().upper(0)));
      values[s] = system.time_average(system.noise(seed), x0, obs.fn, steps).value;
    });
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= members;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    double se = members > 1 ? std::sqrt(var / (members - 1.0) / members) : 0.0;
    ensemble.add_text_row({obs.name, format_double(mean), format_double(se),
                           format_double(static_cast<double>(steps))});
  }
  ctx.emit("ensemble_summary.csv", ensemble);
}

void run_stationary_sde(const RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  SdeSystem sys = make_sde(cfg.system.name, cfg.kernel ? cfg.kernel->epsilon : 0.2,
                           cfg.system.dt, cfg.system.horizon);
  uint64_t steps = sys.horizon_steps();
  int paths = cfg.resolution.paths;
  std::vector<double> endpoints(paths);
  parallel_for(paths, [&](long p) {
    NoisePath path(mix64(cfg.seed, static_cast<uint64_t>(p)), sys.noise_dim, sys.dt);
    Vec x = Vec::Zero(sys.dim);
    x = em_endpoint(sys, x, path, steps);
    endpoints[p] = std::clamp(x(0), -2.0, std::nextafter(2.0, 0.0));
  });
  StateSpace window = StateSpace::interval(-2.0, 2.0);
  BinnedMeasure law = BinnedMeasure::from_samples(window, 400, endpoints);
  CsvWriter measure = ctx.make_csv({"bin_center", "weight"});
  for (int j = 0; j < law.bins(); ++j) measure.add_row({law.bin_center(j), law.weight(j)});
  ctx.emit("stationary_law.csv", measure);

  double mean = 0.0, var = 0.0;
  for (double v : endpoints) mean += v;
  mean /= paths;
  for (double v : endpoints) var += (v - mean) * (v - mean);
  var /= paths;
  CsvWriter summary = ctx.make_csv({"quantity", "value"});
  summary.add_text_row({"mean", format_double(mean)});
  summary.add_text_row({"variance", format_double(var)});
  summary.add_text_row({"paths", format_double(paths)});
  ctx.emit("stationary_summary.csv", summary);
}

void run_zero_noise(const RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  ZeroNoiseTable table;
  if (cfg.system.type == "map") {
    BaseMap map = system_map(cfg);
    BinnedMeasure candidate = candidate_measure(cfg, map.space());
    table = zero_noise_study([&](double eps) { return build_kernel(cfg, eps); },
                             cfg.epsilon_schedule, candidate);
  } else {
    FlowStudyOptions opts;
    opts.paths = cfg.resolution.paths;
    opts.seed = cfg.seed;
    table = zero_noise_flow_study(
        [&](double eps) {
          return make_sde(cfg.system.name, eps, cfg.system.dt, cfg.system.horizon);
        },
        cfg.epsilon_schedule, cfg.candidate.at, opts);
  }
  CsvWriter csv = ctx.make_csv({"epsilon", "w1_to_candidate", "mass_in_window"});
  for (const auto& row : table.rows)
    csv.add_row({row.eps, row.w1_to_candidate, row.mass_in_window});
  ctx.emit("zero_noise.csv", csv);
  CsvWriter summary = ctx.make_csv({"quantity", "value"});
  summary.add_text_row({"monotone_decreasing", table.monotone_decreasing ? "1" : "0"});
  ctx.emit("zero_noise_summary.csv", summary);
}

void run_lyapunov(const RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  TransitionKernel kernel = build_kernel(cfg, cfg.kernel->epsilon);
  SkewSystem system = SkewSystem::from_kernel(kernel);
  int k = system.space().dim();
  RandomMetReport report =
      random_met(system, cfg.resolution.ensemble,
                 static_cast<uint64_t>(cfg.resolution.lyapunov_steps), {1, 10, 100},
                 cfg.seed);

  std::vector<std::string> cols = {"realization"};
  for (int i = 1; i <= k; ++i) cols.push_back("lambda_" + std::to_string(i));
  cols.push_back("n");
  CsvWriter spectra = ctx.make_csv(cols);
  for (size_t s = 0; s < report.spectra.size(); ++s) {
    std::vector<double> row = {static_cast<double>(s)};
    row.insert(row.end(), report.spectra[s].begin(), report.spectra[s].end());
    row.push_back(static_cast<double>(cfg.resolution.lyapunov_steps));
    spectra.add_row(row);
  }
  ctx.emit("lyapunov_spectrum.csv", spectra);

  CsvWriter invariance = ctx.make_csv({"t", "max_gap"});
  for (const auto& [t, gap] : report.invariance_gap_by_t)
    invariance.add_row({static_cast<double>(t), gap});
  ctx.emit("lyapunov_invariance.csv", invariance);

  // Convergence trace of one realization.
  std::vector<std::string> trace_cols = {"n"};
  for (int i = 1; i <= k; ++i) trace_cols.push_back("lambda_" + std::to_string(i));
  CsvWriter trace = ctx.make_csv(trace_cols);
  uint64_t total = static_cast<uint64_t>(cfg.resolution.lyapunov_steps);
  for (uint64_t n : {total / 8, total / 4, total / 2, total}) {
    if (n == 0) continue;
    uint64_t seed0 = mix64(cfg.seed, 0);
    RngStream point(seed0, 0xF00D);
    Vec x0(k);
    for (int i = 0; i < k; ++i)
      x0(i) = point.uniform(system.space().lower(i), system.space().upper(i));
    DerivativeCocycle driver(system, system.noise(seed0), x0);
    LyapunovSpectrum spec = qr_lyapunov(driver, n);
    std::vector<double> row = {static_cast<double>(n)};
    row.insert(row.end(), spec.exponents.begin(), spec.exponents.end());
    trace.add_row(row);
  }
  ctx.emit("lyapunov_convergence.csv", trace);
}

void run_entropy(const RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  TransitionKernel kernel = build_kernel(cfg, cfg.kernel->epsilon);
  SkewSystem system = SkewSystem::from_kernel(kernel);
  UlamOperator op = build_ulam(kernel, cfg.resolution.bins);
  BinnedMeasure mu = stationary_vector(op);
  Partition xi = Partition::dyadic(system.space(), cfg.resolution.entropy_level);
  RandomEntropyOptions opts;
  opts.n_max = cfg.resolution.entropy_depth;
  opts.omega_samples = cfg.resolution.omega_samples;
  opts.start_samples = cfg.resolution.entropy_samples;
  opts.seed = cfg.seed;
  EntropyEstimate est = random_entropy(system, mu, xi, opts);

  CsvWriter curve = ctx.make_csv({"n", "H_n_over_n", "stderr"});
  for (size_t i = 0; i < est.curve.size(); ++i)
    curve.add_row({static_cast<double>(est.curve[i].first), est.curve[i].second,
                   est.curve_stderr[i]});
  ctx.emit("entropy_curve.csv", curve);

  CsvWriter summary = ctx.make_csv({"quantity", "value"});
  summary.add_text_row({"estimate", format_double(est.value)});
  summary.add_text_row({"n_used", format_double(est.n_used)});
  summary.add_text_row({"cells", format_double(xi.cells())});
  ctx.emit("entropy_summary.csv", summary);
}

void run_entropy_gap(const RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  TransitionKernel kernel = build_kernel(cfg, cfg.kernel->epsilon);
  SkewSystem system = SkewSystem::from_kernel(kernel);
  UlamOperator op = build_ulam(kernel, cfg.resolution.bins);
  BinnedMeasure mu = stationary_vector(op);
  EntropyGapOptions opts;
  opts.partition_levels = {1, 2};
  opts.entropy.n_max = std::max(cfg.resolution.entropy_depth, 192);
  opts.entropy.omega_samples = std::min(cfg.resolution.omega_samples, 4);
  opts.entropy.start_samples = cfg.resolution.entropy_samples;
  opts.lyapunov_steps = static_cast<uint64_t>(cfg.resolution.lyapunov_steps);
  opts.lyapunov_starts = std::min(cfg.resolution.ensemble, 32);
  opts.seed = cfg.seed;
  EntropyGapReport report = entropy_formula_gap(system, mu, opts);

  CsvWriter csv = ctx.make_csv({"system", "h", "lambda_plus", "gap", "partition"});
  csv.add_text_row({cfg.system.name, format_double(report.h),
                    format_double(report.lambda_plus), format_double(report.gap),
                    report.partition});
  ctx.emit("entropy_gap.csv", csv);
}

void run_cocycle_check(const RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  RngStream rng(cfg.seed, 0xC0C);
  if (cfg.system.type == "map") {
    TransitionKernel kernel = build_kernel(cfg, cfg.kernel->epsilon);
    SkewSystem system = SkewSystem::from_kernel(kernel);
    CsvWriter csv = ctx.make_csv({"s", "t", "residual"});
    for (int p = 0; p < cfg.resolution.cocycle_pairs; ++p) {
      uint64_t s = rng.bits() % 64;
      uint64_t t = rng.bits() % 64;
      Vec x(system.space().dim());
      for (int i = 0; i < system.space().dim(); ++i)
        x(i) = rng.uniform(system.space().lower(i), system.space().upper(i));
      double r = system.cocycle_residual(system.noise(mix64(cfg.seed, p)), s, t, x);
      csv.add_row({static_cast<double>(s), static_cast<double>(t), r});
    }
    ctx.emit("cocycle.csv", csv);

    // Sample trajectory dump.
    uint64_t n = std::min<uint64_t>(1000, static_cast<uint64_t>(cfg.resolution.orbit_steps));
    Vec x0(system.space().dim());
    for (int i = 0; i < system.space().dim(); ++i)
      x0(i) = rng.uniform(system.space().lower(i), system.space().upper(i));
    auto points = system.orbit(system.noise(mix64(cfg.seed, 0x0B17)), x0, n);
    std::vector<std::string> cols = {"k"};
    for (int i = 0; i < system.space().dim(); ++i) cols.push_back("x" + std::to_string(i));
    CsvWriter traj = ctx.make_csv(cols);
    for (size_t kk = 0; kk < points.size(); ++kk) {
      std::vector<double> row = {static_cast<double>(kk)};
      for (int i = 0; i < system.space().dim(); ++i) row.push_back(points[kk](i));
      traj.add_row(row);
    }
    ctx.emit("trajectory.csv", traj);
  } else {
    SdeSystem sys = make_sde(cfg.system.name, cfg.kernel ? cfg.kernel->epsilon : 0.2,
                             cfg.system.dt, cfg.system.horizon);
    uint64_t half = std::max<uint64_t>(1, sys.horizon_steps() / 2);
    CsvWriter csv = ctx.make_csv({"s_steps", "t_steps", "residual"});
    for (int p = 0; p < cfg.resolution.cocycle_pairs; ++p) {
      uint64_t s = 1 + rng.bits() % half;
      uint64_t t = 1 + rng.bits() % half;
      NoisePath path(mix64(cfg.seed, 0xF10ull + p), sys.noise_dim, sys.dt);
      Vec x0 = Vec::Zero(sys.dim);
      double r = flow_cocycle_residual(sys, path, s, t, x0);
      csv.add_row({static_cast<double>(s), static_cast<double>(t), r});
    }
    ctx.emit("cocycle.csv", csv);

    NoisePath path(mix64(cfg.seed, 0x7247), sys.noise_dim, sys.dt);
    SdeTrajectory traj = em_integrate(sys, Vec::Zero(sys.dim), path,
                                      std::min<uint64_t>(1000, sys.horizon_steps()));
    std::vector<std::string> cols = {"t"};
    for (int i = 0; i < sys.dim; ++i) cols.push_back("x" + std::to_string(i));
    CsvWriter tcsv = ctx.make_csv(cols);
    for (size_t m = 0; m < traj.states.size(); ++m) {
      std::vector<double> row = {static_cast<double>(m) * sys.dt};
      for (int i = 0; i < sys.dim; ++i) row.push_back(traj.states[m](i));
      tcsv.add_row(row);
    }
    ctx.emit("trajectory.csv", tcsv);
  }
}

}  // namespace

std::string RunManifest::to_json() const {
  ordered_json j;
  j["version"] = version;
  j["config_hash"] = config_hash;
  ordered_json list = ordered_json::array();
  for (const auto& a : analyses) {
    ordered_json item;
    item["name"] = a.name;
    item["ok"] = a.ok;
    if (!a.ok) item["error"] = a.error;
    item["outputs"] = a.outputs;
    list.push_back(item);
  }
  j["analyses"] = list;
  ordered_json outs = ordered_json::array();
  for (const auto& o : outputs) {
    ordered_json item;
    item["path"] = o.path;
    item["sha256"] = o.sha256;
    item["bytes"] = o.bytes;
    outs.push_back(item);
  }
  j["outputs"] = outs;
  j["all_ok"] = all_ok;
  return j.dump(2);
}

RunManifest run_experiment(const ExperimentConfig& config) {
  fs::path out_dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create output directory '" + config.output_dir + "'");

  RunManifest manifest;
  manifest.version = kVersionString;
  manifest.config_hash = config.config_hash();
  manifest.all_ok = true;

  for (const std::string& name : config.analyses) {
    AnalysisStatus status;
    status.name = name;
    RunContext ctx{config, out_dir, manifest.config_hash, &manifest.outputs, &status};
    try {
      if (name == "stationary") {
        config.system.type == "map" ? run_stationary_map(ctx) : run_stationary_sde(ctx);
      } else if (name == "zero_noise") {
        run_zero_noise(ctx);
      } else if (name == "lyapunov") {
        run_lyapunov(ctx);
      } else if (name == "entropy") {
        run_entropy(ctx);
      } else if (name == "entropy_gap") {
        run_entropy_gap(ctx);
      } else if (name == "cocycle_check") {
        run_cocycle_check(ctx);
      }
      status.ok = true;
    } catch (const std::exception& e) {
      status.ok = false;
      status.error = e.what();
      manifest.all_ok = false;
    }
    manifest.analyses.push_back(status);
  }

  // Config echo beside the outputs, then the manifest, written once, last.
  {
    std::ofstream echo(out_dir / "config_echo.json", std::ios::binary);
    echo << config.echo_json() << '\n';
  }
  std::ofstream mf(out_dir / "manifest.json", std::ios::binary);
  if (!mf) fail(ErrorCode::Io, "cannot write manifest");
  mf << manifest.to_json() << '\n';
  return manifest;
}

}  // namespace rds
