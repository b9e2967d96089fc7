#include "stickywave/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "stickywave/csv.hpp"
#include "stickywave/errors.hpp"
#include "stickywave/numerics.hpp"

namespace stickywave::bench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const std::size_t pos = text.find(sep);
    out.push_back(trim(text.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    text.remove_prefix(pos + 1);
  }
  return out;
}

std::size_t parse_count(std::string_view token, std::string_view context) {
  const double v = parse_double(token, context);
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e15) {
    throw ValidationError("expected a positive integer, got '" + std::string(token) + "' in '" +
                          std::string(context) + "'");
  }
  return static_cast<std::size_t>(v);
}

// `a..b[:step]` split into its three parts; step is empty when absent.
struct RangeParts {
  std::string_view lo, hi, step;
};
std::optional<RangeParts> split_range(std::string_view item) {
  const std::size_t dots = item.find("..");
  if (dots == std::string_view::npos) return std::nullopt;
  RangeParts r;
  r.lo = trim(item.substr(0, dots));
  std::string_view rest = item.substr(dots + 2);
  const auto colon = static_cast<std::size_t>(std::ranges::find(rest, ':') - rest.begin());
  r.hi = trim(rest.substr(0, colon));
  if (colon < rest.size()) r.step = trim(rest.substr(colon + 1));
  return r;
}

std::filesystem::path prepare_out(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  if (ec) throw ValidationError("cannot create output directory " + cfg.out.string() + ": " + ec.message());
  return cfg.out;
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

void close_csv(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw ValidationError("write failed for " + path.string());
}

std::size_t worker_count(const RunConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<std::size_t> n_or(const RunConfig& cfg, std::vector<std::size_t> fallback) {
  return cfg.n.empty() ? fallback : cfg.n;
}

std::vector<std::string> measures_or(const RunConfig& cfg, std::vector<std::string> fallback) {
  return cfg.measures.empty() ? fallback : cfg.measures;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& err) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (err[i] > 0.0 && std::isfinite(err[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(err[i]));
    }
  }
  if (lx.size() < 2 || lx.size() != x.size()) return std::numeric_limits<double>::quiet_NaN();
  return least_squares_slope(lx, ly);
}

MultiConfig quantized_system(const RunConfig& cfg, std::size_t d, std::size_t n) {
  if (cfg.measures.size() != d) {
    throw ValidationError("field '" + cfg.flux + "' has " + std::to_string(d) + " types but " +
                          std::to_string(cfg.measures.size()) + " measures were given");
  }
  std::vector<std::vector<double>> x;
  for (const std::string& spec : cfg.measures) {
    x.push_back(optimal_quantize(measures::parse(spec), n).vector());
  }
  return MultiConfig(std::move(x));
}

FieldModel audited_field(const RunConfig& cfg) {
  FieldModel f = field::parse(cfg.flux);
  const AuditReport report = audit(f);
  if (!report.ok()) {
    std::string msg = "field '" + cfg.flux + "' fails its audit:";
    for (const std::string& v : report.violations) msg += "\n  " + v;
    throw ValidationError(msg);
  }
  return f;
}

std::size_t single_n(const RunConfig& cfg, std::size_t fallback) {
  if (cfg.n.size() > 1) throw ValidationError("this subcommand takes a single --n value");
  return cfg.n.empty() ? fallback : cfg.n.front();
}

// 0, step, 2 step, ... up to horizon, with horizon itself appended.
std::vector<double> time_grid(double horizon, double step) {
  std::vector<double> times{0.0};
  const auto steps = static_cast<std::size_t>(std::floor(horizon / step * (1.0 + 1e-12)));
  for (std::size_t k = 1; k <= steps; ++k) times.push_back(std::min(horizon, k * step));
  if (times.back() < horizon) times.push_back(horizon);
  return times;
}

std::pair<double, double> position_range(const std::vector<std::vector<double>>& sets) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : sets) {
    for (double x : s) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  const double pad = hi > lo ? 0.05 * (hi - lo) : 1.0;
  return {lo - pad, hi + pad};
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

void write_timings(const std::filesystem::path& path, const std::vector<ErrorRecord>& rows) {
  auto out = open_csv(path);
  out << csv::kVersionLine << '\n' << "label,n,delta,t,wall_seconds\n";
  for (const auto& r : rows) {
    out << csv::text(r.label) << ',' << r.n << ',' << csv::num(r.delta) << ',' << csv::num(r.t) << ','
        << csv::num(r.wall_seconds) << '\n';
  }
  close_csv(out, path);
}

}  // namespace

// ---------------------------------------------------------------- config

std::vector<std::size_t> parse_n_list(std::string_view text) {
  std::vector<std::size_t> out;
  for (std::string_view item : split(text, ',')) {
    if (item.empty()) throw ValidationError("empty item in n list '" + std::string(text) + "'");
    const auto range = split_range(item);
    if (!range) {
      out.push_back(parse_count(item, text));
      continue;
    }
    if (range->lo.starts_with("2^") && range->hi.starts_with("2^")) {
      if (!range->step.empty()) throw ValidationError("power ranges take no step: '" + std::string(item) + "'");
      const double a = parse_double(range->lo.substr(2), text);
      const double b = parse_double(range->hi.substr(2), text);
      if (a < 0 || b > 62 || a > b || a != std::floor(a) || b != std::floor(b)) {
        throw ValidationError("bad power range '" + std::string(item) + "'");
      }
      for (auto p = static_cast<int>(a); p <= static_cast<int>(b); ++p) out.push_back(std::size_t{1} << p);
      continue;
    }
    const std::size_t a = parse_count(range->lo, text);
    const std::size_t b = parse_count(range->hi, text);
    const std::size_t step = range->step.empty() ? 1 : parse_count(range->step, text);
    if (a > b) throw ValidationError("empty range '" + std::string(item) + "'");
    for (std::size_t v = a; v <= b; v += step) out.push_back(v);
  }
  return out;
}

std::vector<double> parse_t_list(std::string_view text) {
  std::vector<double> out;
  for (std::string_view item : split(text, ',')) {
    if (item.empty()) throw ValidationError("empty item in t list '" + std::string(text) + "'");
    const auto range = split_range(item);
    if (!range) {
      out.push_back(parse_double(item, text));
      continue;
    }
    const double a = parse_double(range->lo, text);
    const double b = parse_double(range->hi, text);
    const double step = range->step.empty() ? 1.0 : parse_double(range->step, text);
    if (!(step > 0.0) || a > b) throw ValidationError("bad range '" + std::string(item) + "'");
    const auto count = static_cast<std::size_t>(std::floor((b - a) / step * (1.0 + 1e-12))) + 1;
    for (std::size_t i = 0; i < count; ++i) out.push_back(a + static_cast<double>(i) * step);
  }
  return out;
}

RunConfig config_from_json_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config must be a JSON object");
  RunConfig cfg;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "mode") {
        cfg.mode = value.get<std::string>();
      } else if (key == "flux" || key == "field") {
        cfg.flux = value.get<std::string>();
      } else if (key == "measure" || key == "measures") {
        if (value.is_string()) {
          cfg.measures = {value.get<std::string>()};
        } else {
          cfg.measures = value.get<std::vector<std::string>>();
        }
      } else if (key == "n") {
        if (value.is_string()) {
          cfg.n = parse_n_list(value.get<std::string>());
        } else if (value.is_array()) {
          cfg.n.clear();
          for (const auto& e : value) {
            if (!e.is_number_integer() || e.get<long long>() < 1) {
              throw ValidationError("config n entries must be positive integers");
            }
            cfg.n.push_back(e.get<std::size_t>());
          }
        } else {
          cfg.n = {value.get<std::size_t>()};
        }
      } else if (key == "t") {
        if (value.is_string()) {
          cfg.t = parse_t_list(value.get<std::string>());
        } else if (value.is_array()) {
          cfg.t = value.get<std::vector<double>>();
        } else {
          cfg.t = {value.get<double>()};
        }
      } else if (key == "delta") {
        cfg.delta = value.get<double>();
      } else if (key == "out") {
        cfg.out = value.get<std::string>();
      } else if (key == "reference_resolution") {
        cfg.reference_resolution = value.get<std::size_t>();
      } else if (key == "oracle") {
        if (value.is_boolean()) {
          cfg.oracle = value.get<bool>();
        } else {
          const auto s = value.get<std::string>();
          if (s != "on" && s != "off") throw ValidationError("oracle must be on or off");
          cfg.oracle = s == "on";
        }
      } else if (key == "seed") {
        cfg.seed = value.get<std::uint64_t>();
      } else if (key == "instances") {
        cfg.instances = value.get<std::size_t>();
      } else if (key == "threads") {
        cfg.threads = value.get<std::size_t>();
      } else if (key == "x_points") {
        cfg.x_points = value.get<std::size_t>();
      } else {
        throw ValidationError("unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config has a value of the wrong type: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json_text(buf.str());
}

void validate(const RunConfig& cfg) {
  if (cfg.mode != "scalar" && cfg.mode != "system" && cfg.mode != "psystem") {
    throw ValidationError("mode must be scalar, system or psystem, got '" + cfg.mode + "'");
  }
  for (std::size_t n : cfg.n) {
    if (n == 0) throw ValidationError("n entries must be >= 1");
  }
  for (double t : cfg.t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("t entries must be finite and >= 0");
  }
  if (!(cfg.delta > 0.0) || !std::isfinite(cfg.delta)) throw ValidationError("delta must be > 0");
  if (cfg.reference_resolution == 0) throw ValidationError("reference_resolution must be >= 1");
  if (cfg.x_points < 2) throw ValidationError("x_points must be >= 2");
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(worker);
  pool.clear();
  if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------- scalar

ScalarReference::ScalarReference(const FluxModel& flux, const Measure1D& m, double t,
                                 std::size_t resolution) {
  // Burgers (lambda(u) = u) on atomic data: each atom opens a fan, fans never meet.
  if (flux.name == "burgers" && !m.atom_list.empty()) {
    exact_ = burgers_atoms_measure(m.atom_list, t);
    return;
  }
  particles_ = particle_reference(flux, m, t, resolution).measure();
}

double ScalarReference::distance(const DiscreteMeasure& particles) const {
  if (exact_) return w1(*exact_, particles);
  return w1(particles_, particles);
}

ConvergenceReport scalar_convergence(const RunConfig& cfg) {
  validate(cfg);
  const FluxModel flux = flux::parse(cfg.flux);
  const auto specs = measures_or(cfg, {"heaviside:0"});
  const auto ns = n_or(cfg, parse_n_list("2^1..2^9"));
  const auto ts = cfg.t.empty() ? std::vector<double>{1.0} : cfg.t;

  struct Cell {
    std::size_t measure, t, n;
  };
  std::vector<Cell> cells;
  for (std::size_t m = 0; m < specs.size(); ++m) {
    for (std::size_t ti = 0; ti < ts.size(); ++ti) {
      for (std::size_t ni = 0; ni < ns.size(); ++ni) cells.push_back({m, ti, ni});
    }
  }
  std::vector<Measure1D> data;
  for (const auto& s : specs) data.push_back(measures::parse(s));

  // References are shared by every n at a given (measure, t).
  std::vector<std::optional<ScalarReference>> refs(specs.size() * ts.size());
  parallel_for(refs.size(), worker_count(cfg), [&](std::size_t i) {
    refs[i].emplace(flux, data[i / ts.size()], ts[i % ts.size()], cfg.reference_resolution);
  });

  ConvergenceReport report;
  report.rows.resize(cells.size());
  parallel_for(cells.size(), worker_count(cfg), [&](std::size_t i) {
    const Cell& c = cells[i];
    const auto start = Clock::now();
    const std::size_t n = ns[c.n];
    const ParticleConfig x(optimal_quantize(data[c.measure], n).vector());
    const auto y = spd_positions(x, init_velocities(flux, n), ts[c.t]);
    const double err = refs[c.measure * ts.size() + c.t]->distance(DiscreteMeasure(y.vector()));
    report.rows[i] = {specs[c.measure], n, 0.0, ts[c.t], err, seconds_since(start), !std::isfinite(err)};
  });

  for (std::size_t m = 0; m < specs.size(); ++m) {
    for (std::size_t ti = 0; ti < ts.size(); ++ti) {
      std::vector<double> x;
      std::vector<double> e;
      for (const auto& r : report.rows) {
        if (r.label == specs[m] && r.t == ts[ti]) {
          x.push_back(static_cast<double>(r.n));
          e.push_back(r.l1_error);
        }
      }
      const double slope = fit_slope(x, e);
      report.fits.push_back({specs[m], ts[ti], slope, slope * std::numbers::ln2});
    }
  }
  return report;
}

std::vector<ScalarSample> scalar_field(const RunConfig& cfg) {
  validate(cfg);
  if (cfg.measures.size() > 1) throw ValidationError("scalar-field takes a single --measure");
  const FluxModel flux = flux::parse(cfg.flux);
  const Measure1D m = measures::parse(measures_or(cfg, {"heaviside:0"}).front());
  const std::size_t n = single_n(cfg, 50);
  const auto ts = cfg.t.empty() ? parse_t_list("0..4:1") : cfg.t;

  const ParticleConfig x(optimal_quantize(m, n).vector());
  const auto lambda = init_velocities(flux, n);
  std::vector<std::vector<double>> positions(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) positions[i] = spd_positions(x, lambda, ts[i]).vector();
  const auto [lo, hi] = position_range(positions);
  const auto grid = linspace(lo, hi, cfg.x_points);

  std::vector<ScalarSample> rows;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const EmpiricalCDF cdf{DiscreteMeasure(positions[i])};
    for (double xv : grid) rows.push_back({ts[i], xv, cdf(xv)});
  }
  return rows;
}

// ---------------------------------------------------------------- systems

SystemRun system_run(const RunConfig& cfg) {
  validate(cfg);
  const FieldModel fields = audited_field(cfg);
  const std::size_t n = single_n(cfg, 20);
  const MultiConfig x = quantized_system(cfg, fields.d, n);

  SystemRun run;
  run.times = cfg.t.size() == 1 ? time_grid(cfg.t.front(), cfg.delta)
                                : (cfg.t.empty() ? time_grid(1.0, cfg.delta) : cfg.t);
  if (!std::is_sorted(run.times.begin(), run.times.end())) {
    throw ValidationError("system-run times must be nondecreasing");
  }
  run.states = iterated_tspd_trajectory(x, fields, cfg.delta, run.times);

  if (cfg.oracle && n * fields.d <= MspdOptions{}.max_particles) {
    run.exact = mspd_exact(x, fields, run.times.back());
    run.oracle_ran = true;
  }

  if (cfg.flux.starts_with("psystem")) {
    const PSystemModel model =
        cfg.flux == "psystem" ? PSystemModel(0.5, 5.0) : field::parse_psystem(cfg.flux);
    std::vector<std::vector<double>> all;
    for (const auto& s : run.states) {
      for (const auto& v : s.vectors()) all.push_back(v);
    }
    const auto [lo, hi] = position_range(all);
    const auto grid = linspace(lo, hi, cfg.x_points);
    for (std::size_t s = 0; s < run.times.size(); ++s) {
      const EmpiricalCDF wm{DiscreteMeasure(run.states[s].vectors()[0])};
      const EmpiricalCDF wp{DiscreteMeasure(run.states[s].vectors()[1])};
      for (double xv : grid) {
        const double a = wm(xv);
        const double b = wp(xv);
        const auto [u, v] = model.recover(a, b);
        run.psystem_field.push_back({run.times[s], xv, a, b, u, v});
      }
    }
  }
  return run;
}

DeltaStudy delta_study(const RunConfig& cfg) {
  validate(cfg);
  const FieldModel fields = audited_field(cfg);
  const auto ns = n_or(cfg, {20});
  const double horizon = cfg.t.empty() ? 1.0 : *std::max_element(cfg.t.begin(), cfg.t.end());
  const MspdOptions opts;
  for (std::size_t n : ns) {
    if (n * fields.d > opts.max_particles) {
      throw ValidationError("delta-study needs n * d <= " + std::to_string(opts.max_particles) +
                            ", got n = " + std::to_string(n));
    }
  }
  constexpr std::size_t kLevels = 4;
  // Multiples of the coarsest step are grid points of every finer step.
  const auto times = time_grid(horizon, cfg.delta);

  std::vector<MultiConfig> data;
  for (std::size_t n : ns) data.push_back(quantized_system(cfg, fields.d, n));
  std::vector<std::vector<MultiConfig>> exact(ns.size());
  parallel_for(ns.size(), worker_count(cfg),
               [&](std::size_t i) { exact[i] = mspd_trajectory(data[i], fields, times, opts); });

  DeltaStudy study;
  study.rows.resize(ns.size() * kLevels);
  parallel_for(study.rows.size(), worker_count(cfg), [&](std::size_t cell) {
    const std::size_t i = cell / kLevels;
    const double delta = cfg.delta / static_cast<double>(std::size_t{1} << (cell % kLevels));
    const auto start = Clock::now();
    const auto scheme = iterated_tspd_trajectory(data[i], fields, delta, times);
    double sup = 0.0;
    for (std::size_t s = 0; s < times.size(); ++s) sup = std::max(sup, multi_l1(exact[i][s], scheme[s]));
    study.rows[cell] = {cfg.flux, ns[i], delta, horizon, sup, seconds_since(start), false};
  });

  for (std::size_t i = 0; i < ns.size(); ++i) {
    std::vector<double> d;
    std::vector<double> e;
    for (std::size_t l = 0; l < kLevels; ++l) {
      d.push_back(study.rows[i * kLevels + l].delta);
      e.push_back(study.rows[i * kLevels + l].l1_error);
    }
    // Errors at rounding level mean no collision was mistimed: no order to fit.
    const bool resolved = std::ranges::all_of(e, [](double v) { return v > 1e-12; });
    const double order = resolved ? fit_slope(d, e) : std::numeric_limits<double>::quiet_NaN();
    study.fits.push_back({cfg.flux + " n=" + std::to_string(ns[i]), horizon, order, order});
  }
  return study;
}

// ---------------------------------------------------------------- quantization

QuantizeStudy quantize_study(const RunConfig& cfg) {
  validate(cfg);
  const auto specs =
      measures_or(cfg, {"pareto:1.5", "pareto:2", "pareto:3", "stretchedexp:1", "uniform:0,1"});
  const auto ns = n_or(cfg, parse_n_list("2^1..2^14"));
  std::vector<Measure1D> data;
  for (const auto& s : specs) data.push_back(measures::parse(s));
  std::vector<double> sqrt_integral(specs.size());
  parallel_for(specs.size(), worker_count(cfg),
               [&](std::size_t m) { sqrt_integral[m] = w1_upper_bound_sqrt(data[m]); });

  QuantizeStudy study;
  study.rows.resize(specs.size() * ns.size());
  parallel_for(study.rows.size(), worker_count(cfg), [&](std::size_t cell) {
    const std::size_t m = cell / ns.size();
    const std::size_t n = ns[cell % ns.size()];
    const double d = w1(data[m], optimal_quantize(data[m], n));
    study.rows[cell] = {specs[m], n, d, is_infinite_distance(d),
                        sqrt_integral[m] / std::sqrt(static_cast<double>(n))};
  });

  study.fits.resize(specs.size());
  parallel_for(specs.size(), worker_count(cfg), [&](std::size_t m) {
    if (!data[m].first_moment_finite) {
      study.fits[m] = {specs[m], std::numeric_limits<double>::infinity(), true};
      return;
    }
    study.fits[m] = {specs[m], tail_rate_fit(data[m], ns), false};
  });
  return study;
}

double time_scalar_solve(std::size_t n, std::uint64_t seed, int repeats) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-1.0, 1.0);
  std::vector<double> x(n);
  std::vector<double> lambda(n);
  for (auto& v : x) v = pos(rng);
  for (auto& v : lambda) v = pos(rng);
  std::sort(x.begin(), x.end());
  const ParticleConfig config(std::move(x));
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < repeats; ++r) {
    const auto start = Clock::now();
    const auto y = spd_positions(config, lambda, 1.0);
    best = std::min(best, seconds_since(start));
    if (y.size() != n) throw NumericalError("spd_positions lost particles");
  }
  return best;
}

// ---------------------------------------------------------------- writers

std::vector<std::filesystem::path> cmd_scalar_convergence(const RunConfig& cfg) {
  const ConvergenceReport report = scalar_convergence(cfg);
  const auto dir = prepare_out(cfg);
  const auto rows_path = dir / "convergence.csv";
  const auto fit_path = dir / "convergence_fit.csv";
  const auto time_path = dir / "timings.csv";

  auto out = open_csv(rows_path);
  out << csv::kVersionLine << '\n' << "flux,measure,n,t,l1_error,sentinel\n";
  for (const auto& r : report.rows) {
    out << csv::text(cfg.flux) << ',' << csv::text(r.label) << ',' << r.n << ',' << csv::num(r.t) << ','
        << csv::num(r.l1_error) << ',' << (r.sentinel ? 1 : 0) << '\n';
  }
  close_csv(out, rows_path);

  auto fit = open_csv(fit_path);
  fit << csv::kVersionLine << '\n' << "flux,measure,t,loglog_slope,slope_per_doubling\n";
  for (const auto& f : report.fits) {
    fit << csv::text(cfg.flux) << ',' << csv::text(f.label) << ',' << csv::num(f.t) << ',' << csv::num(f.loglog_slope) << ','
        << csv::num(f.slope_per_doubling) << '\n';
  }
  close_csv(fit, fit_path);
  write_timings(time_path, report.rows);
  return {rows_path, fit_path, time_path};
}

std::vector<std::filesystem::path> cmd_scalar_field(const RunConfig& cfg) {
  const auto rows = scalar_field(cfg);
  const auto path = prepare_out(cfg) / "field.csv";
  auto out = open_csv(path);
  write_field_csv(out, rows);
  close_csv(out, path);
  return {path};
}

std::vector<std::filesystem::path> cmd_system_run(const RunConfig& cfg) {
  const auto start = Clock::now();
  const SystemRun run = system_run(cfg);
  const double wall = seconds_since(start);
  const auto dir = prepare_out(cfg);
  std::vector<std::filesystem::path> written;

  const auto traj_path = dir / "trajectories.csv";
  auto traj = open_csv(traj_path);
  traj << csv::kVersionLine << '\n' << "source,t,type,particle,x\n";
  auto emit = [&](const char* source, double t, const MultiConfig& s) {
    for (std::size_t g = 0; g < s.types(); ++g) {
      for (std::size_t k = 0; k < s.per_type(); ++k) {
        traj << source << ',' << csv::num(t) << ',' << g + 1 << ',' << k + 1 << ',' << csv::num(s.at(g, k))
             << '\n';
      }
    }
  };
  for (std::size_t s = 0; s < run.times.size(); ++s) emit("scheme", run.times[s], run.states[s]);
  if (run.oracle_ran) {
    const FieldModel fields = field::parse(cfg.flux);
    const MultiConfig x = quantized_system(cfg, fields.d, run.states.front().per_type());
    const auto exact = mspd_trajectory(x, fields, run.times);
    for (std::size_t s = 0; s < run.times.size(); ++s) emit("exact", run.times[s], exact[s]);
  }
  close_csv(traj, traj_path);
  written.push_back(traj_path);

  if (!run.psystem_field.empty()) {
    const auto path = dir / "field.csv";
    auto out = open_csv(path);
    write_field_csv(out, run.psystem_field);
    close_csv(out, path);
    written.push_back(path);
  }
  if (run.oracle_ran) {
    const auto ev_path = dir / "events.csv";
    auto ev = open_csv(ev_path);
    write_event_csv(ev, run.exact.crossings);
    close_csv(ev, ev_path);
    const auto cl_path = dir / "cluster_events.csv";
    auto cl = open_csv(cl_path);
    write_cluster_event_csv(cl, run.exact.cluster_events);
    close_csv(cl, cl_path);
    written.push_back(ev_path);
    written.push_back(cl_path);
  }
  const auto time_path = dir / "timings.csv";
  write_timings(time_path, {{cfg.flux, run.states.front().per_type(), cfg.delta, run.times.back(), 0.0, wall, false}});
  written.push_back(time_path);
  return written;
}

std::vector<std::filesystem::path> cmd_delta_study(const RunConfig& cfg) {
  const DeltaStudy study = delta_study(cfg);
  const auto dir = prepare_out(cfg);
  const auto rows_path = dir / "delta_study.csv";
  const auto fit_path = dir / "delta_fit.csv";
  const auto time_path = dir / "timings.csv";

  auto out = open_csv(rows_path);
  out << csv::kVersionLine << '\n' << "field,n,delta,t,sup_l1_error\n";
  for (const auto& r : study.rows) {
    out << csv::text(r.label) << ',' << r.n << ',' << csv::num(r.delta) << ',' << csv::num(r.t) << ','
        << csv::num(r.l1_error) << '\n';
  }
  close_csv(out, rows_path);

  auto fit = open_csv(fit_path);
  fit << csv::kVersionLine << '\n' << "series,t,order\n";
  for (const auto& f : study.fits) fit << csv::text(f.label) << ',' << csv::num(f.t) << ',' << csv::num(f.loglog_slope) << '\n';
  close_csv(fit, fit_path);
  write_timings(time_path, study.rows);
  return {rows_path, fit_path, time_path};
}

std::vector<std::filesystem::path> cmd_quantize_study(const RunConfig& cfg) {
  const QuantizeStudy study = quantize_study(cfg);
  const auto dir = prepare_out(cfg);
  const auto rows_path = dir / "quantize.csv";
  const auto fit_path = dir / "quantize_fit.csv";

  auto out = open_csv(rows_path);
  out << csv::kVersionLine << '\n' << "measure,n,w1,sqrt_bound,sentinel\n";
  for (const auto& r : study.rows) {
    out << csv::text(r.label) << ',' << r.n << ',' << csv::num(r.w1) << ',' << csv::num(r.sqrt_bound) << ','
        << (r.sentinel ? 1 : 0) << '\n';
  }
  close_csv(out, rows_path);

  auto fit = open_csv(fit_path);
  fit << csv::kVersionLine << '\n' << "measure,slope,sentinel\n";
  for (const auto& f : study.fits) {
    fit << csv::text(f.label) << ',' << csv::num(f.slope) << ',' << (f.sentinel ? 1 : 0) << '\n';
  }
  close_csv(fit, fit_path);
  return {rows_path, fit_path};
}

std::vector<std::filesystem::path> cmd_selftest(const RunConfig& cfg, bool& all_passed) {
  using Suite = PropertyResult (*)(std::uint64_t, std::size_t);
  static constexpr Suite kSuites[] = {
      properties::stability,        properties::contraction,         properties::two_flux,
      properties::momentum,         properties::finite_speed,        properties::sortedness,
      properties::hull_vs_events,   properties::flow,                properties::ranks_vs_bruteforce,
      properties::ush_gap_decrease, properties::no_recollision,      properties::one_step_bound,
      properties::duplication,      properties::psystem_gap_growth};
  constexpr std::size_t kCount = std::size(kSuites);
  std::vector<PropertyResult> results(kCount);
  parallel_for(kCount, worker_count(cfg),
               [&](std::size_t i) { results[i] = kSuites[i](cfg.seed, cfg.instances); });

  const auto path = prepare_out(cfg) / "selftest.csv";
  auto out = open_csv(path);
  out << csv::kVersionLine << '\n' << "suite,instances,failures,worst_margin\n";
  all_passed = true;
  for (const auto& r : results) {
    out << r.name << ',' << r.instances << ',' << r.failures << ',' << csv::num(r.worst_margin) << '\n';
    if (!r.passed()) {
      all_passed = false;
      std::cerr << r.name << ": " << r.failures << " failures, first: " << r.first_failure << '\n';
    }
  }
  close_csv(out, path);
  return {path};
}

}  // namespace stickywave::bench
