#pragma once

// Experiment driver behind the command-line tool: run configuration, the
// study computations and their CSV outputs.
//
// Every study is split into a pure compute step returning plain records and a
// cmd_* wrapper that writes the versioned CSV files into the output directory.
// Wall-clock timings go to a separate timings.csv so that all other files are
// byte-identical across runs with the same configuration.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stickywave/flux_models.hpp"
#include "stickywave/measures.hpp"
#include "stickywave/mspd.hpp"
#include "stickywave/properties.hpp"
#include "stickywave/reference.hpp"
#include "stickywave/spd.hpp"

namespace stickywave::bench {

struct RunConfig {
  /// scalar | system | psystem. Informational; the subcommand decides what runs.
  std::string mode = "scalar";
  /// Scalar flux spec (burgers, concave_lwr, constant:c) or field spec
  /// (psystem:nu=..,kappa=.., constant:c1,c2,...), depending on the subcommand.
  std::string flux = "burgers";
  /// Measure specs: one datum for scalar runs, one per type for systems, the
  /// list of measures under study for quantize-study.
  std::vector<std::string> measures;
  std::vector<std::size_t> n;
  std::vector<double> t;
  double delta = 0.03;
  std::filesystem::path out = "out";
  std::size_t reference_resolution = std::size_t{1} << 16;
  bool oracle = true;
  std::uint64_t seed = 1;
  /// Instances per property suite in selftest.
  std::size_t instances = 1000;
  /// Worker threads; 0 picks the hardware concurrency.
  std::size_t threads = 0;
  /// Samples along x for field exports.
  std::size_t x_points = 201;
};

/// Reads a JSON document whose keys mirror RunConfig. `n` and `t` accept
/// either arrays or list strings. Unknown keys are a ValidationError.
RunConfig load_config(const std::filesystem::path& path);
RunConfig config_from_json_text(std::string_view text);

/// Comma-separated items, each a number, `2^a..2^b` (powers of two) or
/// `a..b[:step]` (arithmetic range, step 1 by default).
std::vector<std::size_t> parse_n_list(std::string_view text);
/// Comma-separated numbers or `a..b:step` ranges.
std::vector<double> parse_t_list(std::string_view text);

/// Rejects configurations that no subcommand can run (n = 0, t < 0, delta <= 0, ...).
void validate(const RunConfig& cfg);

/// Runs fn(0), ..., fn(count - 1) on `threads` workers. Each call must write
/// only to its own slot; the first exception is rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

struct ErrorRecord {
  std::string label;
  std::size_t n = 0;
  double delta = 0.0;
  double t = 0.0;
  double l1_error = 0.0;
  double wall_seconds = 0.0;
  /// Set when the error is infinite (heavy tail without a first moment).
  bool sentinel = false;
};

struct SlopeFit {
  std::string label;
  double t = 0.0;
  /// Least-squares slope of log(error) against log(n) (or log(delta)).
  double loglog_slope = 0.0;
  /// Slope of ln(error) against log2(n): loglog_slope * ln 2.
  double slope_per_doubling = 0.0;
};

struct ConvergenceReport {
  std::vector<ErrorRecord> rows;
  std::vector<SlopeFit> fits;
};

/// Ground truth for the scalar studies: the exact Burgers solution for atomic
/// data, otherwise the particle reference at the configured resolution.
class ScalarReference {
 public:
  ScalarReference(const FluxModel& flux, const Measure1D& m, double t, std::size_t resolution);
  bool exact() const { return exact_.has_value(); }
  /// L1 distance between the CDF of `particles` and the reference CDF.
  double distance(const DiscreteMeasure& particles) const;

 private:
  std::optional<Measure1D> exact_;
  DiscreteMeasure particles_;
};

/// For every (n, t): quantize, run SPD, measure the L1 distance of the CDFs
/// to the reference. One slope fit per t over all n with a positive error.
ConvergenceReport scalar_convergence(const RunConfig& cfg);

std::vector<ScalarSample> scalar_field(const RunConfig& cfg);

struct SystemRun {
  std::vector<double> times;
  /// states[s] is the iterated-scheme configuration at times[s].
  std::vector<MultiConfig> states;
  bool oracle_ran = false;
  MspdResult exact;
  std::vector<PSystemSample> psystem_field;
};
SystemRun system_run(const RunConfig& cfg);

struct DeltaStudy {
  std::vector<ErrorRecord> rows;
  /// Fitted order of sup-error against delta per n; NaN when some error is at
  /// rounding level (1e-12), i.e. the scheme mistimed nothing.
  std::vector<SlopeFit> fits;
};
/// e(delta) = max over the output times of ||MSPD - iterated TSPD||_1, for
/// delta, delta/2, delta/4, delta/8.
DeltaStudy delta_study(const RunConfig& cfg);

struct QuantizeRecord {
  std::string label;
  std::size_t n = 0;
  double w1 = 0.0;
  bool sentinel = false;
  /// I / sqrt(n) with I = integral of sqrt(F(1 - F)); infinite when I diverges.
  double sqrt_bound = 0.0;
};
struct QuantizeFit {
  std::string label;
  double slope = 0.0;
  bool sentinel = false;
};
struct QuantizeStudy {
  std::vector<QuantizeRecord> rows;
  std::vector<QuantizeFit> fits;
};
QuantizeStudy quantize_study(const RunConfig& cfg);

/// Best-of-`repeats` seconds for one spd_positions query on n random particles.
double time_scalar_solve(std::size_t n, std::uint64_t seed, int repeats = 3);

// Writers: create cfg.out if needed and return the paths written.
std::vector<std::filesystem::path> cmd_scalar_convergence(const RunConfig& cfg);
std::vector<std::filesystem::path> cmd_scalar_field(const RunConfig& cfg);
std::vector<std::filesystem::path> cmd_system_run(const RunConfig& cfg);
std::vector<std::filesystem::path> cmd_delta_study(const RunConfig& cfg);
std::vector<std::filesystem::path> cmd_quantize_study(const RunConfig& cfg);
/// Writes selftest.csv; `all_passed` reports the verdict.
std::vector<std::filesystem::path> cmd_selftest(const RunConfig& cfg, bool& all_passed);

}  // namespace stickywave::bench
