// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "stickywave/bench.hpp"
#include "stickywave/flux_models.hpp"
#include "stickywave/measures.hpp"
#include "stickywave/mspd.hpp"
#include "stickywave/numerics.hpp"
#include "stickywave/properties.hpp"
#include "stickywave/quadrature.hpp"

using namespace stickywave;

namespace {

constexpr std::size_t kInstances = 1000;
constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [" << what << "]";
    }
  }
};

int failures = 0;

void criterion(const char* name, double budget_seconds, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.require(false, std::string("exception: ") + e.what());
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream budget;
  budget << "runtime " << elapsed << " s > " << budget_seconds << " s";
  out.require(elapsed < budget_seconds, budget.str());
  if (!out.ok) ++failures;
  std::printf("%s %-34s %8.3f s %s\n", out.ok ? "PASS" : "FAIL", name, elapsed, out.detail.str().c_str());
  std::fflush(stdout);
}

void suite(Outcome& out, const PropertyResult& r) {
  std::ostringstream s;
  s << r.name << " failures=" << r.failures << "/" << r.instances << " worst_margin=" << r.worst_margin;
  if (!r.passed()) s << " first=" << r.first_failure;
  out.require(r.passed() && r.instances == kInstances, s.str());
  if (r.passed()) out.detail << " " << r.name << ":" << r.instances;
}

}  // namespace

int main() {
  criterion("exact-error-law", 5.0, [](Outcome& out) {
    bench::RunConfig cfg;
    cfg.measures = {"heaviside:0"};
    cfg.n = bench::parse_n_list("2..512:2");
    cfg.t = {1.0, 10.0, 50.0};
    double worst = 0.0;
    std::size_t cells = 0;
    for (const auto& r : bench::scalar_convergence(cfg).rows) {
      worst = std::max(worst, std::abs(r.l1_error - r.t / (4.0 * r.n)));
      ++cells;
    }
    out.detail << " cells=" << cells << " max_dev=" << worst;
    out.require(cells == 768, "expected 768 (n, t) cells");
    out.require(worst <= 1e-9, "deviation above 1e-9");
  });

  criterion("two-atom-slope", 60.0, [](Outcome& out) {
    bench::RunConfig cfg;
    cfg.measures = {"atoms:-1@0.5,1@0.5"};
    cfg.n = bench::parse_n_list("2^1..2^9");
    cfg.t = bench::parse_t_list("10..50:10");
    const auto fits = bench::scalar_convergence(cfg).fits;
    out.require(fits.size() == 5, "expected five fits");
    for (const auto& f : fits) {
      out.detail << " t=" << f.t << ":" << f.slope_per_doubling;
      out.require(std::abs(f.slope_per_doubling + 0.693) <= 0.01, "slope off -0.693");
    }
  });

  criterion("uniform-quantizer", 10.0, [](Outcome& out) {
    for (auto [a, b] : {std::pair{0.0, 1.0}, std::pair{-3.0, 5.0}}) {
      const Measure1D m = measures::uniform(a, b);
      const double scaled = 4096.0 * w1(m, optimal_quantize(m, 4096));
      const double rel = std::abs(scaled / ((b - a) / 4.0) - 1.0);
      out.detail << " n*W1/((b-a)/4)-1=" << rel;
      out.require(rel <= 0.02, "uniform limit outside 2%");
    }
    // Compact support [a, b]: W1 of the optimal quantizer is at most (b - a) / (2n).
    const std::vector<std::pair<std::string, double>> compact{{"uniform:0,1", 1.0},
                                                              {"uniform:-2,7", 9.0},
                                                              {"atoms:-1@0.3,0.5@0.2,2@0.5", 3.0},
                                                              {"heaviside:0", 0.0}};
    std::size_t checks = 0;
    for (const auto& [spec, width] : compact) {
      const Measure1D m = measures::parse(spec);
      for (std::size_t n : {1u, 2u, 3u, 7u, 16u, 100u, 1000u}) {
        const double d = w1(m, optimal_quantize(m, n));
        out.require(d <= width / (2.0 * n) + 1e-12, spec + " bound fails at n=" + std::to_string(n));
        ++checks;
      }
    }
    out.detail << " compact_checks=" << checks;
  });

  criterion("tail-rates", 60.0, [](Outcome& out) {
    bench::RunConfig cfg;
    cfg.measures = {"pareto:1.5", "pareto:2", "pareto:3", "stretchedexp:1"};
    cfg.n = bench::parse_n_list("2^1..2^14");
    const auto fits = bench::quantize_study(cfg).fits;
    for (const auto& f : fits) {
      out.detail << " " << f.label << ":" << f.slope;
      out.require(!f.sentinel, f.label + " sentinel");
      if (f.label.starts_with("pareto:")) {
        const double alpha = std::stod(f.label.substr(7));
        out.require(std::abs(f.slope - (-1.0 + 1.0 / alpha)) <= 0.1, f.label + " rate");
      } else {
        out.require(f.slope >= -1.0 && f.slope <= -0.85, f.label + " rate");
      }
    }
  });

  criterion("oracle-equivalence", 120.0, [](Outcome& out) {
    suite(out, properties::hull_vs_events(kSeed, kInstances));
    suite(out, properties::one_step_bound(kSeed, kInstances));
    const std::vector<std::vector<std::string>> data{{"laplace:0.1,1", "laplace:-0.1,1"},
                                                     {"laplace:-4,1", "heaviside:0"}};
    for (const auto& measures : data) {
      bench::RunConfig cfg;
      cfg.mode = "psystem";
      cfg.flux = "psystem:nu=0.5,kappa=5";
      cfg.measures = measures;
      cfg.n = {20};
      cfg.t = {2.0};
      cfg.delta = 0.2;
      const auto study = bench::delta_study(cfg);
      const double order = study.fits.front().loglog_slope;
      out.detail << " order(" << measures[0] << ")=" << order;
      out.require(order >= 0.9, "delta order below 0.9");
    }
  });

  criterion("inequality-suites", 120.0, [](Outcome& out) {
    suite(out, properties::stability(kSeed, kInstances));
    suite(out, properties::contraction(kSeed, kInstances));
    suite(out, properties::two_flux(kSeed, kInstances));
    suite(out, properties::ush_gap_decrease(kSeed, kInstances));
    suite(out, properties::momentum(kSeed, kInstances));
    suite(out, properties::finite_speed(kSeed, kInstances));
  });

  criterion("psystem-certificates", 60.0, [](Outcome& out) {
    const PSystemModel model(0.5, 5.0);
    const double integral =
        quadrature::integrate([&](double u) { return model.sound_speed(u); }, 0.0, model.nu(), {.abs_tol = 1e-13})
            .value;
    out.detail << " normalisation=" << integral << " ell=" << model.ell();
    out.require(std::abs(integral - 1.0) <= 1e-8, "normalisation");
    out.require(std::abs(model.ell() - 1.12732) <= 1e-4, "ell");
    const FieldModel fields = model.fields();
    out.require(std::abs(fields.ush_gap - 2.0 * model.ell()) <= 1e-12, "gap != 2 ell");
    out.require(audit(fields).ok(), "field audit");

    suite(out, properties::psystem_gap_growth(kSeed, kInstances));

    const auto pair = [](const char* a, const char* b) {
      return MultiConfig(std::vector<std::vector<double>>{optimal_quantize(measures::parse(a), 20).vector(),
                                                          optimal_quantize(measures::parse(b), 20).vector()});
    };
    // Ordered datum: until the first crossing every cross-type gap grows by at least 2 ell t.
    const MultiConfig ordered = pair("laplace:0.1,1", "laplace:-0.1,1");
    const MspdResult run = mspd_exact(ordered, fields, 6.0);
    const double first_cross = run.crossings.empty() ? 6.0 : run.crossings.front().time;
    const double probe = 0.999 * first_cross;
    const MultiConfig at = mspd_exact(ordered, fields, probe).state;
    double worst = INFINITY;
    for (std::size_t i = 0; i < 20; ++i) {
      for (std::size_t j = 0; j < 20; ++j) {
        const double before = ordered.at(0, i) - ordered.at(1, j);
        if (before <= 0.0) continue;  // only pairs with the w- particle to the right
        worst = std::min(worst, (at.at(0, i) - at.at(1, j)) - (before + 2.0 * model.ell() * probe));
      }
    }
    out.detail << " ordered_margin=" << worst << " clusters=" << run.cluster_events.size();
    out.require(worst >= -1e-9, "ordered gap growth");
    out.require(run.cluster_events.empty(), "ordered datum formed a cluster");

    const MspdResult shock = mspd_exact(pair("laplace:-4,1", "heaviside:0"), fields, 6.0);
    const auto form = std::ranges::find_if(shock.cluster_events,
                                           [](const ClusterEvent& e) { return e.kind == ClusterEventKind::form; });
    const bool broke = form != shock.cluster_events.end() &&
                       std::any_of(form, shock.cluster_events.end(),
                                   [](const ClusterEvent& e) { return e.kind == ClusterEventKind::split; });
    out.detail << " shock_form_then_split=" << (broke ? "yes" : "no");
    out.require(broke, "shock datum: no formation followed by break-up");
  });

  criterion("performance", 60.0, [](Outcome& out) {
    const double big = bench::time_scalar_solve(1'000'000, kSeed, 3);
    out.detail << " n=1e6:" << big << "s";
    out.require(big < 1.0, "n = 1e6 query over 1 s");
    std::vector<double> log_n;
    std::vector<double> log_t;
    for (int p = 10; p <= 20; p += 2) {
      const std::size_t n = std::size_t{1} << p;
      log_n.push_back(std::log(static_cast<double>(n)));
      log_t.push_back(std::log(bench::time_scalar_solve(n, kSeed + p, 5)));
    }
    const double slope = least_squares_slope(log_n, log_t);
    out.detail << " timing_slope=" << slope;
    out.require(slope <= 1.2, "timing slope above 1.2");
  });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
