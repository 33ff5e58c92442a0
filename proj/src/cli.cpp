#include "levymc/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "levymc/oracle.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace levymc {

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(seed + kGolden * (a + 1)) + kGolden * (b + 1));
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return 0.0;
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

std::string case_advisory(const LevyModel& model, const std::string& mode) {
  if (mode != "case1" && mode != "case2") return "";
  try {
    const double r1 = model.g_inverse(std::exp2(30.0)) * std::pow(std::exp2(30.0), 0.75);
    const double r2 = model.g_inverse(std::exp2(40.0)) * std::pow(std::exp2(40.0), 0.75);
    const bool case2_regime = r2 <= r1;  // g^{-1}(x) decays at least like x^{-3/4}
    if (case2_regime && mode == "case1")
      return "note: g^{-1}(x) x^{3/4} is nonincreasing at large x; case2 schedules "
             "likely apply to this model\n";
    if (!case2_regime && mode == "case2")
      return "note: g^{-1}(x) x^{3/4} is increasing at large x; case1 schedules "
             "likely apply to this model\n";
  } catch (const UnsupportedMeasureError&) {
  }
  return "";
}

}  // namespace

std::string cmd_estimate(const ExperimentConfig& cfg, int workers) {
  const LevelSchedule sched = build_schedule(cfg.model, cfg.schedule);
  const MlmcResult res =
      estimate(cfg.model, cfg.coefficient, cfg.y0, cfg.payoff, sched, cfg.seed, workers);
  return result_to_json(res).dump(2) + "\n";
}

std::string cmd_rates(const ExperimentConfig& cfg, int workers) {
  if (!cfg.sweep) throw ConfigError("rates: config must contain a 'sweep' section");
  if (cfg.schedule.mode == "manual")
    throw ConfigError("rates: sweep requires a scheduled mode (case1 or case2)");

  // reference value: closed form when available, otherwise a fine-parameter
  // single-level simulation anchored to the largest schedule in the sweep
  const bool closed_ok = cfg.coefficient.is_constant() &&
                         cfg.payoff.kind() == Payoff::Kind::terminal;
  double ref = 0.0;
  if (cfg.reference.mode == "closed_form" ||
      (cfg.reference.mode == "auto" && closed_ok)) {
    ref = closed_form_sf(cfg.model, cfg.coefficient, cfg.y0, cfg.payoff);
  } else {
    const double tau_max =
        *std::max_element(cfg.sweep->tau_list.begin(), cfg.sweep->tau_list.end());
    const LevelSchedule finest = build_schedule(cfg.model, cfg.schedule, tau_max);
    const double eps_ref = finest.eps.back() / 4.0;
    const double h_ref = finest.h.back() / 2.0;
    ref = reference_estimate(cfg.model, cfg.coefficient, cfg.y0, cfg.payoff, eps_ref, h_ref,
                             cfg.reference.n, mix64(cfg.seed ^ 0x7265666572656eULL), workers)
              .value;
  }

  std::ostringstream csv;
  csv << "tau,cost,abs_error,stderr,repetitions\n";
  std::vector<double> taus, errors;
  for (std::size_t ti = 0; ti < cfg.sweep->tau_list.size(); ++ti) {
    const double tau = cfg.sweep->tau_list[ti];
    const LevelSchedule sched = build_schedule(cfg.model, cfg.schedule, tau);
    double sq = 0.0, se = 0.0;
    for (int rep = 0; rep < cfg.sweep->repetitions; ++rep) {
      const MlmcResult r =
          estimate(cfg.model, cfg.coefficient, cfg.y0, cfg.payoff, sched,
                   derived_seed(cfg.seed, ti, static_cast<std::uint64_t>(rep)), workers);
      sq += (r.estimate - ref) * (r.estimate - ref);
      se += r.stderr_value;
    }
    const double reps = static_cast<double>(cfg.sweep->repetitions);
    const double rms = std::sqrt(sq / reps);
    csv << fmt(tau) << ',' << fmt(cost(sched)) << ',' << fmt(rms) << ',' << fmt(se / reps)
        << ',' << cfg.sweep->repetitions << '\n';
    taus.push_back(tau);
    errors.push_back(rms);
  }
  char slope[64];
  std::snprintf(slope, sizeof slope, "# loglog_slope %.6f\n", fit_loglog_slope(taus, errors));
  csv << slope;
  return csv.str();
}

std::string cmd_levels(const ExperimentConfig& cfg, int workers) {
  const LevelSchedule sched = build_schedule(cfg.model, cfg.schedule);
  const auto profile = level_profile(cfg.model, cfg.coefficient, cfg.y0, cfg.payoff, sched,
                                     cfg.seed, cfg.n_probe, workers);
  std::ostringstream csv;
  csv << "k,n,eps,h,mean,var,envelope,breakpoints\n";
  for (const auto& st : profile) {
    csv << st.k << ',' << st.n << ',' << fmt(st.eps) << ',' << fmt(st.h) << ','
        << fmt(st.mean) << ',' << fmt(st.var) << ',' << fmt(st.envelope) << ','
        << fmt(st.breakpoints) << '\n';
  }
  return csv.str();
}

namespace {

struct CheckLog {
  std::ostringstream report;
  bool all_ok = true;
  void line(const std::string& name, bool ok, const std::string& detail) {
    report << "check " << name << ": " << (ok ? "PASS" : "FAIL");
    if (!detail.empty()) report << " (" << detail << ")";
    report << '\n';
    all_ok = all_ok && ok;
  }
  void skip(const std::string& name, const std::string& why) {
    report << "check " << name << ": SKIP (" << why << ")\n";
  }
};

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i)
    v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return v;
}

}  // namespace

VerifyOutcome cmd_verify(const ExperimentConfig& cfg, int workers) {
  CheckLog log;
  const LevyModel& model = cfg.model;

  // coefficient Lipschitz spot check
  {
    RngSequence seq(mix64(0x636f656666ULL));
    const auto [ratio, at_y0] = cfg.coefficient.spot_check(cfg.y0, seq, 200);
    const double declared = std::max(cfg.coefficient.lipschitz_const(), 0.0);
    const bool ok = ratio <= declared * (1.0 + 1e-6) + 1e-12;
    log.line("coefficient-lipschitz", ok,
             "max ratio " + fmt(ratio) + ", declared " + fmt(declared) + ", |a(y0)| " +
                 fmt(at_y0));
  }

  LevelSchedule sched;
  bool have_schedule = false;
  try {
    sched = build_schedule(model, cfg.schedule);
    have_schedule = true;
  } catch (const ConfigError& e) {
    log.line("schedule-preconditions", false, e.what());
  } catch (const TauTooSmallError& e) {
    log.line("schedule-preconditions", false, e.what());
  } catch (const UnsupportedMeasureError& e) {
    log.line("schedule-preconditions", false, e.what());
  }

  if (have_schedule) {
    bool ok = sched.eps[0] <= 1.0;
    std::string why = ok ? "" : "eps_1 > 1";
    for (int k = 0; k < sched.m && ok; ++k) {
      if (sched.tail_masses[k] > 1.0 / sched.eps[k]) {
        ok = false;
        why = "tail_mass(h_" + std::to_string(k + 1) + ") exceeds 1/eps";
      }
    }
    if (ok && sched.correction) {
      const Eigen::MatrixXd C = model.small_jump_cov(sched.h.back());
      const double err =
          (sched.correction_factor * sched.correction_factor.transpose() - C).norm();
      if (err > 1e-10 * (1.0 + C.norm())) {
        ok = false;
        why = "correction factor does not reassemble the small-jump covariance";
      }
    }
    log.line("schedule-preconditions", ok, ok ? "m = " + std::to_string(sched.m) : why);
  }

  // analytic quantities against quadrature on the raw density
  if (std::holds_alternative<FiniteActivity>(model.measure())) {
    // atomic measure: analytic quantities are finite sums; check partitions
    const double h = 0.5 * std::get<FiniteActivity>(model.measure())
                               .atoms.front()
                               .x.norm();
    const double part = model.f_small(h) + model.tail_second_moment(h);
    const double cs = model.f_zero(h).squaredNorm();
    const double cs_bound = model.tail_second_moment(h) * model.tail_mass(h);
    const bool ok = std::fabs(part - model.second_moment()) <=
                        1e-12 * (1.0 + model.second_moment()) &&
                    cs <= cs_bound * (1.0 + 1e-12);
    log.line("analytic-quantities", ok, "atomic sums partition the second moment");
  } else {
    const auto [r_lo, r_hi] = model.radial_support();
    double worst = 0.0;
    for (double h : log_spaced(std::max(r_lo * 1.5, r_hi * 1e-3), r_hi * 0.999, 8)) {
      const double lam_q = integrate_adaptive(
          [&](double s) {
            const double r = std::exp(s);
            return model.radial_density(r) * r;
          },
          std::log(h), std::log(r_hi), 1e-10, 1e-14);
      const double f_q = integrate_adaptive(
          [&](double s) {
            const double r = std::exp(s);
            return r * r * model.radial_density(r) * r;
          },
          (r_lo > 0.0 ? std::log(r_lo) : std::log(h) - 60.0), std::log(h), 1e-10, 1e-14);
      worst = std::max(worst,
                       std::fabs(lam_q - model.tail_mass(h)) / (1.0 + model.tail_mass(h)));
      worst = std::max(worst, std::fabs(f_q - model.f_small(h)) / (1.0 + model.f_small(h)));
      worst = std::max(worst, std::fabs(model.small_jump_cov(h).trace() - model.f_small(h)) /
                                  (1.0 + model.f_small(h)));
    }
    log.line("analytic-quantities", worst <= 1e-6, "max rel deviation " + fmt(worst));
  }

  // g domination, the doubling condition and the UE assumption
  try {
    const auto [r_lo, r_hi] = std::holds_alternative<FiniteActivity>(model.measure())
                                  ? std::pair<double, double>{0.0, 1.0}
                                  : model.radial_support();
    double worst = -1e300;
    bool dom_ok = true;
    for (double h : log_spaced(std::max(r_lo * 1.5, r_hi * 1e-3), r_hi, 20)) {
      double lhs;
      if (const auto* fa = std::get_if<FiniteActivity>(&model.measure())) {
        lhs = 0.0;
        for (const auto& atom : fa->atoms)
          lhs += atom.mass * std::min(atom.x.squaredNorm() / (h * h), 1.0);
      } else {
        lhs = clipped_quadratic_mass(model, h);
      }
      const double rhs = model.g_bound(h);
      worst = std::max(worst, lhs / rhs - 1.0);
      if (lhs > rhs * (1.0 + 1e-6)) dom_ok = false;
    }
    log.line("g-domination", dom_ok, "max lhs/g - 1 = " + fmt(worst));

    const auto g = model.power_law_g();
    const double threshold = std::exp2(1.0 - 1.0 / g->exponent);
    if (threshold <= 1.0) {
      log.line("doubling", false,
               "power-law exponent " + fmt(g->exponent) +
                   " admits no doubling gamma in (1,2)");
    } else {
      const double gamma = std::min(1.2, 1.0 + 0.9 * (threshold - 1.0));
      const auto rep =
          model.validate_doubling(gamma, log_spaced(r_hi * 1e-4, r_hi, 16));
      log.line("doubling", rep.pass,
               "gamma " + fmt(gamma) + ", threshold " + fmt(rep.threshold));
    }
  } catch (const UnsupportedMeasureError&) {
    log.skip("g-domination", "no dominating g registered for this measure");
    log.skip("doubling", "no dominating g registered for this measure");
  }

  {
    double h_hi = 1.0;
    if (std::holds_alternative<FiniteActivity>(model.measure())) {
      for (const auto& atom : std::get<FiniteActivity>(model.measure()).atoms)
        h_hi = std::max(h_hi, atom.x.norm() * 1.001);
    } else {
      h_hi = model.radial_support().second;
    }
    try {
      const UEReport rep = model.check_ue(log_spaced(h_hi * 1e-3, h_hi, 12), 64);
      log.line("ue", rep.pass,
               "theta " + fmt(rep.theta) + ", subspace dim " +
                   std::to_string(rep.subspace_dim));
    } catch (const DegenerateSmallJumpsError& e) {
      log.line("ue", false, e.what());
    }
  }

  // coupled fine marginal against a direct single-level simulation
  if (have_schedule && sched.m >= 2) {
    const LevelParams pf{sched.eps[sched.m - 1], sched.h[sched.m - 1],
                         sched.correction_factor};
    const LevelParams pc{sched.eps[sched.m - 2], sched.h[sched.m - 2],
                         sched.correction_factor};
    int passes = 0;
    const int n = 4000;
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<double> xs(n), ys(n);
      const RngStream sa(derived_seed(cfg.seed, 91, trial));
      const RngStream sb(derived_seed(cfg.seed, 92, trial));
      for (int i = 0; i < n; ++i) {
        xs[i] = cfg.payoff.evaluate(
            simulate_pair(model, cfg.coefficient, cfg.y0, pf, pc, sa.child(i)).first);
        ys[i] = cfg.payoff.evaluate(
            simulate_level(model, cfg.coefficient, cfg.y0, pf, sb.child(i)));
      }
      if (ks_two_sample(xs, ys).second > 0.01) ++passes;
    }
    log.line("coupling-ks", passes >= 2, std::to_string(passes) + "/3 trials with p > 0.01");
  } else if (have_schedule) {
    log.skip("coupling-ks", "single-level schedule");
  }

  // byte-stable output across repeated runs and worker counts
  if (have_schedule) {
    LevelSchedule mini = sched;
    for (auto& nk : mini.n) nk = std::min<std::int64_t>(nk, 32);
    const auto run = [&](int w) {
      return result_to_json(estimate(model, cfg.coefficient, cfg.y0, cfg.payoff, mini,
                                     cfg.seed, w))
          .dump();
    };
    const std::string a = run(1);
    const std::string b = run(1);
    const std::string c = run(std::max(2, workers));
    log.line("determinism", a == b && a == c, "1 vs 1 vs multi-worker byte comparison");
  }

  log.report << (log.all_ok ? "verify: all checks passed\n" : "verify: FAILURES above\n");
  return {log.all_ok, log.report.str()};
}

CommandOutput run_command(const std::vector<std::string>& args) {
  CLI::App app{"multilevel Monte Carlo estimator for Levy-driven SDEs"};
  app.require_subcommand(1);

  struct SubOpts {
    std::string config;
    std::uint64_t seed = 0;
    int workers = 0;
    std::string out;
    CLI::App* sub = nullptr;
    CLI::Option* seed_opt = nullptr;
  };
  std::map<std::string, SubOpts> subs;
  for (const char* name : {"estimate", "rates", "levels", "verify"}) {
    SubOpts& o = subs[name];
    o.sub = app.add_subcommand(name);
    o.sub->add_option("--config", o.config, "experiment config JSON")->required();
    o.seed_opt = o.sub->add_option("--seed", o.seed, "override the config seed");
    o.sub->add_option("--workers", o.workers, "worker threads (0 = library default)");
    o.sub->add_option("--out", o.out, "write output to a file instead of stdout");
  }

  std::vector<std::string> full = {"levymc"};
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const auto& s : full) argv.push_back(s.c_str());

  CommandOutput result;
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    std::ostringstream out, err;
    result.code = app.exit(e, out, err);
    result.out = out.str();
    result.err = err.str();
    return result;
  }

  const std::string chosen = app.get_subcommands().front()->get_name();
  SubOpts& o = subs[chosen];
  try {
    std::ifstream in(o.config);
    if (!in) throw ConfigError("cannot open config file: " + o.config);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig cfg = config_from_json(doc);
    if (o.seed_opt->count() > 0) cfg.seed = o.seed;

    if (chosen == "estimate" || chosen == "rates")
      result.err += case_advisory(cfg.model, cfg.schedule.mode);

    if (chosen == "estimate") {
      result.out = cmd_estimate(cfg, o.workers);
    } else if (chosen == "rates") {
      result.out = cmd_rates(cfg, o.workers);
    } else if (chosen == "levels") {
      result.out = cmd_levels(cfg, o.workers);
    } else {
      const VerifyOutcome v = cmd_verify(cfg, o.workers);
      result.out = v.report;
      result.code = v.ok ? 0 : 1;
    }
    if (!o.out.empty()) {
      std::ofstream f(o.out, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write output file: " + o.out);
      f << result.out;
      result.out.clear();
    }
  } catch (const ConfigError& e) {
    result.code = 2;
    result.err += std::string("error: ") + e.what() + "\n";
  } catch (const TauTooSmallError& e) {
    result.code = 2;
    result.err += std::string("error: ") + e.what() + "\n";
  } catch (const UnsupportedMeasureError& e) {
    result.code = 2;
    result.err += std::string("error: ") + e.what() + "\n";
  } catch (const DimensionMismatchError& e) {
    result.code = 2;
    result.err += std::string("error: ") + e.what() + "\n";
  } catch (const std::invalid_argument& e) {
    result.code = 2;
    result.err += std::string("error: ") + e.what() + "\n";
  } catch (const std::exception& e) {
    result.code = 3;
    result.err += std::string("error: ") + e.what() + "\n";
  }
  return result;
}

}  // namespace levymc
