#include "levymc/mlmc.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace levymc {

namespace {

struct Kahan {
  double sum = 0.0, c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

double kahan_mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  Kahan k;
  for (double x : v) k.add(x);
  return k.sum / static_cast<double>(v.size());
}

double kahan_var(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  Kahan k;
  for (double x : v) k.add((x - mean) * (x - mean));
  return k.sum / static_cast<double>(v.size() - 1);
}

int resolve_workers(int workers) {
#ifdef _OPENMP
  return workers > 0 ? workers : omp_get_max_threads();
#else
  (void)workers;
  return 1;
#endif
}

void validate_dims(const LevyModel& model, const CoefficientField& coeff,
                   const Eigen::VectorXd& y0, const Payoff& payoff) {
  if (coeff.dim_x() != model.dim_x())
    throw DimensionMismatchError("estimate: coefficient dim_x does not match the model");
  if (y0.size() != coeff.dim_y())
    throw DimensionMismatchError("estimate: y0 dimension does not match the coefficient");
  payoff.check_dim(coeff.dim_y());
}

LevelSchedule finalize(const LevyModel& model, LevelSchedule s) {
  const std::size_t m = s.h.size();
  if (m == 0 || s.eps.size() != m || s.n.size() != m)
    throw std::invalid_argument("schedule: eps, h, n must be non-empty and equally long");
  // manual plans may repeat a level (degenerate pairs are a useful test
  // device); scheduled plans are strictly decreasing by construction
  const bool strict = s.provenance != LevelSchedule::Provenance::manual;
  for (std::size_t k = 0; k < m; ++k) {
    if (!(s.eps[k] > 0.0) || !(s.h[k] > 0.0))
      throw std::invalid_argument("schedule: eps and h must be positive");
    if (s.n[k] < 1) throw std::invalid_argument("schedule: n_k must be >= 1");
    if (k > 0) {
      const bool ok = strict ? (s.eps[k] < s.eps[k - 1] && s.h[k] < s.h[k - 1])
                             : (s.eps[k] <= s.eps[k - 1] && s.h[k] <= s.h[k - 1]);
      if (!ok) throw std::invalid_argument("schedule: eps and h must be decreasing");
    }
  }
  s.m = static_cast<int>(m);
  s.tail_masses.resize(m);
  for (std::size_t k = 0; k < m; ++k) s.tail_masses[k] = model.tail_mass(s.h[k]);
  const int d = model.dim_x();
  s.correction_factor = s.correction ? cov_factor(model.small_jump_cov(s.h[m - 1]))
                                     : Eigen::MatrixXd::Zero(d, d);
  return s;
}

// schedule arithmetic shared by the TauTooSmall searches
bool case1_feasible(double tau, double c1, double c2) {
  if (!(tau > 1.0)) return false;
  const double m = std::floor(std::log2(c1 * std::pow(tau * std::log(tau), 2.0 / 3.0)));
  const double base = c2 * std::cbrt(tau) / std::pow(std::log(tau), 2.0 / 3.0);
  return m >= 2.0 && std::floor(base) >= 1.0;
}

double min_feasible_tau(const std::function<bool(double)>& ok) {
  double hi = 2.0;
  while (!ok(hi) && hi < 1e18) hi *= 2.0;
  if (hi >= 1e18) return hi;
  double lo = hi / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

LevelSchedule make_manual(const LevyModel& model, std::vector<double> eps,
                          std::vector<double> h, std::vector<std::int64_t> n,
                          bool correction) {
  LevelSchedule s;
  s.provenance = LevelSchedule::Provenance::manual;
  s.eps = std::move(eps);
  s.h = std::move(h);
  s.n = std::move(n);
  s.correction = correction;
  return finalize(model, std::move(s));
}

LevelSchedule schedule_case1(const LevyModel& model, double tau, double c1, double c2,
                             bool correction) {
  if (!case1_feasible(tau, c1, c2)) {
    const double admissible =
        min_feasible_tau([&](double t) { return case1_feasible(t, c1, c2); });
    throw TauTooSmallError("schedule_case1: tau too small, minimal admissible tau ~ " +
                               std::to_string(admissible),
                           admissible);
  }
  LevelSchedule s;
  s.provenance = LevelSchedule::Provenance::case1;
  s.tau = tau;
  s.c1 = c1;
  s.c2 = c2;
  s.correction = correction;
  const int m =
      static_cast<int>(std::floor(std::log2(c1 * std::pow(tau * std::log(tau), 2.0 / 3.0))));
  const double base = c2 * std::cbrt(tau) / std::pow(std::log(tau), 2.0 / 3.0);
  const double ginv_m = model.g_inverse(std::exp2(m));
  for (int k = 1; k <= m; ++k) {
    s.eps.push_back(std::exp2(-k));
    s.h.push_back(model.g_inverse(std::exp2(k)));
    const double nk = std::floor(base * s.h.back() / ginv_m);
    s.n.push_back(std::max<std::int64_t>(1, static_cast<std::int64_t>(nk)));
  }
  return finalize(model, std::move(s));
}

double gstar_solve(const LevyModel& model, double tau, double rel_tol) {
  if (!(tau > 0.0)) throw std::invalid_argument("gstar_solve: tau must be positive");
  auto phi = [&](double x) {
    const double gi = model.g_inverse(x);
    return x * x * x * gi * gi / std::log(x);
  };
  double lo = std::numbers::e;
  if (phi(lo) >= tau) return lo;
  double hi = lo;
  while (phi(hi) < tau) {
    hi *= 2.0;
    if (hi > std::ldexp(1.0, 60))
      throw std::runtime_error("gstar_solve: no solution inside the bracket [e, 2^60]");
  }
  lo = hi / 2.0;
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (phi(mid) >= tau ? hi : lo) = mid;
  }
  return hi;
}

LevelSchedule schedule_case2(const LevyModel& model, double tau, double c1, double c2,
                             bool correction) {
  auto feasible = [&](double t) {
    if (!(t > 0.0)) return false;
    double gs;
    try {
      gs = gstar_solve(model, t);
    } catch (const std::runtime_error&) {
      return false;
    }
    if (!(gs > 1.0) || !(std::log(gs) > 0.0)) return false;
    const double m = std::floor(std::log2(c1 * gs));
    const double base = c2 * gs * gs / std::log(gs);
    return m >= 2.0 && std::floor(base) >= 1.0;
  };
  if (!feasible(tau)) {
    const double admissible = min_feasible_tau(feasible);
    throw TauTooSmallError("schedule_case2: tau too small, minimal admissible tau ~ " +
                               std::to_string(admissible),
                           admissible);
  }
  LevelSchedule s;
  s.provenance = LevelSchedule::Provenance::case2;
  s.tau = tau;
  s.c1 = c1;
  s.c2 = c2;
  s.correction = correction;
  s.gstar = gstar_solve(model, tau);
  const int m = static_cast<int>(std::floor(std::log2(c1 * s.gstar)));
  const double base = c2 * s.gstar * s.gstar / std::log(s.gstar);
  const double ginv_m = model.g_inverse(std::exp2(m));
  for (int k = 1; k <= m; ++k) {
    s.eps.push_back(std::exp2(-k));
    s.h.push_back(model.g_inverse(std::exp2(k)));
    const double nk = std::floor(base * s.h.back() / ginv_m);
    s.n.push_back(std::max<std::int64_t>(1, static_cast<std::int64_t>(nk)));
  }
  return finalize(model, std::move(s));
}

double cost(const LevelSchedule& s) {
  double total = 0.0;
  for (int k = 0; k < s.m; ++k)
    total += static_cast<double>(s.n[k]) * (s.tail_masses[k] + 1.0 / s.eps[k] + 1.0);
  return total;
}

std::optional<double> cost_bound(const LevelSchedule& s) {
  if (s.m == 0 || s.eps[0] > 1.0) return std::nullopt;
  for (int k = 0; k < s.m; ++k)
    if (s.tail_masses[k] > 1.0 / s.eps[k]) return std::nullopt;
  double total = 0.0;
  for (int k = 0; k < s.m; ++k) total += static_cast<double>(s.n[k]) / s.eps[k];
  return 3.0 * total;
}

double level_envelope(const LevyModel& model, const LevelSchedule& s, int k) {
  if (k < 1 || k > s.m) throw std::invalid_argument("level_envelope: level out of range");
  double eps_prev, f_prev;
  if (k >= 2) {
    eps_prev = s.eps[k - 2];
    f_prev = model.f_small(s.h[k - 2]);
  } else if (s.provenance != LevelSchedule::Provenance::manual) {
    eps_prev = 1.0;
    f_prev = model.f_small(model.g_inverse(1.0));
  } else {
    eps_prev = 1.0;
    f_prev = model.second_moment();
  }
  return eps_prev * std::log(std::numbers::e / eps_prev) + f_prev;
}

namespace {

// One level's sample loop. Values land in preassigned slots and are reduced
// serially in index order, so the thread count never changes a bit of the
// output. Exceptions are recorded (lowest sample index wins) and rethrown
// after the loop.
template <typename Body>
void run_samples(std::int64_t n, int workers, const Body& body) {
  std::atomic<std::int64_t> bad_index(-1);
  std::exception_ptr error;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(workers) if (workers > 1)
#endif
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      std::int64_t cur = bad_index.load();
      while ((cur < 0 || i < cur) && !bad_index.compare_exchange_weak(cur, i)) {
      }
#ifdef _OPENMP
#pragma omp critical(levymc_sample_error)
#endif
      {
        if (bad_index.load() == i) error = std::current_exception();
      }
    }
  }
  if (bad_index.load() >= 0) {
    try {
      std::rethrow_exception(error);
    } catch (const NonFiniteStateError& e) {
      throw NonFiniteStateError(std::string(e.what()) + " (sample " +
                                    std::to_string(bad_index.load()) + ")",
                                e.time);
    }
  }
}

LevelStats run_level(const LevyModel& model, const CoefficientField& coeff,
                     const Eigen::VectorXd& y0, const Payoff& payoff,
                     const LevelSchedule& s, int k, std::int64_t n,
                     const RngStream& level_stream, int workers) {
  const LevelParams pf{s.eps[k - 1], s.h[k - 1], s.correction_factor};
  std::vector<double> vals(static_cast<std::size_t>(n));
  std::vector<double> bps(static_cast<std::size_t>(n));

  if (k == 1) {
    run_samples(n, workers, [&](std::int64_t i) {
      const PathSkeleton p =
          simulate_level(model, coeff, y0, pf, level_stream.child(static_cast<std::uint64_t>(i)));
      vals[static_cast<std::size_t>(i)] = payoff.evaluate(p);
      bps[static_cast<std::size_t>(i)] = static_cast<double>(p.size());
    });
  } else {
    const LevelParams pc{s.eps[k - 2], s.h[k - 2], s.correction_factor};
    run_samples(n, workers, [&](std::int64_t i) {
      const auto [fine, coarse] = simulate_pair(
          model, coeff, y0, pf, pc, level_stream.child(static_cast<std::uint64_t>(i)));
      vals[static_cast<std::size_t>(i)] = payoff.evaluate(fine) - payoff.evaluate(coarse);
      bps[static_cast<std::size_t>(i)] = static_cast<double>(fine.size());
    });
  }

  LevelStats st;
  st.k = k;
  st.n = n;
  st.mean = kahan_mean(vals);
  st.var = kahan_var(vals, st.mean);
  st.eps = s.eps[k - 1];
  st.h = s.h[k - 1];
  st.envelope = level_envelope(model, s, k);
  st.breakpoints = kahan_mean(bps);
  return st;
}

}  // namespace

MlmcResult estimate(const LevyModel& model, const CoefficientField& coeff,
                    const Eigen::VectorXd& y0, const Payoff& payoff,
                    const LevelSchedule& schedule, std::uint64_t seed, int workers) {
  validate_dims(model, coeff, y0, payoff);
  const int w = resolve_workers(workers);
  const RngStream root(seed);

  MlmcResult res;
  res.model_cost = cost(schedule);
  Kahan total;
  Kahan var_total;
  for (int k = 1; k <= schedule.m; ++k) {
    LevelStats st;
    try {
      st = run_level(model, coeff, y0, payoff, schedule, k, schedule.n[k - 1],
                     root.child(static_cast<std::uint64_t>(k)), w);
    } catch (const NonFiniteStateError& e) {
      throw NonFiniteStateError(std::string(e.what()) + " (level " + std::to_string(k) + ")",
                                e.time);
    }
    total.add(st.mean);
    var_total.add(st.var / static_cast<double>(st.n));
    res.levels.push_back(st);
  }
  res.estimate = total.sum;
  res.stderr_value = std::sqrt(var_total.sum);
  return res;
}

std::vector<LevelStats> level_profile(const LevyModel& model, const CoefficientField& coeff,
                                      const Eigen::VectorXd& y0, const Payoff& payoff,
                                      const LevelSchedule& schedule, std::uint64_t seed,
                                      std::int64_t n_probe, int workers) {
  if (n_probe < 100) throw std::invalid_argument("level_profile: n_probe must be >= 100");
  validate_dims(model, coeff, y0, payoff);
  const int w = resolve_workers(workers);
  const RngStream root(seed);
  std::vector<LevelStats> out;
  for (int k = 1; k <= schedule.m; ++k)
    out.push_back(run_level(model, coeff, y0, payoff, schedule, k, n_probe,
                            root.child(static_cast<std::uint64_t>(k)), w));
  return out;
}

}  // namespace levymc
