#include "levymc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

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

double simpson(double fa, double fm, double fb, double len) {
  return len / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double b, double fa,
                     double fm, double fb, double whole, double tol, double abs_floor,
                     int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  // the inverted comparison also stops the recursion on NaN
  if (depth <= 0 || !(std::fabs(delta) > 15.0 * std::max(tol, abs_floor)))
    return left + right + delta / 15.0;
  return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, abs_floor, depth - 1) +
         adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, abs_floor, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, double abs_floor) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = simpson(fa, fm, fb, b - a);
  const double tol = std::max(std::fabs(whole) * rel_tol, abs_floor);
  return adaptive_step(f, a, b, fa, fm, fb, whole, tol, abs_floor, 48);
}

double clipped_quadratic_mass(const LevyModel& model, double h, double rel_tol) {
  const auto [r_lo, r_hi] = model.radial_support();
  // fully log-space integrand: near alpha = 2 the mass below the clip is
  // spread over hundreds of log-decades, where the density itself overflows
  // a double even though the integrand does not
  const double log_h = std::log(h);
  auto integrand = [&](double s) {
    const double lw = std::min(2.0 * (s - log_h), 0.0);
    return std::exp(lw + model.log_radial_density(s) + s);
  };
  const double s_hi = std::log(r_hi);
  if (r_lo > 0.0)
    return integrate_adaptive(integrand, std::log(r_lo), s_hi, rel_tol, 1e-14);

  // support reaches the origin: extend the window downward in blocks until
  // the geometric-decay estimate of the remainder is negligible
  double hi = std::min(log_h, s_hi);
  double total = (hi < s_hi) ? integrate_adaptive(integrand, hi, s_hi, rel_tol, 1e-14) : 0.0;
  double prev_piece = -1.0;
  for (int block = 0; block < 500; ++block) {
    const double lo = hi - 30.0;
    const double piece = integrate_adaptive(integrand, lo, hi, rel_tol, 1e-14);
    total += piece;
    if (!(piece > 0.0)) break;  // dead region
    if (prev_piece > 0.0) {
      const double ratio = std::min(piece / prev_piece, 0.999);
      if (piece * ratio / (1.0 - ratio) <= 0.1 * rel_tol * total) break;
    } else if (piece <= 0.01 * rel_tol * total) {
      break;
    }
    prev_piece = piece;
    hi = lo;
  }
  return total;
}

ReferenceEstimate reference_estimate(const LevyModel& model, const CoefficientField& coeff,
                                     const Eigen::VectorXd& y0, const Payoff& payoff,
                                     double eps_ref, double h_ref, std::int64_t n,
                                     std::uint64_t seed, int workers) {
  if (n < 1000) throw std::invalid_argument("reference_estimate: n must be >= 1000");
  // a one-level schedule at the reference parameters
  const LevelSchedule s = make_manual(model, {eps_ref}, {h_ref}, {n});
  const MlmcResult r = estimate(model, coeff, y0, payoff, s, seed, workers);
  ReferenceEstimate out;
  out.value = r.estimate;
  out.stderr_value = r.stderr_value;
  out.n = n;
  out.eps_ref = eps_ref;
  out.h_ref = h_ref;
  return out;
}

std::pair<double, double> ks_two_sample(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() < 100 || ys.size() < 100)
    throw std::invalid_argument("ks_two_sample: need at least 100 samples per side");
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double nx = static_cast<double>(xs.size());
  const double ny = static_cast<double>(ys.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < xs.size() && j < ys.size()) {
    const double x = xs[i], y = ys[j];
    if (x <= y) ++i;
    if (y <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  const double ne = std::sqrt(nx * ny / (nx + ny));
  const double lambda = (ne + 0.12 + 0.11 / ne) * d;
  double p;
  if (lambda < 1e-8) {
    p = 1.0;
  } else {
    Kahan sum;
    for (int k = 1; k <= 100; ++k) {
      const double term = 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) *
                          std::exp(-2.0 * k * k * lambda * lambda);
      sum.add(term);
      if (std::fabs(term) < 1e-16) break;
    }
    p = std::clamp(sum.sum, 0.0, 1.0);
  }
  return {d, p};
}

double closed_form_sf(const LevyModel& model, const CoefficientField& coeff,
                      const Eigen::VectorXd& y0, const Payoff& payoff) {
  if (!coeff.is_constant())
    throw NotConstantCoefficientError("closed_form_sf: coefficient must be constant");
  if (payoff.kind() != Payoff::Kind::terminal)
    throw std::invalid_argument("closed_form_sf: payoff must be terminal");
  payoff.check_dim(coeff.dim_y());
  // E X_1 = b: the Wiener part, the correction and the compensated jumps are
  // all centered, so Y_1 = y0 + A X_1 in mean.
  const Eigen::VectorXd mean = y0 + coeff.constant_matrix() * model.drift();
  return payoff.weights().dot(mean);
}

}  // namespace levymc
