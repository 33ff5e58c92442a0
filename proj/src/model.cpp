#include "levymc/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace levymc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Surface measure of the unit sphere in R^d: s_1 = 2, s_2 = 2*pi, s_3 = 4*pi.
double sphere_surface(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

double effective_surface(const TruncatedStable& ts, int d) {
  return ts.one_sided ? 1.0 : sphere_surface(d);
}

// integral of u^e over [1, T]
double powint(double T, double e) {
  if (std::fabs(e + 1.0) < 1e-12) return std::log(T);
  return (std::pow(T, e + 1.0) - 1.0) / (e + 1.0);
}

// inverse of M(x) = qa * a * powint(x/a, p) on a cell
double powint_invert(double a, double qa, double p, double mass) {
  const double t = mass / (qa * a);
  if (std::fabs(p + 1.0) < 1e-12) return a * std::exp(t);
  return a * std::pow(t * (p + 1.0) + 1.0, 1.0 / (p + 1.0));
}

// least-squares slope of y against x
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  return (n * sxy - sx * sy) / denom;
}

}  // namespace

Eigen::MatrixXd cov_factor(const Eigen::MatrixXd& cov) {
  if (cov.rows() != cov.cols())
    throw DimensionMismatchError("cov_factor: matrix must be square");
  const double scale = cov.norm();
  if ((cov - cov.transpose()).norm() > 1e-10 * (1.0 + scale))
    throw NonSymmetricError("cov_factor: matrix is not symmetric within tolerance");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (cov + cov.transpose()));
  const Eigen::VectorXd& ev = es.eigenvalues();
  if (ev.minCoeff() < -(1e-12 * scale + 1e-300))
    throw IndefiniteMatrixError("cov_factor: eigenvalue " + std::to_string(ev.minCoeff()) +
                                " below tolerance");
  const Eigen::VectorXd s = ev.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().transpose();
}

LevyModel::LevyModel(int dim_x, Eigen::MatrixXd sigma, Eigen::VectorXd drift,
                     JumpMeasureSpec measure, std::optional<double> lipschitz_budget,
                     std::optional<PowerLawG> g_override)
    : dim_x_(dim_x),
      sigma_(std::move(sigma)),
      drift_(std::move(drift)),
      measure_(std::move(measure)),
      g_override_(std::move(g_override)) {
  if (dim_x_ < 1) throw std::invalid_argument("LevyModel: dim_x must be >= 1");
  if (sigma_.rows() != dim_x_ || sigma_.cols() != dim_x_)
    throw DimensionMismatchError("LevyModel: sigma must be dim_x by dim_x");
  if (drift_.size() != dim_x_)
    throw DimensionMismatchError("LevyModel: drift must have dim_x entries");
  validate_and_cache();

  const double f_inf = second_moment();
  if (lipschitz_budget) {
    lipschitz_budget_ = *lipschitz_budget;
    if (!(lipschitz_budget_ > 0.0))
      throw std::invalid_argument("LevyModel: lipschitz_budget must be positive");
    const double slack = 1.0 + 1e-9;
    if (sigma_.norm() > lipschitz_budget_ * slack)
      throw std::invalid_argument("LevyModel: |sigma| exceeds the Lipschitz budget K");
    if (drift_.norm() > lipschitz_budget_ * slack)
      throw std::invalid_argument("LevyModel: |drift| exceeds the Lipschitz budget K");
    if (f_inf > lipschitz_budget_ * lipschitz_budget_ * slack)
      throw std::invalid_argument("LevyModel: second moment of nu exceeds K^2");
  } else {
    lipschitz_budget_ =
        std::max({sigma_.norm(), drift_.norm(), std::sqrt(f_inf), 1e-9}) * (1.0 + 1e-9);
  }
}

void LevyModel::validate_and_cache() {
  if (g_override_) {
    if (!(g_override_->coefficient > 0.0))
      throw std::invalid_argument("LevyModel: g coefficient must be positive");
    if (!(g_override_->exponent > 0.0 && g_override_->exponent <= 2.0))
      throw std::invalid_argument("LevyModel: g exponent must lie in (0, 2]");
  }

  if (const auto* ts = std::get_if<TruncatedStable>(&measure_)) {
    if (!(ts->alpha > 0.0 && ts->alpha < 2.0))
      throw std::invalid_argument("TruncatedStable: alpha must lie in (0, 2)");
    if (!(ts->intensity > 0.0))
      throw std::invalid_argument("TruncatedStable: intensity must be positive");
    if (!(ts->radius > 0.0))
      throw std::invalid_argument("TruncatedStable: radius must be positive");
    if (ts->one_sided && dim_x_ != 1)
      throw std::invalid_argument("TruncatedStable: one_sided requires dim_x = 1");
    const double sd = effective_surface(*ts, dim_x_);
    stable_cg_ = ts->intensity * sd * (1.0 / (2.0 - ts->alpha) + 1.0 / ts->alpha);
    return;
  }

  if (const auto* fa = std::get_if<FiniteActivity>(&measure_)) {
    if (fa->atoms.empty())
      throw std::invalid_argument("FiniteActivity: at least one atom required");
    for (const auto& atom : fa->atoms) {
      if (atom.x.size() != dim_x_)
        throw DimensionMismatchError("FiniteActivity: atom dimension mismatch");
      if (!(atom.mass > 0.0))
        throw std::invalid_argument("FiniteActivity: atom mass must be positive");
      if (!(atom.x.norm() > 0.0))
        throw std::invalid_argument("FiniteActivity: atoms must be away from the origin");
    }
    return;
  }

  const auto& tab = std::get<TabulatedRadial>(measure_);
  const std::size_t n = tab.radii.size();
  if (n < 2 || tab.density.size() != n)
    throw std::invalid_argument("TabulatedRadial: need matching radii/density with >= 2 points");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(tab.radii[i] > 0.0))
      throw std::invalid_argument("TabulatedRadial: radii must be positive");
    if (i > 0 && !(tab.radii[i] > tab.radii[i - 1]))
      throw std::invalid_argument("TabulatedRadial: radii must be strictly increasing");
    if (!(tab.density[i] > 0.0))
      throw std::invalid_argument("TabulatedRadial: density must be strictly positive");
  }

  cells_.resize(n - 1);
  total_mass_ = 0.0;
  total_sq_ = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    TabCell& c = cells_[i];
    c.a = tab.radii[i];
    c.b = tab.radii[i + 1];
    c.qa = tab.density[i];
    c.p = std::log(tab.density[i + 1] / tab.density[i]) / std::log(c.b / c.a);
    c.mass = c.qa * c.a * powint(c.b / c.a, c.p);
    c.sq = c.qa * c.a * c.a * c.a * powint(c.b / c.a, c.p + 2.0);
    total_mass_ += c.mass;
    total_sq_ += c.sq;
  }
  tail_cum_.assign(n, 0.0);
  for (std::size_t i = n - 1; i-- > 0;) tail_cum_[i] = tail_cum_[i + 1] + cells_[i].mass;

  // BG index estimate: local slope of the tail mass over the lower part of
  // the table, where the small-jump behavior shows.
  {
    std::vector<double> lx, ly;
    const std::size_t upto = std::max<std::size_t>(2, n / 3);
    for (std::size_t i = 0; i < upto; ++i) {
      if (tail_cum_[i] > 0.0) {
        lx.push_back(std::log(tab.radii[i]));
        ly.push_back(std::log(tail_cum_[i]));
      }
    }
    tab_bg_ = (lx.size() >= 2) ? std::clamp(-fit_slope(lx, ly), 0.0, 2.0) : 0.0;
  }

  // Fitted dominating power law: exponent from the BG estimate, coefficient
  // from the max of (F(h)/h^2 + tail(h)) h^beta over a dense probe grid.
  {
    const double beta = std::clamp(tab_bg_, 0.1, 2.0);
    double cg = 0.0;
    auto probe = [&](double h) {
      const double lhs = f_small(h) / (h * h) + tail_mass(h);
      cg = std::max(cg, lhs * std::pow(h, beta));
    };
    probe(tab.radii.front() * 0.25);
    probe(tab.radii.front() * 0.5);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      probe(tab.radii[i]);
      probe(std::sqrt(tab.radii[i] * tab.radii[i + 1]));
    }
    probe(tab.radii.back());
    tab_g_ = PowerLawG{cg * 1.05, beta};
  }
}

double LevyModel::tail_mass(double h) const {
  if (!(h > 0.0)) throw std::invalid_argument("tail_mass: h must be positive");
  if (const auto* ts = std::get_if<TruncatedStable>(&measure_)) {
    if (h >= ts->radius) return 0.0;
    const double sd = effective_surface(*ts, dim_x_);
    return ts->intensity * sd / ts->alpha *
           (std::pow(h, -ts->alpha) - std::pow(ts->radius, -ts->alpha));
  }
  if (const auto* fa = std::get_if<FiniteActivity>(&measure_)) {
    double m = 0.0;
    for (const auto& atom : fa->atoms)
      if (atom.x.norm() >= h) m += atom.mass;
    return m;
  }
  const auto& tab = std::get<TabulatedRadial>(measure_);
  if (h <= tab.radii.front()) return total_mass_;
  if (h >= tab.radii.back()) return 0.0;
  const auto it = std::upper_bound(tab.radii.begin(), tab.radii.end(), h);
  const std::size_t k = static_cast<std::size_t>(it - tab.radii.begin()) - 1;
  const TabCell& c = cells_[k];
  const double below = c.qa * c.a * powint(h / c.a, c.p);
  return tail_cum_[k + 1] + (c.mass - below);
}

double LevyModel::f_small(double h) const {
  if (!(h > 0.0)) throw std::invalid_argument("f_small: h must be positive");
  if (const auto* ts = std::get_if<TruncatedStable>(&measure_)) {
    const double sd = effective_surface(*ts, dim_x_);
    const double hh = std::min(h, ts->radius);
    return ts->intensity * sd / (2.0 - ts->alpha) * std::pow(hh, 2.0 - ts->alpha);
  }
  if (const auto* fa = std::get_if<FiniteActivity>(&measure_)) {
    double m = 0.0;
    for (const auto& atom : fa->atoms) {
      const double r = atom.x.norm();
      if (r < h) m += atom.mass * r * r;
    }
    return m;
  }
  const auto& tab = std::get<TabulatedRadial>(measure_);
  if (h <= tab.radii.front()) return 0.0;
  if (h >= tab.radii.back()) return total_sq_;
  const auto it = std::upper_bound(tab.radii.begin(), tab.radii.end(), h);
  const std::size_t k = static_cast<std::size_t>(it - tab.radii.begin()) - 1;
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) acc += cells_[i].sq;
  const TabCell& c = cells_[k];
  acc += c.qa * c.a * c.a * c.a * powint(h / c.a, c.p + 2.0);
  return acc;
}

Eigen::VectorXd LevyModel::f_zero(double h) const {
  if (!(h > 0.0)) throw std::invalid_argument("f_zero: h must be positive");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_x_);
  if (const auto* ts = std::get_if<TruncatedStable>(&measure_)) {
    if (!ts->one_sided || h >= ts->radius) return out;  // symmetric: odd integrand
    const double a = ts->alpha;
    const double c = ts->intensity;
    const double R = ts->radius;
    out(0) = (std::fabs(a - 1.0) < 1e-12)
                 ? c * std::log(R / h)
                 : c * (std::pow(h, 1.0 - a) - std::pow(R, 1.0 - a)) / (a - 1.0);
    return out;
  }
  if (const auto* fa = std::get_if<FiniteActivity>(&measure_)) {
    for (const auto& atom : fa->atoms)
      if (atom.x.norm() >= h) out += atom.mass * atom.x;
    return out;
  }
  return out;  // tabulated family is isotropic
}

Eigen::MatrixXd LevyModel::small_jump_cov(double h) const {
  if (!(h > 0.0)) throw std::invalid_argument("small_jump_cov: h must be positive");
  if (const auto* fa = std::get_if<FiniteActivity>(&measure_)) {
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(dim_x_, dim_x_);
    for (const auto& atom : fa->atoms)
      if (atom.x.norm() < h) C += atom.mass * atom.x * atom.x.transpose();
    return C;
  }
  // isotropic families split the trace equally across coordinates
  return (f_small(h) / dim_x_) * Eigen::MatrixXd::Identity(dim_x_, dim_x_);
}

double LevyModel::second_moment() const {
  if (const auto* ts = std::get_if<TruncatedStable>(&measure_)) {
    const double sd = effective_surface(*ts, dim_x_);
    return ts->intensity * sd / (2.0 - ts->alpha) * std::pow(ts->radius, 2.0 - ts->alpha);
  }
  if (const auto* fa = std::get_if<FiniteActivity>(&measure_)) {
    double m = 0.0;
    for (const auto& atom : fa->atoms) m += atom.mass * atom.x.squaredNorm();
    return m;
  }
  return total_sq_;
}

double LevyModel::tail_second_moment(double h) const {
  if (const auto* fa = std::get_if<FiniteActivity>(&measure_)) {
    double m = 0.0;
    for (const auto& atom : fa->atoms)
      if (atom.x.norm() >= h) m += atom.mass * atom.x.squaredNorm();
    return m;
  }
  return second_moment() - f_small(h);
}

std::optional<PowerLawG> LevyModel::power_law_g() const {
  if (g_override_) return g_override_;
  if (const auto* ts = std::get_if<TruncatedStable>(&measure_))
    return PowerLawG{stable_cg_, ts->alpha};
  if (std::holds_alternative<TabulatedRadial>(measure_)) return tab_g_;
  return std::nullopt;
}

double LevyModel::g_bound(double h) const {
  const auto g = power_law_g();
  if (!g)
    throw UnsupportedMeasureError(
        "g_bound: finite-activity measure has no registered dominating g; "
        "supply one in the model spec");
  if (!(h > 0.0)) throw std::invalid_argument("g_bound: h must be positive");
  return g->coefficient * std::pow(h, -g->exponent);
}

double LevyModel::g_inverse(double x) const {
  const auto g = power_law_g();
  if (!g)
    throw UnsupportedMeasureError(
        "g_inverse: finite-activity measure has no registered dominating g; "
        "supply one in the model spec");
  if (!(x > 0.0)) throw std::invalid_argument("g_inverse: x must be positive");
  return std::pow(g->coefficient / x, 1.0 / g->exponent);
}

DoublingReport LevyModel::validate_doubling(double gamma,
                                            const std::vector<double>& h_grid) const {
  if (!(gamma > 1.0 && gamma < 2.0))
    throw std::invalid_argument("validate_doubling: gamma must lie in (1, 2)");
  DoublingReport rep;
  rep.gamma = gamma;
  rep.pass = true;
  rep.min_margin = std::numeric_limits<double>::infinity();
  const auto g = power_law_g();
  rep.threshold = g ? std::exp2(1.0 - 1.0 / g->exponent) : kNaN;
  for (double h : h_grid) {
    const double lhs = g_bound(0.5 * gamma * h);
    const double rhs = 2.0 * g_bound(h);
    rep.min_margin = std::min(rep.min_margin, lhs - rhs);
    if (lhs < rhs * (1.0 - 1e-12)) rep.pass = false;
  }
  return rep;
}

double LevyModel::tail_radius_from_uniform(double h, double u) const {
  if (!(tail_mass(h) > 0.0)) throw EmptyTailError("tail_radius_from_uniform: empty tail");
  if (const auto* ts = std::get_if<TruncatedStable>(&measure_)) {
    const double a = ts->alpha;
    const double ha = std::pow(h, -a);
    const double Ra = std::pow(ts->radius, -a);
    return std::pow(ha - u * (ha - Ra), -1.0 / a);
  }
  if (std::holds_alternative<TabulatedRadial>(measure_)) {
    const auto& tab = std::get<TabulatedRadial>(measure_);
    const double hh = std::max(h, tab.radii.front());
    double rem = u * tail_mass(h);
    const auto it = std::upper_bound(tab.radii.begin(), tab.radii.end(), hh);
    std::size_t k = (it == tab.radii.begin())
                        ? 0
                        : static_cast<std::size_t>(it - tab.radii.begin()) - 1;
    double lo = hh;
    for (; k < cells_.size(); ++k) {
      const TabCell& c = cells_[k];
      const double start = std::max(lo, c.a);
      const double already = c.qa * c.a * powint(start / c.a, c.p);
      const double avail = c.mass - already;
      if (rem <= avail || k + 1 == cells_.size())
        return std::min(powint_invert(c.a, c.qa, c.p, already + std::min(rem, avail)), c.b);
      rem -= avail;
      lo = c.b;
    }
    return tab.radii.back();
  }
  throw UnsupportedMeasureError(
      "tail_radius_from_uniform: not defined for atomic measures");
}

Eigen::VectorXd LevyModel::sample_tail_jump(double h, RngSequence& seq) const {
  const double lam = tail_mass(h);
  if (!(lam > 0.0)) throw EmptyTailError("sample_tail_jump: tail mass is zero at this h");

  if (const auto* fa = std::get_if<FiniteActivity>(&measure_)) {
    const double target = seq.uniform01() * lam;
    double acc = 0.0;
    const FiniteAtom* last = nullptr;
    for (const auto& atom : fa->atoms) {
      if (atom.x.norm() >= h) {
        last = &atom;
        acc += atom.mass;
        if (target < acc) return atom.x;
      }
    }
    return last->x;  // guard against rounding at target == lam
  }

  const double r = tail_radius_from_uniform(h, seq.uniform01());
  if (dim_x_ == 1) {
    double sign = 1.0;
    if (const auto* ts = std::get_if<TruncatedStable>(&measure_); ts && ts->one_sided) {
      sign = 1.0;
    } else {
      sign = (seq.uniform01() < 0.5) ? -1.0 : 1.0;
    }
    Eigen::VectorXd out(1);
    out(0) = sign * r;
    return out;
  }
  Eigen::VectorXd dir(dim_x_);
  double norm2 = 0.0;
  do {
    for (int i = 0; i < dim_x_; ++i) dir(i) = seq.normal();
    norm2 = dir.squaredNorm();
  } while (norm2 < 1e-300);
  return (r / std::sqrt(norm2)) * dir;
}

BgIndex LevyModel::bg_index() const {
  if (const auto* ts = std::get_if<TruncatedStable>(&measure_)) return {ts->alpha, false};
  if (std::holds_alternative<FiniteActivity>(measure_)) return {0.0, false};
  return {tab_bg_, true};
}

UEReport LevyModel::check_ue(const std::vector<double>& h_grid, int direction_samples,
                             double theta_bound) const {
  const int d = dim_x_;
  std::vector<double> grid = h_grid;
  std::sort(grid.begin(), grid.end());
  UEReport rep;
  rep.h_max = grid.empty() ? 0.0 : grid.back();

  std::vector<double> thetas;
  int sub_dim = -1;
  bool stable_dims = true;
  RngSequence dirseq(mix64(0x5545434845434bULL));  // fixed internal probe stream

  for (double h : grid) {
    if (!(h > 0.0)) throw std::invalid_argument("check_ue: h grid must be positive");
    const Eigen::MatrixXd C = small_jump_cov(h);
    const double tr = C.trace();
    if (tr <= 0.0) continue;  // no small jumps below this h: vacuous

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double lam_max = ev(d - 1);
    const double tol = 1e-10 * lam_max;
    int rank = 0;
    for (int i = 0; i < d; ++i)
      if (ev(i) > tol) ++rank;

    std::vector<int> live_axes;
    if (rank < d) {
      for (int i = 0; i < d; ++i)
        if (C(i, i) > 1e-10 * tr) live_axes.push_back(i);
      if (static_cast<int>(live_axes.size()) != rank)
        throw DegenerateSmallJumpsError(
            "check_ue: small-jump covariance is singular on a non-axis-aligned "
            "subspace at h = " + std::to_string(h));
    } else {
      for (int i = 0; i < d; ++i) live_axes.push_back(i);
    }

    Eigen::MatrixXd Cr(rank, rank);
    for (int i = 0; i < rank; ++i)
      for (int j = 0; j < rank; ++j) Cr(i, j) = C(live_axes[i], live_axes[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esr(Cr);
    const double lam_min = esr.eigenvalues()(0);
    if (!(lam_min > 0.0))
      throw DegenerateSmallJumpsError(
          "check_ue: restricted small-jump covariance is singular at h = " +
          std::to_string(h));
    double theta_h = esr.eigenvalues()(rank - 1) / lam_min;

    // Monte Carlo probe over directions inside the detected subspace; a
    // cross-check of the eigenvalue route.
    if (direction_samples > 0) {
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      Eigen::VectorXd y(rank);
      for (int s = 0; s < direction_samples; ++s) {
        for (int i = 0; i < rank; ++i) y(i) = dirseq.normal();
        const double n2 = y.squaredNorm();
        if (n2 < 1e-300) continue;
        const double q = y.dot(Cr * y) / n2;
        lo = std::min(lo, q);
        hi = std::max(hi, q);
      }
      if (hi > 0.0 && lo > 0.0) theta_h = std::max(theta_h, hi / lo * (1.0 - 1e-12));
    }

    if (sub_dim < 0) sub_dim = rank;
    if (rank != sub_dim) stable_dims = false;
    thetas.push_back(theta_h);
    rep.h_max = h;
  }

  if (thetas.empty()) {
    // no small jumps anywhere on the probed grid
    rep.theta = 1.0;
    rep.subspace_dim = 0;
    rep.pass = true;
    return rep;
  }
  rep.theta = *std::max_element(thetas.begin(), thetas.end());
  rep.subspace_dim = sub_dim;
  const double tmin = *std::min_element(thetas.begin(), thetas.end());
  const bool stable = stable_dims && rep.theta <= 2.0 * tmin + 1e-12;
  rep.pass = stable && rep.theta <= theta_bound;
  return rep;
}

double LevyModel::radial_density(double r) const {
  if (const auto* ts = std::get_if<TruncatedStable>(&measure_)) {
    if (r <= 0.0 || r > ts->radius) return 0.0;
    return ts->intensity * effective_surface(*ts, dim_x_) * std::pow(r, -ts->alpha - 1.0);
  }
  if (const auto* tab = std::get_if<TabulatedRadial>(&measure_)) {
    if (r < tab->radii.front() || r > tab->radii.back()) return 0.0;
    const auto it = std::upper_bound(tab->radii.begin(), tab->radii.end(), r);
    std::size_t k = (it == tab->radii.begin())
                        ? 0
                        : static_cast<std::size_t>(it - tab->radii.begin()) - 1;
    k = std::min(k, cells_.size() - 1);
    const TabCell& c = cells_[k];
    return c.qa * std::pow(r / c.a, c.p);
  }
  throw UnsupportedMeasureError("radial_density: atomic measures have no density");
}

std::pair<double, double> LevyModel::radial_support() const {
  if (const auto* ts = std::get_if<TruncatedStable>(&measure_)) return {0.0, ts->radius};
  if (const auto* tab = std::get_if<TabulatedRadial>(&measure_))
    return {tab->radii.front(), tab->radii.back()};
  throw UnsupportedMeasureError("radial_support: atomic measures have no density");
}

double LevyModel::log_radial_density(double log_r) const {
  constexpr double kMinusInf = -std::numeric_limits<double>::infinity();
  if (const auto* ts = std::get_if<TruncatedStable>(&measure_)) {
    if (log_r > std::log(ts->radius)) return kMinusInf;
    return std::log(ts->intensity * effective_surface(*ts, dim_x_)) -
           (ts->alpha + 1.0) * log_r;
  }
  if (const auto* tab = std::get_if<TabulatedRadial>(&measure_)) {
    if (log_r < std::log(tab->radii.front()) || log_r > std::log(tab->radii.back()))
      return kMinusInf;
    const double r = std::exp(log_r);
    const auto it = std::upper_bound(tab->radii.begin(), tab->radii.end(), r);
    std::size_t k = (it == tab->radii.begin())
                        ? 0
                        : static_cast<std::size_t>(it - tab->radii.begin()) - 1;
    k = std::min(k, cells_.size() - 1);
    const TabCell& c = cells_[k];
    return std::log(c.qa) + c.p * (log_r - std::log(c.a));
  }
  throw UnsupportedMeasureError("log_radial_density: atomic measures have no density");
}

}  // namespace levymc
