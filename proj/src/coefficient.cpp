#include "levymc/coefficient.hpp"

#include <cmath>
#include <stdexcept>

namespace levymc {

CoefficientField CoefficientField::constant(Eigen::MatrixXd a) {
  CoefficientField f;
  f.kind_ = Kind::constant;
  f.dim_y_ = static_cast<int>(a.rows());
  f.dim_x_ = static_cast<int>(a.cols());
  f.base_ = std::move(a);
  f.lipschitz_ = 0.0;
  return f;
}

CoefficientField CoefficientField::affine(Eigen::MatrixXd base,
                                          std::vector<Eigen::MatrixXd> slopes) {
  CoefficientField f;
  f.kind_ = Kind::affine;
  f.dim_y_ = static_cast<int>(base.rows());
  f.dim_x_ = static_cast<int>(base.cols());
  if (static_cast<int>(slopes.size()) != f.dim_y_)
    throw DimensionMismatchError("affine coefficient: one slope matrix per y coordinate");
  double s2 = 0.0;
  for (const auto& m : slopes) {
    if (m.rows() != f.dim_y_ || m.cols() != f.dim_x_)
      throw DimensionMismatchError("affine coefficient: slope matrix shape mismatch");
    s2 += m.squaredNorm();
  }
  f.base_ = std::move(base);
  f.slopes_ = std::move(slopes);
  f.lipschitz_ = std::sqrt(s2);  // Cauchy-Schwarz over the slope stack
  return f;
}

CoefficientField CoefficientField::sinusoidal(Eigen::MatrixXd base, Eigen::MatrixXd amp,
                                              Eigen::VectorXd freq) {
  CoefficientField f;
  f.kind_ = Kind::sinusoidal;
  f.dim_y_ = static_cast<int>(base.rows());
  f.dim_x_ = static_cast<int>(base.cols());
  if (amp.rows() != base.rows() || amp.cols() != base.cols())
    throw DimensionMismatchError("sinusoidal coefficient: amp shape mismatch");
  if (freq.size() != f.dim_y_)
    throw DimensionMismatchError("sinusoidal coefficient: freq must have dim_y entries");
  f.lipschitz_ = amp.norm() * freq.norm();
  f.base_ = std::move(base);
  f.amp_ = std::move(amp);
  f.freq_ = std::move(freq);
  return f;
}

CoefficientField CoefficientField::custom(int dim_y, int dim_x, EvalFn fn,
                                          double declared_lipschitz) {
  if (dim_y < 1 || dim_x < 1)
    throw std::invalid_argument("custom coefficient: dimensions must be positive");
  CoefficientField f;
  f.kind_ = Kind::custom;
  f.dim_y_ = dim_y;
  f.dim_x_ = dim_x;
  f.fn_ = std::move(fn);
  f.lipschitz_ = declared_lipschitz;
  return f;
}

void CoefficientField::eval(const Eigen::VectorXd& y, Eigen::MatrixXd& out) const {
  switch (kind_) {
    case Kind::constant:
      out = base_;
      return;
    case Kind::affine:
      out = base_;
      for (int l = 0; l < dim_y_; ++l) out.noalias() += y(l) * slopes_[l];
      return;
    case Kind::sinusoidal:
      out = base_ + std::sin(freq_.dot(y)) * amp_;
      return;
    case Kind::custom:
      fn_(y, out);
      return;
  }
}

const Eigen::MatrixXd& CoefficientField::constant_matrix() const {
  if (kind_ != Kind::constant)
    throw NotConstantCoefficientError("coefficient field is not constant");
  return base_;
}

std::pair<double, double> CoefficientField::spot_check(const Eigen::VectorXd& y0,
                                                       RngSequence& seq, int pairs) const {
  Eigen::MatrixXd a0(dim_y_, dim_x_), a(dim_y_, dim_x_), b(dim_y_, dim_x_);
  eval(y0, a0);
  const double at_y0 = a0.norm();
  double max_ratio = 0.0;
  Eigen::VectorXd u(dim_y_), v(dim_y_);
  for (int i = 0; i < pairs; ++i) {
    for (int c = 0; c < dim_y_; ++c) {
      u(c) = y0(c) + 3.0 * seq.normal();
      v(c) = y0(c) + 3.0 * seq.normal();
    }
    const double dist = (u - v).norm();
    if (dist < 1e-12) continue;
    eval(u, a);
    eval(v, b);
    max_ratio = std::max(max_ratio, (a - b).norm() / dist);
  }
  return {max_ratio, at_y0};
}

}  // namespace levymc
