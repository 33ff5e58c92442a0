#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "levymc/errors.hpp"
#include "levymc/rng.hpp"

namespace levymc {

// SDE coefficient a: R^{d_Y} -> R^{d_Y x d_X}, Lipschitz with a known
// constant. Built-in kinds carry an exact constant; custom fields carry a
// declared one that the library records but cannot verify.
class CoefficientField {
 public:
  enum class Kind { constant, affine, sinusoidal, custom };

  static CoefficientField constant(Eigen::MatrixXd a);

  // a(y) = base + sum_l y_l * slopes[l]
  static CoefficientField affine(Eigen::MatrixXd base, std::vector<Eigen::MatrixXd> slopes);

  // a(y) = base + amp * sin(<freq, y>); bounded, Lipschitz |amp|_F |freq|.
  static CoefficientField sinusoidal(Eigen::MatrixXd base, Eigen::MatrixXd amp,
                                     Eigen::VectorXd freq);

  using EvalFn = std::function<void(const Eigen::VectorXd&, Eigen::MatrixXd&)>;
  static CoefficientField custom(int dim_y, int dim_x, EvalFn fn, double declared_lipschitz);

  void eval(const Eigen::VectorXd& y, Eigen::MatrixXd& out) const;

  int dim_y() const { return dim_y_; }
  int dim_x() const { return dim_x_; }
  Kind kind() const { return kind_; }
  double lipschitz_const() const { return lipschitz_; }

  bool is_constant() const { return kind_ == Kind::constant; }
  const Eigen::MatrixXd& constant_matrix() const;

  // Max observed |a(y)-a(y')|_F / |y-y'| over random pairs near y0, plus
  // |a(y0)|_F. Used to spot-check the declared constant.
  std::pair<double, double> spot_check(const Eigen::VectorXd& y0, RngSequence& seq,
                                       int pairs) const;

 private:
  CoefficientField() = default;

  Kind kind_ = Kind::constant;
  int dim_y_ = 0, dim_x_ = 0;
  double lipschitz_ = 0.0;
  Eigen::MatrixXd base_;
  std::vector<Eigen::MatrixXd> slopes_;
  Eigen::MatrixXd amp_;
  Eigen::VectorXd freq_;
  EvalFn fn_;
};

}  // namespace levymc
