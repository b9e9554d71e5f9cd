#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>

namespace hyq {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using cplx = std::complex<double>;

/// A characteristic function on phase space, normalized so chi(0) = 1.
using CfFn = std::function<cplx(const Vec&)>;

inline constexpr cplx kI{0.0, 1.0};

}  // namespace hyq
