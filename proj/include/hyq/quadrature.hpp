#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace hyq {

struct QuadratureSettings {
  double abs_tol = 1e-10;
  int max_depth = 16;  // interval-halving depth
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved error estimate " + std::to_string(achieved) + ")"),
        achieved_error(achieved) {}
  double achieved_error;
};

namespace detail {

// 15-point Gauss-Legendre rule on [-1, 1].
inline constexpr double kGl15Nodes[15] = {
    -9.87992518020485377e-01, -9.37273392400705951e-01, -8.48206583410427206e-01,
    -7.24417731360170070e-01, -5.70972172608538830e-01, -3.94151347077563385e-01,
    -2.01194093997434514e-01, 0.00000000000000000e+00,  2.01194093997434514e-01,
    3.94151347077563385e-01,  5.70972172608538830e-01,  7.24417731360170070e-01,
    8.48206583410427206e-01,  9.37273392400705951e-01,  9.87992518020485377e-01};
inline constexpr double kGl15Weights[15] = {
    3.07532419961186465e-02, 7.03660474881080689e-02, 1.07159220467171773e-01,
    1.39570677926153908e-01, 1.66269205816993781e-01, 1.86161000015561878e-01,
    1.98431485327111246e-01, 2.02578241925560898e-01, 1.98431485327111246e-01,
    1.86161000015561878e-01, 1.66269205816993781e-01, 1.39570677926153908e-01,
    1.07159220467171773e-01, 7.03660474881080689e-02, 3.07532419961186465e-02};

}  // namespace detail

template <class T, class F>
T gl15(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  T acc = detail::kGl15Weights[0] * f(mid + half * detail::kGl15Nodes[0]);
  for (int i = 1; i < 15; ++i) acc = acc + detail::kGl15Weights[i] * f(mid + half * detail::kGl15Nodes[i]);
  return half * acc;
}

/// Adaptive composite Gauss-Legendre integration of a smooth (possibly
/// vector/matrix valued) integrand. The error estimate on each interval is
/// the defect between one panel and its two halves; intervals are split
/// until the local estimate fits into the proportionally allotted budget.
/// `breakpoints`, when given, receives the endpoints of the accepted leaf
/// intervals (useful to freeze a rule that is then reused across probes).
template <class T, class F, class NormFn>
T adaptive_gl(F&& f, double a, double b, const QuadratureSettings& settings, NormFn&& norm,
              std::vector<double>* breakpoints = nullptr, double* error_estimate = nullptr) {
  if (a == b) {
    if (breakpoints) breakpoints->push_back(a);
    if (error_estimate) *error_estimate = 0.0;
    return T(0.0 * f(a));  // zero with the right shape
  }
  double err_acc = 0.0;
  bool converged = true;
  double worst = 0.0;

  struct Frame {
    double a, b, tol;
    int depth;
    T whole;
  };
  std::vector<Frame> stack;
  stack.push_back({a, b, settings.abs_tol, 0, gl15<T>(f, a, b)});
  T total = T(0.0 * stack.back().whole);
  if (breakpoints) breakpoints->push_back(a);

  std::vector<double> leaves;
  while (!stack.empty()) {
    Frame fr = stack.back();
    stack.pop_back();
    const double mid = 0.5 * (fr.a + fr.b);
    T left = gl15<T>(f, fr.a, mid);
    T right = gl15<T>(f, mid, fr.b);
    T refined = left + right;
    const double defect = norm(refined - fr.whole);
    if (defect <= fr.tol || fr.depth >= settings.max_depth) {
      if (defect > fr.tol) {
        converged = false;
        worst = std::max(worst, defect);
      }
      total = total + refined;
      err_acc += defect;
      if (breakpoints) {
        leaves.push_back(mid);
        leaves.push_back(fr.b);
      }
    } else {
      stack.push_back({mid, fr.b, 0.5 * fr.tol, fr.depth + 1, right});
      stack.push_back({fr.a, mid, 0.5 * fr.tol, fr.depth + 1, left});
    }
  }
  if (!converged) throw QuadratureError("adaptive_gl: interval budget exhausted", worst);
  if (breakpoints) {
    breakpoints->insert(breakpoints->end(), leaves.begin(), leaves.end());
    std::sort(breakpoints->begin(), breakpoints->end());
    breakpoints->erase(std::unique(breakpoints->begin(), breakpoints->end()), breakpoints->end());
  }
  if (error_estimate) *error_estimate = err_acc;
  return total;
}

inline double cplx_norm(const std::complex<double>& z) { return std::abs(z); }

}  // namespace hyq
