#include "hyq/phase_space.hpp"

#include <stdexcept>

namespace hyq {

Dims make_dims(int n, int s) {
  if (n < 0 || s < 0) throw std::invalid_argument("make_dims: negative dimension");
  if (n == 0 && s == 0) throw std::invalid_argument("make_dims: empty system (n = s = 0)");
  return Dims{n, s, 2 * n + s};
}

Mat symplectic_form(const Dims& dims) {
  Mat sigma = Mat::Zero(dims.d, dims.d);
  for (int i = 0; i < dims.n; ++i) {
    sigma(i, i + dims.n) = 1.0;
    sigma(i + dims.n, i) = -1.0;
  }
  return sigma;
}

Mat symplectic_form_quantum(const Dims& dims) {
  return symplectic_form(dims).topLeftCorner(2 * dims.n, 2 * dims.n);
}

static void check_length(const Dims& dims, const Vec& xi, const char* who) {
  if (xi.size() != dims.d) throw std::invalid_argument(std::string(who) + ": vector length mismatch");
}

Vec project_quantum(const Dims& dims, const Vec& xi) {
  check_length(dims, xi, "project_quantum");
  Vec out = xi;
  out.tail(dims.s).setZero();
  return out;
}

Vec project_classical(const Dims& dims, const Vec& xi) {
  check_length(dims, xi, "project_classical");
  Vec out = xi;
  out.head(2 * dims.n).setZero();
  return out;
}

Vec quantum_part(const Dims& dims, const Vec& xi) {
  check_length(dims, xi, "quantum_part");
  return xi.head(2 * dims.n);
}

Vec classical_part(const Dims& dims, const Vec& xi) {
  check_length(dims, xi, "classical_part");
  return xi.tail(dims.s);
}

Vec embed_quantum(const Dims& dims, const Vec& zeta) {
  if (zeta.size() != 2 * dims.n) throw std::invalid_argument("embed_quantum: length mismatch");
  Vec out = Vec::Zero(dims.d);
  out.head(2 * dims.n) = zeta;
  return out;
}

Vec embed_classical(const Dims& dims, const Vec& k) {
  if (k.size() != dims.s) throw std::invalid_argument("embed_classical: length mismatch");
  Vec out = Vec::Zero(dims.d);
  out.tail(dims.s) = k;
  return out;
}

cplx weyl_phase(const Vec& xi, const Vec& eta, const Mat& sigma) {
  if (xi.size() != eta.size() || xi.size() != sigma.rows())
    throw std::invalid_argument("weyl_phase: length mismatch");
  return std::polar(1.0, 0.5 * xi.dot(sigma * eta));
}

}  // namespace hyq
