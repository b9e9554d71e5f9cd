#pragma once

#include "hyq/types.hpp"

namespace hyq {

/// Dimensions of the hybrid phase space: n quantum modes (2n canonical
/// coordinates) plus s classical coordinates, d = 2n + s.
struct Dims {
  int n = 0;
  int s = 0;
  int d = 0;

  int quantum_dim() const { return 2 * n; }
  int classical_dim() const { return s; }
  bool operator==(const Dims&) const = default;
};

/// Validates n >= 0, s >= 0, n + s >= 1 and derives d.
Dims make_dims(int n, int s);

/// The d x d symplectic form: sigma_{i,i+n} = 1, sigma_{i+n,i} = -1 for
/// the quantum block, zero on the classical block. Entries are exact.
Mat symplectic_form(const Dims& dims);

/// The 2n x 2n quantum-block restriction of the form.
Mat symplectic_form_quantum(const Dims& dims);

/// Orthogonal projections onto the quantum / classical summands,
/// returned as full-length vectors (zeroed complement).
Vec project_quantum(const Dims& dims, const Vec& xi);
Vec project_classical(const Dims& dims, const Vec& xi);

/// First 2n components as a vector of length 2n.
Vec quantum_part(const Dims& dims, const Vec& xi);
/// Last s components as a vector of length s.
Vec classical_part(const Dims& dims, const Vec& xi);

/// Embeds a 2n-vector (resp. s-vector) into the full space.
Vec embed_quantum(const Dims& dims, const Vec& zeta);
Vec embed_classical(const Dims& dims, const Vec& k);

/// Weyl composition phase exp{(i/2) xi^T sigma eta}; unit modulus.
cplx weyl_phase(const Vec& xi, const Vec& eta, const Mat& sigma);

}  // namespace hyq
