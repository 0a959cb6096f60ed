#pragma once

#include <algorithm>
#include <stdexcept>

#include <Eigen/Dense>

namespace graphcap {

// Eigenvalues of the real form [[Re, -Im], [Im, Re]]: the spectrum of m
// together with its conjugate. Eigen's complex Schur iteration fails to
// converge on some exact 0-1 tensor products; the real solver does not.
inline Eigen::VectorXcd doubled_spectrum(const Eigen::MatrixXcd& m) {
  const Eigen::Index n = m.rows();
  Eigen::MatrixXd r(2 * n, 2 * n);
  r << m.real(), -m.imag(), m.imag(), m.real();
  Eigen::EigenSolver<Eigen::MatrixXd> es(r, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalue iteration did not converge");
  return es.eigenvalues();
}

inline double spectral_radius_of(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1) return std::abs(m(0, 0));
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
  if (es.info() == Eigen::Success) return es.eigenvalues().cwiseAbs().maxCoeff();
  return doubled_spectrum(m).cwiseAbs().maxCoeff();
}

}  // namespace graphcap
