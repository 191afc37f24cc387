// Copyright 2026 The qsysid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense complex linear algebra used by the rest of the library.
//
// Composite indices follow one convention everywhere: for a product space
// A (x) B the pair (a, b) maps to a * dim(B) + b, so the first factor varies
// slowest. tensor_product, partial_trace and every bipartite operator in
// channel.hpp / identify.hpp rely on it.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "qsysid/errors.hpp"

namespace qsysid {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class Factor { first, second };

namespace detail {

inline std::string dims_string(Index rows, Index cols) {
  std::ostringstream os;
  os << rows << "x" << cols;
  return os.str();
}

inline bool all_finite(const Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
        return false;
  return true;
}

}  // namespace detail

inline Matrix identity(Index d) { return Matrix::Identity(d, d); }

/// |i><j| in dimension d.
inline Matrix basis_operator(Index i, Index j, Index d) {
  Matrix m = Matrix::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

inline Matrix outer(const Vector& v) { return v * v.adjoint(); }

inline Matrix tensor_product(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Vector tensor_product(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

/// Traces out the named factor of an operator on C^da (x) C^db.
inline Matrix partial_trace(const Matrix& m, Index da, Index db, Factor which) {
  detail::require_dims(da > 0 && db > 0 && m.rows() == da * db && m.cols() == da * db,
                       "partial_trace: operator is " + detail::dims_string(m.rows(), m.cols()) +
                           ", expected " + std::to_string(da * db) + " square");
  if (which == Factor::first) {
    Matrix out = Matrix::Zero(db, db);
    for (Index k = 0; k < da; ++k) out += m.block(k * db, k * db, db, db);
    return out;
  }
  Matrix out(da, da);
  for (Index a = 0; a < da; ++a)
    for (Index b = 0; b < da; ++b) out(a, b) = m.block(a * db, b * db, db, db).trace();
  return out;
}

inline double hermiticity_error(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const Matrix& m, double tol = 1e-12) {
  return hermiticity_error(m) <= tol;
}

inline Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

// ---------------------------------------------------------------------------
// Spectral data

/// Eigendecomposition of a Hermitian operator.
///
/// Eigenvalues ascend. Each eigenvector column is phase-fixed so that its
/// largest-magnitude entry (first one on ties) is real and positive, which
/// makes the decomposition a deterministic function of the input.
struct Spectrum {
  RealVector eigenvalues;
  Matrix eigenvectors;

  Matrix reconstruct() const {
    return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
  }
};

namespace detail {

inline void fix_column_phases(Matrix& vecs) {
  for (Index j = 0; j < vecs.cols(); ++j) {
    Index best = 0;
    double best_abs = -1.0;
    for (Index i = 0; i < vecs.rows(); ++i) {
      const double a = std::abs(vecs(i, j));
      if (a > best_abs + 1e-12) {
        best_abs = a;
        best = i;
      }
    }
    if (best_abs > 0.0) vecs.col(j) *= std::conj(vecs(best, j)) / best_abs;
  }
}

}  // namespace detail

inline Spectrum hermitian_spectrum(const Matrix& m) {
  detail::require_dims(m.rows() == m.cols(), "hermitian_spectrum: matrix is not square");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m));
  if (solver.info() != Eigen::Success) throw NumericalError("hermitian eigensolver failed");
  Spectrum s{solver.eigenvalues(), solver.eigenvectors()};
  detail::fix_column_phases(s.eigenvectors);
  return s;
}

inline RealVector hermitian_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("hermitian eigensolver failed");
  return solver.eigenvalues();
}

template <typename F>
Matrix spectral_function(const Spectrum& s, F&& f) {
  Vector mapped(s.eigenvalues.size());
  for (Index i = 0; i < s.eigenvalues.size(); ++i) mapped(i) = f(s.eigenvalues(i));
  return s.eigenvectors * mapped.asDiagonal() * s.eigenvectors.adjoint();
}

// ---------------------------------------------------------------------------
// Norms

inline RealVector singular_values(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues();
}

/// Sum of singular values. Hermitian inputs go through the eigensolver.
inline double trace_norm(const Matrix& m) {
  detail::require_dims(m.rows() == m.cols(), "trace_norm: matrix is " +
                                                 detail::dims_string(m.rows(), m.cols()) +
                                                 ", expected square");
  if (m.size() == 0) return 0.0;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (hermiticity_error(m) <= 1e-14 * scale) return hermitian_eigenvalues(m).cwiseAbs().sum();
  return singular_values(m).sum();
}

/// Largest singular value.
inline double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return singular_values(m)(0);
}

// ---------------------------------------------------------------------------
// Density operators

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kPsdTolerance = 1e-10;
inline constexpr double kTraceTolerance = 1e-10;

/// Positive semidefinite, unit-trace operator on C^dim.
///
/// Admission symmetrizes the input and clips eigenvalues in [-1e-10, 0) to
/// zero. Anything further from a state is rejected with ValidationError.
class DensityOperator {
 public:
  explicit DensityOperator(const Matrix& m) {
    detail::require_dims(m.rows() == m.cols() && m.rows() > 0,
                         "density operator must be square and nonempty, got " +
                             detail::dims_string(m.rows(), m.cols()));
    detail::require(detail::all_finite(m), "density operator has non-finite entries");
    const double herr = hermiticity_error(m);
    if (herr > kHermitianTolerance) {
      std::ostringstream os;
      os << "density operator is not Hermitian (error " << herr << ")";
      throw ValidationError(os.str());
    }
    mat_ = hermitian_part(m);
    const double tr = mat_.trace().real();
    if (std::abs(tr - 1.0) > kTraceTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << "density operator trace is " << tr;
      throw ValidationError(os.str());
    }
    const RealVector ev = hermitian_eigenvalues(mat_);
    if (ev(0) < -kPsdTolerance) {
      std::ostringstream os;
      os << "density operator has eigenvalue " << ev(0);
      throw ValidationError(os.str());
    }
    if (ev(0) < 0.0) {
      mat_ = spectral_function(hermitian_spectrum(mat_),
                               [](double x) { return Complex(std::max(x, 0.0), 0.0); });
    }
  }

  static DensityOperator maximally_mixed(Index d) {
    detail::require(d > 0, "maximally_mixed: dimension must be positive");
    return DensityOperator(identity(d) / static_cast<double>(d));
  }

  static DensityOperator pure(const Vector& psi) {
    detail::require(psi.size() > 0 && psi.norm() > 0.0, "pure: zero vector");
    return DensityOperator(outer(psi.normalized()));
  }

  Index dim() const { return mat_.rows(); }
  const Matrix& matrix() const { return mat_; }

 private:
  Matrix mat_;
};

/// Result of projecting a Hermitian matrix onto the state space.
struct ClippedDensity {
  DensityOperator state;
  /// Sum of magnitudes of the eigenvalues that were zeroed.
  double clip_magnitude;
};

/// Zeroes negative eigenvalues and renormalizes to unit trace.
inline ClippedDensity clip_to_density(const Matrix& m) {
  detail::require_dims(m.rows() == m.cols() && m.rows() > 0, "clip_to_density: not square");
  detail::require(detail::all_finite(m), "clip_to_density: non-finite entries");
  const Spectrum s = hermitian_spectrum(m);
  double clipped = 0.0;
  double kept = 0.0;
  for (Index i = 0; i < s.eigenvalues.size(); ++i) {
    if (s.eigenvalues(i) < 0.0)
      clipped -= s.eigenvalues(i);
    else
      kept += s.eigenvalues(i);
  }
  if (kept <= 0.0) throw NotCompletelyPositive("clip_to_density: no positive spectrum left");
  Matrix out = spectral_function(s, [kept](double x) { return Complex(std::max(x, 0.0) / kept, 0.0); });
  return {DensityOperator(hermitian_part(out)), clipped};
}

// ---------------------------------------------------------------------------
// PSD matrix functions

/// Spectral power m^exponent of a Hermitian PSD matrix.
///
/// For negative exponents, eigenvalues below `cutoff` raise SingularOperator.
/// The default cutoff is 1e-12 times the largest eigenvalue.
inline Matrix psd_power(const Matrix& m, double exponent,
                        std::optional<double> cutoff = std::nullopt) {
  detail::require_dims(m.rows() == m.cols() && m.rows() > 0, "psd_power: matrix is not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  detail::require(hermiticity_error(m) <= 1e-10 * scale, "psd_power: matrix is not Hermitian");
  const Spectrum s = hermitian_spectrum(m);
  const double top = s.eigenvalues.maxCoeff();
  const double bottom = s.eigenvalues.minCoeff();
  detail::require(bottom >= -kPsdTolerance * std::max(1.0, std::abs(top)),
                  "psd_power: matrix is not positive semidefinite");
  if (exponent < 0.0) {
    const double limit = cutoff.value_or(1e-12 * top);
    if (top <= 0.0 || bottom < limit) {
      std::ostringstream os;
      os << "psd_power: smallest eigenvalue " << bottom << " is below cutoff " << limit;
      throw SingularOperator(os.str());
    }
  }
  return spectral_function(s, [exponent](double x) {
    const double clipped = std::max(x, 0.0);
    if (clipped == 0.0) return Complex(exponent == 0.0 ? 1.0 : 0.0, 0.0);
    return Complex(std::pow(clipped, exponent), 0.0);
  });
}

namespace detail {

/// Square root of a PSD matrix with eigenvalues at the rounding floor
/// (4 n eps ||m||) set to zero.
inline Matrix psd_sqrt_floored(const Matrix& m) {
  const Spectrum s = hermitian_spectrum(m);
  const double top = std::max(s.eigenvalues.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  const double floor = 4.0 * static_cast<double>(m.rows()) * std::numeric_limits<double>::epsilon() * top;
  return spectral_function(s, [floor](double x) { return Complex(x > floor ? std::sqrt(x) : 0.0, 0.0); });
}

}  // namespace detail

/// (tr sqrt(sqrt(a) b sqrt(a)))^2 = ||sqrt(a) sqrt(b)||_1^2 for PSD a, b,
/// without normalization or clamping.
inline double psd_fidelity(const Matrix& a, const Matrix& b) {
  detail::require_dims(a.rows() == b.rows() && a.cols() == b.cols() && a.rows() == a.cols(),
                       "fidelity: operand sizes differ");
  for (const Matrix* m : {&a, &b}) {
    const double scale = std::max(1.0, m->cwiseAbs().maxCoeff());
    detail::require(hermiticity_error(*m) <= 1e-10 * scale, "fidelity: operand is not Hermitian");
    detail::require(hermitian_eigenvalues(*m)(0) >= -kPsdTolerance * scale,
                    "fidelity: operand is not positive semidefinite");
  }
  const double s = singular_values(detail::psd_sqrt_floored(a) * detail::psd_sqrt_floored(b)).sum();
  return s * s;
}

/// Mixed-state fidelity, clamped to [0, 1].
inline double state_fidelity(const DensityOperator& r1, const DensityOperator& r2) {
  detail::require_dims(r1.dim() == r2.dim(), "state_fidelity: dimensions differ");
  return std::clamp(psd_fidelity(r1.matrix(), r2.matrix()), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Random generation

namespace detail {

/// splitmix64 finalizer, used to derive independent substreams from one seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline Matrix gaussian_matrix(Index rows, Index cols, std::mt19937_64& gen) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(gen);
      const double im = normal(gen);
      m(i, j) = Complex(re, im) / std::sqrt(2.0);
    }
  return m;
}

}  // namespace detail

/// Haar-distributed d x d unitary: QR of a complex Gaussian matrix with the
/// phases of diag(R) moved into Q. Deterministic per seed.
inline Matrix random_unitary(Index d, std::uint64_t seed) {
  detail::require(d >= 1, "random_unitary: dimension must be positive");
  std::mt19937_64 gen(seed);
  const Matrix z = detail::gaussian_matrix(d, d, gen);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (Index j = 0; j < d; ++j) {
    const double a = std::abs(r(j, j));
    if (a > 0.0) q.col(j) *= r(j, j) / a;
  }
  return q;
}

/// Random unit vector, uniform on the sphere.
inline Vector random_state_vector(Index d, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  Vector v = detail::gaussian_matrix(d, 1, gen).col(0);
  return v.normalized();
}

/// Random density operator of the given rank (Wishart-type, trace one).
inline DensityOperator random_density(Index d, Index rank, std::uint64_t seed) {
  detail::require(d >= 1 && rank >= 1, "random_density: bad dimension or rank");
  std::mt19937_64 gen(seed);
  const Matrix g = detail::gaussian_matrix(d, rank, gen);
  Matrix m = g * g.adjoint();
  m /= m.trace().real();
  return DensityOperator(hermitian_part(m));
}

/// Random Hermitian matrix with unit operator norm and zero trace.
inline Matrix random_traceless_hermitian(Index d, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  Matrix h = hermitian_part(detail::gaussian_matrix(d, d, gen));
  h -= (h.trace() / static_cast<double>(d)) * identity(d);
  const double n = operator_norm(h);
  return n > 0.0 ? Matrix(h / n) : h;
}

}  // namespace qsysid
