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

// Completely positive maps B(H1) -> B(H2) in Kraus, Choi and Stinespring form.

#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "qsysid/errors.hpp"
#include "qsysid/linalg.hpp"

namespace qsysid {

inline constexpr double kTracePreservingTolerance = 1e-9;
inline constexpr double kChoiPsdTolerance = 1e-9;

/// CP map rho -> sum_k A_k rho A_k^dagger with A_k : C^dim_in -> C^dim_out.
///
/// Trace preservation is not required; channels recovered from noisy data and
/// dominated maps share this type. trace_preserving() reports the flag.
class KrausChannel {
 public:
  KrausChannel(Index dim_in, Index dim_out, std::vector<Matrix> kraus)
      : dim_in_(dim_in), dim_out_(dim_out), kraus_(std::move(kraus)) {
    detail::require(dim_in_ > 0 && dim_out_ > 0, "KrausChannel: dimensions must be positive");
    detail::require(!kraus_.empty(), "KrausChannel: Kraus list is empty");
    Matrix gram = Matrix::Zero(dim_in_, dim_in_);
    for (const Matrix& a : kraus_) {
      detail::require_dims(a.rows() == dim_out_ && a.cols() == dim_in_,
                           "KrausChannel: Kraus operator is " +
                               detail::dims_string(a.rows(), a.cols()) + ", expected " +
                               detail::dims_string(dim_out_, dim_in_));
      detail::require(detail::all_finite(a), "KrausChannel: non-finite Kraus entry");
      gram += a.adjoint() * a;
    }
    tp_residual_ = operator_norm(gram - identity(dim_in_));
  }

  Index dim_in() const { return dim_in_; }
  Index dim_out() const { return dim_out_; }
  const std::vector<Matrix>& kraus() const { return kraus_; }
  std::size_t kraus_count() const { return kraus_.size(); }

  /// ||sum_k A_k^dagger A_k - 1||_op.
  double tp_residual() const { return tp_residual_; }
  bool trace_preserving(double tol = kTracePreservingTolerance) const { return tp_residual_ <= tol; }

 private:
  Index dim_in_;
  Index dim_out_;
  std::vector<Matrix> kraus_;
  double tp_residual_;
};

/// Choi operator on H2 (x) H1 (output factor first):
/// C[(mu,i),(nu,j)] = <mu| T(|i><j|) |nu>, divided by dim_in when normalized.
struct ChoiMatrix {
  Index dim_in;
  Index dim_out;
  Matrix mat;
  bool normalized;
};

/// Stinespring isometry in the V : H2 -> H1 (x) E convention, with
/// T(rho) = V^dagger (rho (x) 1_E) V.
struct StinespringPair {
  Matrix v;
  Index dim_env;
};

// ---------------------------------------------------------------------------
// Evaluation

inline Matrix apply_channel(const KrausChannel& t, const Matrix& x) {
  detail::require_dims(x.rows() == t.dim_in() && x.cols() == t.dim_in(),
                       "apply: input is " + detail::dims_string(x.rows(), x.cols()) +
                           ", channel input dimension is " + std::to_string(t.dim_in()));
  Matrix out = Matrix::Zero(t.dim_out(), t.dim_out());
  for (const Matrix& a : t.kraus()) out.noalias() += a * x * a.adjoint();
  return out;
}

/// Output as a state; throws ValidationError if t does not preserve trace.
inline DensityOperator apply_channel(const KrausChannel& t, const DensityOperator& rho) {
  return DensityOperator(hermitian_part(apply_channel(t, rho.matrix())));
}

/// Heisenberg-picture dual X -> sum_k A_k^dagger X A_k.
inline Matrix dual_apply(const KrausChannel& t, const Matrix& x) {
  detail::require_dims(x.rows() == t.dim_out() && x.cols() == t.dim_out(),
                       "dual_apply: observable is " + detail::dims_string(x.rows(), x.cols()) +
                           ", channel output dimension is " + std::to_string(t.dim_out()));
  Matrix out = Matrix::Zero(t.dim_in(), t.dim_in());
  for (const Matrix& a : t.kraus()) out.noalias() += a.adjoint() * x * a;
  return out;
}

// ---------------------------------------------------------------------------
// Choi correspondence

namespace detail {

/// Row-major vectorization: vec(A)[mu * cols + i] = A(mu, i).
inline Vector vec_row_major(const Matrix& a) {
  Vector v(a.size());
  for (Index mu = 0; mu < a.rows(); ++mu)
    for (Index i = 0; i < a.cols(); ++i) v(mu * a.cols() + i) = a(mu, i);
  return v;
}

inline Matrix unvec_row_major(const Vector& v, Index rows, Index cols) {
  Matrix a(rows, cols);
  for (Index mu = 0; mu < rows; ++mu)
    for (Index i = 0; i < cols; ++i) a(mu, i) = v(mu * cols + i);
  return a;
}

}  // namespace detail

inline ChoiMatrix choi(const KrausChannel& t, bool normalized = false) {
  const Index n = t.dim_out() * t.dim_in();
  Matrix c = Matrix::Zero(n, n);
  for (const Matrix& a : t.kraus()) {
    const Vector v = detail::vec_row_major(a);
    c.noalias() += v * v.adjoint();
  }
  if (normalized) c /= static_cast<double>(t.dim_in());
  return {t.dim_in(), t.dim_out(), hermitian_part(c), normalized};
}

/// Minimal Kraus set from the eigendecomposition of a Choi matrix.
///
/// Eigenpairs with eigenvalue above rank_cutoff become A_k = sqrt(lambda_k)
/// unvec(v_k), largest eigenvalue first. A Choi matrix with no eigenvalue
/// above the cutoff yields the zero map.
inline KrausChannel from_choi(const ChoiMatrix& c, double rank_cutoff = 1e-12) {
  const Index n = c.dim_out * c.dim_in;
  detail::require_dims(c.mat.rows() == n && c.mat.cols() == n,
                       "from_choi: matrix is " + detail::dims_string(c.mat.rows(), c.mat.cols()) +
                           ", expected " + std::to_string(n) + " square");
  detail::require(hermiticity_error(c.mat) <= 1e-10 * std::max(1.0, c.mat.cwiseAbs().maxCoeff()),
                  "from_choi: Choi matrix is not Hermitian");
  const Matrix unnormalized = c.normalized ? Matrix(c.mat * static_cast<double>(c.dim_in)) : c.mat;
  const Spectrum s = hermitian_spectrum(unnormalized);
  const double scale = std::max(1.0, std::abs(s.eigenvalues.maxCoeff()));
  if (s.eigenvalues(0) < -kChoiPsdTolerance * scale) {
    std::ostringstream os;
    os << "from_choi: Choi matrix has eigenvalue " << s.eigenvalues(0);
    throw NotCompletelyPositive(os.str());
  }
  std::vector<Matrix> kraus;
  for (Index k = n - 1; k >= 0; --k) {
    const double lambda = s.eigenvalues(k);
    if (lambda <= rank_cutoff) break;
    kraus.push_back(std::sqrt(lambda) *
                    detail::unvec_row_major(s.eigenvectors.col(k), c.dim_out, c.dim_in));
  }
  if (kraus.empty()) kraus.push_back(Matrix::Zero(c.dim_out, c.dim_in));
  return KrausChannel(c.dim_in, c.dim_out, std::move(kraus));
}

/// Linearly independent Kraus set for the same map.
inline KrausChannel canonicalize(const KrausChannel& t) { return from_choi(choi(t)); }

// ---------------------------------------------------------------------------
// Constructions

/// T (x) id_{d_anc}, acting on H1 (x) C^d_anc.
inline KrausChannel tensor_with_identity(const KrausChannel& t, Index d_anc) {
  detail::require(d_anc >= 1, "tensor_with_identity: ancilla dimension must be positive");
  std::vector<Matrix> kraus;
  kraus.reserve(t.kraus_count());
  const Matrix id = identity(d_anc);
  for (const Matrix& a : t.kraus()) kraus.push_back(tensor_product(a, id));
  return KrausChannel(t.dim_in() * d_anc, t.dim_out() * d_anc, std::move(kraus));
}

/// S (x) T on H1(S) (x) H1(T).
inline KrausChannel tensor(const KrausChannel& s, const KrausChannel& t) {
  std::vector<Matrix> kraus;
  kraus.reserve(s.kraus_count() * t.kraus_count());
  for (const Matrix& a : s.kraus())
    for (const Matrix& b : t.kraus()) kraus.push_back(tensor_product(a, b));
  return KrausChannel(s.dim_in() * t.dim_in(), s.dim_out() * t.dim_out(), std::move(kraus));
}

/// outer o inner.
inline KrausChannel compose(const KrausChannel& outer_map, const KrausChannel& inner_map) {
  detail::require_dims(outer_map.dim_in() == inner_map.dim_out(),
                       "compose: inner output and outer input dimensions differ");
  std::vector<Matrix> kraus;
  kraus.reserve(outer_map.kraus_count() * inner_map.kraus_count());
  for (const Matrix& a : outer_map.kraus())
    for (const Matrix& b : inner_map.kraus()) kraus.push_back(a * b);
  return KrausChannel(inner_map.dim_in(), outer_map.dim_out(), std::move(kraus));
}

/// factor * T for factor >= 0.
inline KrausChannel scale(const KrausChannel& t, double factor) {
  detail::require(factor >= 0.0, "scale: factor must be nonnegative");
  std::vector<Matrix> kraus;
  for (const Matrix& a : t.kraus()) kraus.push_back(std::sqrt(factor) * a);
  return KrausChannel(t.dim_in(), t.dim_out(), std::move(kraus));
}

/// (1 - weight) * T1 + weight * T2.
inline KrausChannel mixture(const KrausChannel& t1, const KrausChannel& t2, double weight) {
  detail::require(weight >= 0.0 && weight <= 1.0, "mixture: weight must lie in [0, 1]");
  detail::require_dims(t1.dim_in() == t2.dim_in() && t1.dim_out() == t2.dim_out(),
                       "mixture: dimension pairs differ");
  std::vector<Matrix> kraus;
  for (const Matrix& a : t1.kraus()) kraus.push_back(std::sqrt(1.0 - weight) * a);
  for (const Matrix& b : t2.kraus()) kraus.push_back(std::sqrt(weight) * b);
  return KrausChannel(t1.dim_in(), t1.dim_out(), std::move(kraus));
}

/// V = sum_k A_k^dagger (x) |e_k>, one environment level per Kraus operator.
/// Pass a canonicalized channel to get a minimal environment.
inline StinespringPair stinespring(const KrausChannel& t) {
  const Index env = static_cast<Index>(t.kraus_count());
  Matrix v = Matrix::Zero(t.dim_in() * env, t.dim_out());
  for (Index k = 0; k < env; ++k) {
    const Matrix adj = t.kraus()[static_cast<std::size_t>(k)].adjoint();
    for (Index i = 0; i < t.dim_in(); ++i) v.row(i * env + k) = adj.row(i);
  }
  return {std::move(v), env};
}

/// V^dagger (rho (x) 1_E) V.
inline Matrix dilation_apply(const StinespringPair& p, const Matrix& rho) {
  detail::require_dims(rho.rows() * p.dim_env == p.v.rows() && rho.rows() == rho.cols(),
                       "dilation_apply: input dimension does not match the dilation");
  return p.v.adjoint() * tensor_product(rho, identity(p.dim_env)) * p.v;
}

/// True iff lambda * T - S is completely positive, i.e. lambda C(T) - C(S) is
/// PSD to within -1e-9.
inline bool is_completely_dominated(const KrausChannel& s, const KrausChannel& t, double lambda) {
  detail::require_dims(s.dim_in() == t.dim_in() && s.dim_out() == t.dim_out(),
                       "is_completely_dominated: dimension pairs differ");
  detail::require(lambda >= 0.0, "is_completely_dominated: lambda must be nonnegative");
  const Matrix diff = lambda * choi(t).mat - choi(s).mat;
  return hermitian_eigenvalues(diff)(0) >= -kChoiPsdTolerance;
}

// ---------------------------------------------------------------------------
// Generators and fixtures

/// Random channel with kraus_rank Kraus operators: A_j = (1 (x) <e_j|) W, W the
/// first d1 columns of a Haar unitary on C^d2 (x) C^kraus_rank.
inline KrausChannel random_channel(Index d1, Index d2, Index kraus_rank, std::uint64_t seed) {
  detail::require(d1 >= 1 && d2 >= 1, "random_channel: dimensions must be positive");
  detail::require(kraus_rank >= 1 && kraus_rank <= d1 * d2,
                  "random_channel: Kraus rank must lie in [1, d1*d2]");
  detail::require(d2 * kraus_rank >= d1,
                  "random_channel: no trace-preserving map with d2*rank < d1 exists");
  const Matrix u = random_unitary(d2 * kraus_rank, seed);
  const Matrix w = u.leftCols(d1);
  std::vector<Matrix> kraus;
  for (Index j = 0; j < kraus_rank; ++j) {
    Matrix a(d2, d1);
    for (Index mu = 0; mu < d2; ++mu) a.row(mu) = w.row(mu * kraus_rank + j);
    kraus.push_back(std::move(a));
  }
  return KrausChannel(d1, d2, std::move(kraus));
}

/// Random CP map with Gaussian Kraus operators (generally not trace preserving).
inline KrausChannel random_cp_map(Index d1, Index d2, Index count, std::uint64_t seed) {
  detail::require(count >= 1, "random_cp_map: need at least one Kraus operator");
  std::mt19937_64 gen(seed);
  std::vector<Matrix> kraus;
  for (Index k = 0; k < count; ++k) kraus.push_back(detail::gaussian_matrix(d2, d1, gen));
  return KrausChannel(d1, d2, std::move(kraus));
}

inline KrausChannel identity_channel(Index d) { return KrausChannel(d, d, {identity(d)}); }

inline KrausChannel zero_map(Index d1, Index d2) {
  return KrausChannel(d1, d2, {Matrix::Zero(d2, d1)});
}

inline KrausChannel unitary_channel(const Matrix& u) {
  detail::require(u.rows() == u.cols() && u.rows() > 0, "unitary_channel: matrix not square");
  detail::require(operator_norm(u.adjoint() * u - identity(u.rows())) <= 1e-10,
                  "unitary_channel: matrix is not unitary");
  return KrausChannel(u.rows(), u.rows(), {u});
}

/// rho -> (1 - lambda) rho + lambda tr(rho) 1/d, with Weyl operators X^a Z^b as Kraus set.
inline KrausChannel depolarizing_channel(Index d, double lambda) {
  detail::require(d >= 1, "depolarizing_channel: dimension must be positive");
  detail::require(lambda >= 0.0 && lambda <= 1.0, "depolarizing_channel: lambda must lie in [0, 1]");
  const double dd = static_cast<double>(d);
  const double pi = std::acos(-1.0);
  Matrix shift = Matrix::Zero(d, d);
  Matrix clock = Matrix::Zero(d, d);
  for (Index j = 0; j < d; ++j) {
    shift((j + 1) % d, j) = 1.0;
    clock(j, j) = std::polar(1.0, 2.0 * pi * static_cast<double>(j) / dd);
  }
  std::vector<Matrix> kraus;
  Matrix xa = identity(d);
  for (Index a = 0; a < d; ++a) {
    Matrix weyl = xa;
    for (Index b = 0; b < d; ++b) {
      const double weight = (a == 0 && b == 0) ? 1.0 - lambda + lambda / (dd * dd) : lambda / (dd * dd);
      if (weight > 0.0) kraus.push_back(std::sqrt(weight) * weyl);
      weyl = weyl * clock;
    }
    xa = shift * xa;
  }
  return KrausChannel(d, d, std::move(kraus));
}

/// Qubit amplitude damping with decay probability gamma.
inline KrausChannel amplitude_damping_channel(double gamma) {
  detail::require(gamma >= 0.0 && gamma <= 1.0, "amplitude_damping_channel: gamma must lie in [0, 1]");
  Matrix k0 = Matrix::Zero(2, 2);
  Matrix k1 = Matrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - gamma);
  k1(0, 1) = std::sqrt(gamma);
  return KrausChannel(2, 2, {k0, k1});
}

}  // namespace qsysid
