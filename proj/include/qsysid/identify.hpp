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

// Channel identification from an entangled probe.
//
// An invertible reference state rho = sum_i p_i |phi_i><phi_i| on H1 is
// purified to Omega_rho = sum_i sqrt(p_i) phi_i (x) phi_i. Sending the first
// half through an unknown channel T gives the bipartite output
//
//   w = (T (x) id)(|Omega_rho><Omega_rho|)          on E = H2 (x) H1,
//
// and T is recovered from w through the Radon-Nikodym operator
//
//   F = (1 (x) rho^-1) w (1 (x) rho^-1),   T(sigma) = V^dagger (sigma (x) F) V,
//
// where V : H2 -> H1 (x) E is the isometry
// V psi = sum_{i,mu} sqrt(p_i) <f_mu|psi> phi_i (x) f_mu (x) phi_i.

#pragma once

#include <optional>
#include <utility>

#include "qsysid/channel.hpp"
#include "qsysid/errors.hpp"
#include "qsysid/linalg.hpp"

namespace qsysid {

inline constexpr double kAdmissibilityCutoff = 1e-10;

/// Invertible density operator with its spectral data cached.
class ReferenceState {
 public:
  Index dim() const { return rho_.dim(); }
  const DensityOperator& rho() const { return rho_; }
  /// p_i ascending, phi_i as columns.
  const Spectrum& spectrum() const { return spectrum_; }
  /// Orthonormal basis f_mu of H2 as columns; empty means computational.
  const Matrix& out_basis() const { return out_basis_; }
  double min_eig() const { return spectrum_.eigenvalues(0); }
  double cutoff() const { return cutoff_; }

  const Matrix& inverse() const { return inverse_; }
  const Matrix& inverse_sqrt() const { return inverse_sqrt_; }
  /// ||rho^-1||_op = 1 / min_eig.
  double inverse_norm() const { return 1.0 / min_eig(); }

  /// f_mu for an output space of dimension d2.
  Matrix out_basis_for(Index d2) const {
    if (out_basis_.size() == 0) return identity(d2);
    detail::require_dims(out_basis_.rows() == d2,
                         "reference output basis has dimension " + std::to_string(out_basis_.rows()) +
                             ", channel output dimension is " + std::to_string(d2));
    return out_basis_;
  }

  friend ReferenceState make_reference(const Spectrum& spectrum, double cutoff, Matrix out_basis);

 private:
  ReferenceState(DensityOperator rho, Spectrum spectrum, Matrix out_basis, double cutoff)
      : rho_(std::move(rho)),
        spectrum_(std::move(spectrum)),
        out_basis_(std::move(out_basis)),
        cutoff_(cutoff),
        inverse_(spectral_function(spectrum_, [](double p) { return Complex(1.0 / p, 0.0); })),
        inverse_sqrt_(spectral_function(spectrum_, [](double p) { return Complex(1.0 / std::sqrt(p), 0.0); })) {}

  DensityOperator rho_;
  Spectrum spectrum_;
  Matrix out_basis_;
  double cutoff_;
  Matrix inverse_;
  Matrix inverse_sqrt_;
};

/// Reference state from an explicit eigenbasis, for callers that need to pin
/// the basis inside degenerate eigenspaces.
inline ReferenceState make_reference(const Spectrum& spectrum, double cutoff = kAdmissibilityCutoff,
                                     Matrix out_basis = {}) {
  const Index d = spectrum.eigenvalues.size();
  detail::require(d >= 1, "make_reference: empty spectrum");
  detail::require_dims(spectrum.eigenvectors.rows() == d && spectrum.eigenvectors.cols() == d,
                       "make_reference: eigenvector matrix has the wrong size");
  detail::require(operator_norm(spectrum.eigenvectors.adjoint() * spectrum.eigenvectors - identity(d)) <= 1e-10,
                  "make_reference: eigenvectors are not orthonormal");
  for (Index i = 1; i < d; ++i)
    detail::require(spectrum.eigenvalues(i) >= spectrum.eigenvalues(i - 1),
                    "make_reference: eigenvalues must ascend");
  detail::require(std::abs(spectrum.eigenvalues.sum() - 1.0) <= 1e-10,
                  "make_reference: eigenvalues do not sum to one");
  if (out_basis.size() != 0) {
    detail::require(out_basis.rows() == out_basis.cols() &&
                        operator_norm(out_basis.adjoint() * out_basis - identity(out_basis.rows())) <= 1e-10,
                    "make_reference: output basis is not unitary");
  }
  if (!(spectrum.eigenvalues(0) > cutoff)) {
    std::ostringstream os;
    os << "reference state is not admissible: smallest eigenvalue " << spectrum.eigenvalues(0)
       << " is not above cutoff " << cutoff;
    throw NotAdmissible(os.str());
  }
  DensityOperator rho(hermitian_part(spectrum.reconstruct()));
  return ReferenceState(std::move(rho), spectrum, std::move(out_basis), cutoff);
}

inline ReferenceState make_reference(const DensityOperator& rho, double cutoff = kAdmissibilityCutoff,
                                     Matrix out_basis = {}) {
  Spectrum s = hermitian_spectrum(rho.matrix());
  // Renormalize away eigensolver drift so sum p_i = 1 holds to rounding.
  if (s.eigenvalues(0) > cutoff) s.eigenvalues /= s.eigenvalues.sum();
  return make_reference(s, cutoff, std::move(out_basis));
}

// ---------------------------------------------------------------------------

/// Purification of the reference state.
struct OmegaState {
  Vector vector;
  DensityOperator projector;
};

inline OmegaState omega(const ReferenceState& ref) {
  const Index d = ref.dim();
  Vector v = Vector::Zero(d * d);
  for (Index i = 0; i < d; ++i) {
    const Vector phi = ref.spectrum().eigenvectors.col(i);
    v += std::sqrt(ref.spectrum().eigenvalues(i)) * tensor_product(phi, phi);
  }
  return {v, DensityOperator(outer(v))};
}

namespace detail {

inline void require_channel_input(const KrausChannel& t, const ReferenceState& ref, const char* what) {
  require_dims(t.dim_in() == ref.dim(), std::string(what) + ": channel input dimension " +
                                            std::to_string(t.dim_in()) + " differs from reference dimension " +
                                            std::to_string(ref.dim()));
}

inline void require_output_state(const Matrix& w, const ReferenceState& ref, Index d2, const char* what) {
  require(d2 >= 1, std::string(what) + ": output dimension must be positive");
  require_dims(w.rows() == d2 * ref.dim() && w.cols() == w.rows(),
               std::string(what) + ": state is " + dims_string(w.rows(), w.cols()) + ", expected " +
                   std::to_string(d2 * ref.dim()) + " square");
}

/// (1 (x) b) m (1 (x) b) on C^d2 (x) H1.
inline Matrix sandwich_second(const Matrix& m, const Matrix& b, Index d2) {
  const Matrix lift = tensor_product(identity(d2), b);
  return lift * m * lift;
}

}  // namespace detail

/// w = (T (x) id)(|Omega_rho><Omega_rho|) on H2 (x) H1.
inline Matrix forward_map_matrix(const KrausChannel& t, const ReferenceState& ref) {
  detail::require_channel_input(t, ref, "forward_map");
  const Vector v = omega(ref).vector;
  const Matrix id = identity(ref.dim());
  Matrix w = Matrix::Zero(t.dim_out() * ref.dim(), t.dim_out() * ref.dim());
  for (const Matrix& a : t.kraus()) {
    const Vector u = tensor_product(a, id) * v;
    w.noalias() += u * u.adjoint();
  }
  return hermitian_part(w);
}

/// Forward map for a channel; the output is a state on H2 (x) H1.
inline DensityOperator forward_map(const KrausChannel& t, const ReferenceState& ref) {
  return DensityOperator(forward_map_matrix(t, ref));
}

/// Matrix of V_rho : H2 -> H1 (x) H2 (x) H1, columns indexed by the
/// computational basis of H2.
inline Matrix v_isometry(const ReferenceState& ref, Index d2) {
  detail::require(d2 >= 1, "v_isometry: output dimension must be positive");
  const Index d1 = ref.dim();
  const Matrix f = ref.out_basis_for(d2);
  Matrix v = Matrix::Zero(d1 * d2 * d1, d2);
  for (Index c = 0; c < d2; ++c) {
    Vector psi = Vector::Zero(d2);
    psi(c) = 1.0;
    Vector col = Vector::Zero(d1 * d2 * d1);
    for (Index i = 0; i < d1; ++i) {
      const Vector phi = ref.spectrum().eigenvectors.col(i);
      const double amp = std::sqrt(ref.spectrum().eigenvalues(i));
      for (Index mu = 0; mu < d2; ++mu) {
        const Complex coeff = amp * f.col(mu).dot(psi);
        if (coeff == 0.0) continue;
        col += coeff * tensor_product(tensor_product(phi, Vector(f.col(mu))), phi);
      }
    }
    v.col(c) = col;
  }
  return v;
}

/// Positive operator on E = H2 (x) H1 representing a CP map relative to V_rho.
struct RNOperator {
  Matrix mat;
};

/// F = (1 (x) rho^-1) w (1 (x) rho^-1) for an arbitrary bipartite output w.
inline RNOperator rn_operator_from_output(const Matrix& w, const ReferenceState& ref, Index d2) {
  detail::require_output_state(w, ref, d2, "rn_operator");
  return {hermitian_part(detail::sandwich_second(w, ref.inverse(), d2))};
}

inline RNOperator rn_operator(const KrausChannel& t, const ReferenceState& ref) {
  return rn_operator_from_output(forward_map_matrix(t, ref), ref, t.dim_out());
}

/// V^dagger (sigma (x) F) V. sigma may be any operator on H1.
inline Matrix apply_rn(const Matrix& v, const RNOperator& f, const Matrix& sigma) {
  detail::require_dims(sigma.rows() == sigma.cols(), "apply_rn: sigma is not square");
  detail::require_dims(f.mat.rows() == f.mat.cols(), "apply_rn: F is not square");
  detail::require_dims(v.rows() == sigma.rows() * f.mat.rows(),
                       "apply_rn: isometry has " + std::to_string(v.rows()) + " rows, expected " +
                           std::to_string(sigma.rows() * f.mat.rows()));
  return v.adjoint() * tensor_product(sigma, f.mat) * v;
}

// ---------------------------------------------------------------------------
// Inverse map

struct ReconstructionResult {
  KrausChannel cp_map;
  /// ||sum A^dagger A - 1||_op of cp_map.
  double tp_residual;
  /// Trace-norm violation of the consistency condition by the input w.
  double consistency_residual;
};

/// ||tr_H2[(1 (x) rho^-1/2) w (1 (x) rho^-1/2)] - 1||_1.
inline double consistency_residual(const Matrix& w, const ReferenceState& ref, Index d2) {
  detail::require_output_state(w, ref, d2, "consistency_residual");
  const Matrix scaled = detail::sandwich_second(w, ref.inverse_sqrt(), d2);
  const Matrix marginal = partial_trace(scaled, d2, ref.dim(), Factor::first);
  return trace_norm(hermitian_part(marginal - identity(ref.dim())));
}

inline double consistency_residual(const DensityOperator& w, const ReferenceState& ref, Index d2) {
  return consistency_residual(w.matrix(), ref, d2);
}

struct ReconstructOptions {
  /// Choi eigenvalues at or below this are dropped from the Kraus set.
  double rank_cutoff = 1e-12;
};

/// Inverse of the forward map: sigma -> V^dagger (sigma (x) F_w) V, returned
/// in Kraus form. The result is never projected onto trace-preserving maps.
///
/// w must be Hermitian and PSD to within 1e-10 (NotCompletelyPositive
/// otherwise); use clip_to_density first for noisy data.
inline ReconstructionResult reconstruct(const Matrix& w, const ReferenceState& ref, Index d2,
                                        const ReconstructOptions& opts = {}) {
  detail::require_output_state(w, ref, d2, "reconstruct");
  detail::require(hermiticity_error(w) <= 1e-10, "reconstruct: state is not Hermitian");
  const double lowest = hermitian_eigenvalues(w)(0);
  if (lowest < -kPsdTolerance) {
    std::ostringstream os;
    os << "reconstruct: state has eigenvalue " << lowest;
    throw NotCompletelyPositive(os.str());
  }
  const Index d1 = ref.dim();
  const RNOperator f = rn_operator_from_output(w, ref, d2);
  const Matrix v = v_isometry(ref, d2);

  Matrix c = Matrix::Zero(d2 * d1, d2 * d1);
  for (Index i = 0; i < d1; ++i)
    for (Index j = 0; j < d1; ++j) {
      const Matrix block = apply_rn(v, f, basis_operator(i, j, d1));
      for (Index mu = 0; mu < d2; ++mu)
        for (Index nu = 0; nu < d2; ++nu) c(mu * d1 + i, nu * d1 + j) = block(mu, nu);
    }
  KrausChannel recovered = from_choi({d1, d2, hermitian_part(c), false}, opts.rank_cutoff);
  const double tp = recovered.tp_residual();
  return {std::move(recovered), tp, consistency_residual(w, ref, d2)};
}

inline ReconstructionResult reconstruct(const DensityOperator& w, const ReferenceState& ref, Index d2,
                                        const ReconstructOptions& opts = {}) {
  return reconstruct(w.matrix(), ref, d2, opts);
}

}  // namespace qsysid
