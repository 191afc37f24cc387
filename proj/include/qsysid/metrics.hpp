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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "qsysid/channel.hpp"
#include "qsysid/identify.hpp"
#include "qsysid/linalg.hpp"

namespace qsysid {

/// Omega = d^-1/2 sum_i b_i (x) b_i for the columns b_i of `basis`
/// (computational basis when empty).
inline Vector maximally_entangled(Index d, const Matrix& basis = {}) {
  const Matrix b = basis.size() == 0 ? identity(d) : basis;
  detail::require_dims(b.rows() == d && b.cols() == d, "maximally_entangled: basis has the wrong size");
  Vector v = Vector::Zero(d * d);
  for (Index i = 0; i < d; ++i) v += tensor_product(Vector(b.col(i)), Vector(b.col(i)));
  return v / std::sqrt(static_cast<double>(d));
}

/// sigma = (T (x) id)(|Omega><Omega|), the normalized Choi state.
inline Matrix choi_state(const KrausChannel& t, const Matrix& basis = {}) {
  const Vector v = maximally_entangled(t.dim_in(), basis);
  const Matrix id = identity(t.dim_in());
  Matrix s = Matrix::Zero(t.dim_out() * t.dim_in(), t.dim_out() * t.dim_in());
  for (const Matrix& a : t.kraus()) {
    const Vector u = tensor_product(a, id) * v;
    s.noalias() += u * u.adjoint();
  }
  return hermitian_part(s);
}

namespace detail {

inline void require_same_dims(const KrausChannel& t1, const KrausChannel& t2, const char* what) {
  require_dims(t1.dim_in() == t2.dim_in() && t1.dim_out() == t2.dim_out(),
               std::string(what) + ": channels have different dimension pairs");
}

}  // namespace detail

/// Mixed-state fidelity of the two Choi states.
///
/// Either argument may be a non-trace-preserving CP map, e.g. a
/// reconstruction from noisy data; its Choi state is then rescaled to unit
/// trace first. The zero map has fidelity 0 with everything.
inline double channel_fidelity(const KrausChannel& t1, const KrausChannel& t2) {
  detail::require_same_dims(t1, t2, "channel_fidelity");
  Matrix s1 = choi_state(t1);
  Matrix s2 = choi_state(t2);
  const double tr1 = s1.trace().real();
  const double tr2 = s2.trace().real();
  if (!(tr1 > 0.0) || !(tr2 > 0.0)) return 0.0;
  s1 /= tr1;
  s2 /= tr2;
  return std::clamp(psd_fidelity(s1, s2), 0.0, 1.0);
}

struct FvdgGap {
  double lhs;  ///< 2 - 2 sqrt(F)
  double rhs;  ///< ||sigma1 - sigma2||_1
};

inline FvdgGap fvdg_gap(const KrausChannel& t1, const KrausChannel& t2) {
  detail::require_same_dims(t1, t2, "fvdg_gap");
  const double f = channel_fidelity(t1, t2);
  return {2.0 - 2.0 * std::sqrt(f), trace_norm(choi_state(t1) - choi_state(t2))};
}

// ---------------------------------------------------------------------------
// Worst-case reconstruction bound

struct BoundReport {
  double fidelity;
  double bound;
  double trace_dist_w;
  double rho_inv_norm;
  Index dim;

  /// Coefficient of ||w1 - w2||_1 inside the bound.
  double coefficient() const { return rho_inv_norm / (2.0 * static_cast<double>(dim)); }
};

/// (max(0, 1 - ||rho^-1|| * dist / (2 d1)))^2.
inline double fidelity_lower_bound(double rho_inv_norm, double trace_dist_w, Index d1) {
  const double inner = 1.0 - rho_inv_norm * trace_dist_w / (2.0 * static_cast<double>(d1));
  const double clamped = std::max(0.0, inner);
  return clamped * clamped;
}

/// Compares the fidelity of the two reconstructions with its analytic lower bound.
inline BoundReport worst_case_bound(const Matrix& w1, const Matrix& w2, const ReferenceState& ref,
                                    const ReconstructOptions& opts = {}) {
  detail::require_dims(w1.rows() == w2.rows() && w1.cols() == w2.cols(),
                       "worst_case_bound: states have different sizes");
  detail::require_dims(w1.rows() % ref.dim() == 0, "worst_case_bound: state size is not a multiple of d1");
  const Index d2 = w1.rows() / ref.dim();
  const ReconstructionResult r1 = reconstruct(w1, ref, d2, opts);
  const ReconstructionResult r2 = reconstruct(w2, ref, d2, opts);
  BoundReport report{};
  report.fidelity = channel_fidelity(r1.cp_map, r2.cp_map);
  report.trace_dist_w = trace_norm(hermitian_part(w1 - w2));
  report.rho_inv_norm = ref.inverse_norm();
  report.dim = ref.dim();
  report.bound = fidelity_lower_bound(report.rho_inv_norm, report.trace_dist_w, report.dim);
  return report;
}

inline BoundReport worst_case_bound(const DensityOperator& w1, const DensityOperator& w2,
                                    const ReferenceState& ref, const ReconstructOptions& opts = {}) {
  return worst_case_bound(w1.matrix(), w2.matrix(), ref, opts);
}

// ---------------------------------------------------------------------------
// CB-norm (diamond-norm) distance

/// Certified interval [lower, upper] for a CB norm.
struct NormInterval {
  double lower;
  double upper;
  /// Pure state on H1 (x) H1 at which `lower` was evaluated.
  Vector argmax_state;
};

struct CbOptions {
  int starts = 32;
  int max_iters = 500;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  /// Additional start vectors on H1 (x) H1, e.g. Omega_rho.
  std::vector<Vector> extra_starts;
};

/// ||((T1 - T2) (x) id)(|psi><psi|)||_1 for a unit vector psi on H1 (x) H1.
inline double cb_objective(const KrausChannel& t1, const KrausChannel& t2, const Vector& psi) {
  detail::require_same_dims(t1, t2, "cb_objective");
  const Index d1 = t1.dim_in();
  detail::require_dims(psi.size() == d1 * d1, "cb_objective: state must live on H1 (x) H1");
  const Vector unit = psi.normalized();
  const Matrix p = outer(unit);
  const Matrix diff = apply_channel(tensor_with_identity(t1, d1), p) - apply_channel(tensor_with_identity(t2, d1), p);
  return hermitian_eigenvalues(diff).cwiseAbs().sum();
}

namespace detail {

/// Alternating ascent: with S = sign(M(psi)) the objective at psi equals
/// <psi| Phi^dagger(S) |psi>, so moving psi to the top eigenvector of
/// Phi^dagger(S) cannot decrease it.
struct CbAscent {
  KrausChannel lifted1;
  KrausChannel lifted2;

  double objective(const Vector& psi) const {
    const Matrix p = outer(psi);
    return hermitian_eigenvalues(apply_channel(lifted1, p) - apply_channel(lifted2, p)).cwiseAbs().sum();
  }

  Vector run(Vector psi, int max_iters, double tol) const {
    psi.normalize();
    double value = objective(psi);
    for (int it = 0; it < max_iters; ++it) {
      const Matrix p = outer(psi);
      const Spectrum s = hermitian_spectrum(apply_channel(lifted1, p) - apply_channel(lifted2, p));
      const Matrix sign = spectral_function(s, [](double x) { return Complex(x >= 0.0 ? 1.0 : -1.0, 0.0); });
      const Matrix g = dual_apply(lifted1, sign) - dual_apply(lifted2, sign);
      const Spectrum gs = hermitian_spectrum(g);
      const Vector next = gs.eigenvectors.col(gs.eigenvectors.cols() - 1).normalized();
      const double next_value = objective(next);
      if (!(next_value > value + tol)) break;
      psi = next;
      value = next_value;
    }
    return psi;
  }
};

}  // namespace detail

/// Interval for ||T1 - T2||_cb with the ancilla dimension fixed to d1.
///
/// lower: best value of the ascent over random starts, the maximally
/// entangled state, every computational basis state and opts.extra_starts.
/// upper: min of ||tr_H2 |J|||_op and ||tr_H2 (J1 + J2)||_op with J = J1 - J2
/// the unnormalized Choi difference; both are feasible points of the dual
/// semidefinite program for Hermiticity-preserving maps.
inline NormInterval cb_distance_interval(const KrausChannel& t1, const KrausChannel& t2,
                                         const CbOptions& opts = {}) {
  detail::require_same_dims(t1, t2, "cb_distance_interval");
  const Index d1 = t1.dim_in();
  const Index d2 = t1.dim_out();
  const Index n = d1 * d1;

  const Matrix j1 = choi(t1).mat;
  const Matrix j2 = choi(t2).mat;
  const Matrix abs_j = spectral_function(hermitian_spectrum(j1 - j2),
                                         [](double x) { return Complex(std::abs(x), 0.0); });
  const double via_abs = operator_norm(partial_trace(abs_j, d2, d1, Factor::first));
  const double via_sum = operator_norm(partial_trace(j1 + j2, d2, d1, Factor::first));
  const double upper = std::min(via_abs, via_sum);

  const detail::CbAscent ascent{tensor_with_identity(t1, d1), tensor_with_identity(t2, d1)};
  std::vector<Vector> starts;
  starts.push_back(maximally_entangled(d1));
  for (Index k = 0; k < n; ++k) {
    Vector e = Vector::Zero(n);
    e(k) = 1.0;
    starts.push_back(e);
  }
  for (const Vector& v : opts.extra_starts) {
    detail::require_dims(v.size() == n, "cb_distance_interval: extra start has the wrong size");
    starts.push_back(v);
  }
  for (int s = 0; s < opts.starts; ++s)
    starts.push_back(random_state_vector(n, opts.seed + static_cast<std::uint64_t>(s)));

  NormInterval best{-1.0, upper, Vector::Zero(n)};
  for (const Vector& start : starts) {
    if (start.norm() == 0.0) continue;
    const Vector psi = ascent.run(start, opts.max_iters, opts.tol);
    const double value = cb_objective(t1, t2, psi);
    if (value > best.lower) {
      best.lower = value;
      best.argmax_state = psi.normalized();
    }
  }
  best.lower = std::max(best.lower, 0.0);
  return best;
}

/// CB norm of a channel. The lower end is evaluated at the maximally
/// entangled input and equals 1 up to rounding.
inline NormInterval cb_norm_of_channel(const KrausChannel& t) {
  detail::require(t.trace_preserving(), "cb_norm_of_channel: map is not trace preserving");
  const Index d1 = t.dim_in();
  const Vector psi = maximally_entangled(d1);
  const double lower = trace_norm(apply_channel(tensor_with_identity(t, d1), outer(psi)));
  const Matrix j = choi(t).mat;
  const Matrix abs_j = spectral_function(hermitian_spectrum(j), [](double x) { return Complex(std::abs(x), 0.0); });
  const double upper = operator_norm(partial_trace(abs_j, t.dim_out(), d1, Factor::first));
  return {lower, upper, psi};
}

}  // namespace qsysid
