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

#include <gtest/gtest.h>

#include "qsysid/metrics.hpp"
#include "test_support.hpp"

namespace qsysid {
namespace {

using testing::diag;
using testing::max_abs;

TEST(ChannelFidelity, KnownValues) {
  EXPECT_NEAR(channel_fidelity(identity_channel(2), identity_channel(2)), 1.0, 1e-12);
  EXPECT_NEAR(channel_fidelity(identity_channel(2), depolarizing_channel(2, 1.0)), 0.25, 1e-12);
  EXPECT_NEAR(channel_fidelity(identity_channel(2), unitary_channel(diag({1.0, Complex(0.0, 1.0)}))), 0.5, 1e-12);
}

TEST(ChannelFidelity, UnitaryPairsMatchOverlap) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Index d = testing::small_dim(s, 0);
    const Matrix u = random_unitary(d, s), v = random_unitary(d, 100 + s);
    const double expected = std::norm((u.adjoint() * v).trace()) / static_cast<double>(d * d);
    EXPECT_NEAR(channel_fidelity(unitary_channel(u), unitary_channel(v)), expected, 1e-9);
  }
}

TEST(ChannelFidelity, SymmetricAndBounded) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Index d1 = testing::small_dim(s, 0), d2 = testing::small_dim(s, 1);
    const KrausChannel a = testing::random_test_channel(d1, d2, s);
    const KrausChannel b = testing::random_test_channel(d1, d2, 300 + s);
    const double f = channel_fidelity(a, b);
    EXPECT_NEAR(f, channel_fidelity(b, a), 1e-8);
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 1.0);
  }
}

TEST(ChannelFidelity, NonTracePreservingMaps) {
  const KrausChannel t = random_channel(2, 3, 2, 3);
  EXPECT_NEAR(channel_fidelity(t, scale(t, 2.0)), 1.0, 1e-9);
  EXPECT_EQ(channel_fidelity(t, zero_map(2, 3)), 0.0);
  const KrausChannel cp = random_cp_map(2, 3, 2, 4);
  const double f = channel_fidelity(t, cp);
  EXPECT_GE(f, 0.0);
  EXPECT_LE(f, 1.0);
  EXPECT_NEAR(f, channel_fidelity(t, scale(cp, 0.3)), 1e-9);
}

TEST(ChannelFidelity, DimensionMismatch) {
  EXPECT_THROW(channel_fidelity(identity_channel(2), identity_channel(3)), DimensionMismatch);
}

TEST(ChoiState, IsStateAndBasisIndependentTrace) {
  const KrausChannel t = random_channel(3, 2, 2, 4);
  const Matrix s1 = choi_state(t);
  const Matrix s2 = choi_state(t, random_unitary(3, 5));
  EXPECT_NEAR(s1.trace().real(), 1.0, 1e-13);
  EXPECT_NEAR(s2.trace().real(), 1.0, 1e-13);
  EXPECT_LT(max_abs(s1 - choi(t, true).mat), 1e-13);
}

TEST(Fvdg, Holds) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const Index d1 = testing::small_dim(s, 0), d2 = testing::small_dim(s, 1);
    const FvdgGap g = fvdg_gap(testing::random_test_channel(d1, d2, s), testing::random_test_channel(d1, d2, 50 + s));
    EXPECT_LE(g.lhs, g.rhs + 1e-9);
  }
}

TEST(Fvdg, PureChoiStates) {
  const Matrix u = random_unitary(2, 1), v = random_unitary(2, 2);
  const FvdgGap g = fvdg_gap(unitary_channel(u), unitary_channel(v));
  const double f = channel_fidelity(unitary_channel(u), unitary_channel(v));
  EXPECT_NEAR(g.rhs, 2.0 * std::sqrt(1.0 - f), 1e-9);
}

TEST(Bound, FormulaCases) {
  EXPECT_EQ(fidelity_lower_bound(2.0, 0.0, 2), 1.0);
  EXPECT_EQ(fidelity_lower_bound(2.0, 10.0, 2), 0.0);
  EXPECT_NEAR(fidelity_lower_bound(2.0, 0.5, 2), 0.5625, 1e-15);
  double prev = 1.0;
  for (double dist = 0.0; dist <= 2.0; dist += 0.1) {
    const double b = fidelity_lower_bound(5.0, dist, 3);
    EXPECT_LE(b, prev);
    prev = b;
  }
}

TEST(Bound, MaximallyMixedCoefficientIsHalf) {
  for (Index d = 1; d <= 4; ++d) {
    const ReferenceState ref = make_reference(DensityOperator::maximally_mixed(d));
    const Matrix w = forward_map_matrix(identity_channel(d), ref);
    EXPECT_EQ(worst_case_bound(w, w, ref).coefficient(), 0.5);
  }
}

TEST(Bound, IdenticalStates) {
  const ReferenceState ref = testing::random_reference(2, 3);
  const Matrix w = forward_map_matrix(random_channel(2, 2, 2, 4), ref);
  const BoundReport r = worst_case_bound(w, w, ref);
  EXPECT_NEAR(r.fidelity, 1.0, 1e-9);
  EXPECT_EQ(r.bound, 1.0);
  EXPECT_EQ(r.trace_dist_w, 0.0);
}

TEST(Bound, HoldsOnRandomTriples) {
  for (std::uint64_t s = 0; s < 60; ++s) {
    const Index d1 = testing::small_dim(s, 0), d2 = testing::small_dim(s, 1);
    const KrausChannel t1 = testing::random_test_channel(d1, d2, s);
    const KrausChannel t2 = mixture(t1, testing::random_test_channel(d1, d2, 700 + s), 0.002 * static_cast<double>(s % 10));
    const ReferenceState ref = testing::random_reference(d1, 800 + s, 0.2);
    const BoundReport r = worst_case_bound(forward_map(t1, ref), forward_map(t2, ref), ref);
    EXPECT_GE(r.fidelity, r.bound - 1e-9);
  }
}

TEST(Bound, SizeErrors) {
  const ReferenceState ref = testing::random_reference(2, 3);
  EXPECT_THROW(worst_case_bound(identity(4) / 4.0, identity(6) / 6.0, ref), DimensionMismatch);
  EXPECT_THROW(worst_case_bound(identity(3) / 3.0, identity(3) / 3.0, ref), DimensionMismatch);
}

TEST(CbDistance, IdentityVersusZ) {
  const NormInterval n = cb_distance_interval(identity_channel(2), unitary_channel(testing::pauli_z()));
  EXPECT_GE(n.lower, 1.999999);
  EXPECT_NEAR(n.upper, 2.0, 1e-9);
  EXPECT_NEAR(testing::unitary_cb_oracle(identity(2), testing::pauli_z()), 2.0, 1e-12);
}

TEST(CbDistance, UnitaryOracle) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Index d = testing::small_dim(s, 0);
    const Matrix u = random_unitary(d, s), v = random_unitary(d, 200 + s);
    const double exact = testing::unitary_cb_oracle(u, v);
    const NormInterval n = cb_distance_interval(unitary_channel(u), unitary_channel(v));
    EXPECT_LE(n.lower, exact + 1e-9);
    EXPECT_GE(n.lower, exact - 1e-6);
    EXPECT_GE(n.upper, exact - 1e-9);
  }
}

TEST(CbDistance, IntervalProperties) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Index d1 = testing::small_dim(s, 0), d2 = testing::small_dim(s, 1);
    const KrausChannel a = testing::random_test_channel(d1, d2, s);
    const KrausChannel b = testing::random_test_channel(d1, d2, 400 + s);
    const NormInterval n = cb_distance_interval(a, b, {8, 200, 1e-10, s, {}});
    EXPECT_LE(n.lower, n.upper + 1e-9);
    EXPECT_LE(n.upper, 2.0 + 1e-9);
    EXPECT_GE(n.lower + 1e-12, trace_norm(choi_state(a) - choi_state(b)));
    EXPECT_NEAR(cb_objective(a, b, n.argmax_state), n.lower, 1e-12);
  }
}

TEST(CbDistance, ZeroForEqualChannels) {
  const KrausChannel a = random_channel(2, 3, 2, 5);
  const NormInterval n = cb_distance_interval(a, canonicalize(a));
  EXPECT_LT(n.lower, 1e-10);
  EXPECT_LT(n.upper, 1e-9);
}

TEST(CbDistance, Reproducible) {
  const KrausChannel a = random_channel(2, 2, 2, 6), b = random_channel(2, 2, 3, 7);
  const NormInterval n1 = cb_distance_interval(a, b, {8, 200, 1e-10, 3, {}});
  const NormInterval n2 = cb_distance_interval(a, b, {8, 200, 1e-10, 3, {}});
  EXPECT_EQ(n1.lower, n2.lower);
  EXPECT_EQ(n1.upper, n2.upper);
  EXPECT_EQ(n1.argmax_state, n2.argmax_state);
}

TEST(CbDistance, ContinuityOfForwardMap) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const KrausChannel a = random_channel(2, 2, 2, s), b = random_channel(2, 2, 2, 900 + s);
    const ReferenceState ref = testing::random_reference(2, 950 + s);
    const double dw = trace_norm(forward_map_matrix(a, ref) - forward_map_matrix(b, ref));
    CbOptions opts;
    opts.starts = 4;
    opts.extra_starts.push_back(omega(ref).vector);
    const NormInterval n = cb_distance_interval(a, b, opts);
    EXPECT_LE(dw, n.upper + 1e-9);
    EXPECT_GE(n.lower + 1e-12, dw);
  }
}

TEST(CbNorm, ChannelsHaveUnitNorm) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Index d1 = testing::small_dim(s, 0), d2 = testing::small_dim(s, 1);
    const KrausChannel t = testing::random_test_channel(d1, d2, s);
    const NormInterval n = cb_norm_of_channel(t);
    EXPECT_NEAR(n.lower, 1.0, 1e-10);
    EXPECT_NEAR(n.upper, 1.0, 1e-9);
    const NormInterval nt = cb_norm_of_channel(tensor(t, random_channel(2, 2, 2, 50 + s)));
    EXPECT_NEAR(nt.lower, 1.0, 1e-10);
  }
  EXPECT_THROW(cb_norm_of_channel(random_cp_map(2, 2, 2, 1)), ValidationError);
}

}  // namespace
}  // namespace qsysid
