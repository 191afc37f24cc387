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

#include <sstream>

#include "qsysid/harness.hpp"
#include "test_support.hpp"

namespace qsysid {
namespace {

using testing::max_abs;

ExperimentConfig small_config(NoiseSpec noise, RefSpec ref = MaximallyMixedRef{}, int trials = 20) {
  ExperimentConfig cfg;
  cfg.d1 = 2;
  cfg.d2 = 3;
  cfg.kraus_rank = 3;
  cfg.ref_spec = std::move(ref);
  cfg.noise = noise;
  cfg.trials = trials;
  cfg.seed = 11;
  return cfg;
}

TEST(Noise, None) {
  const DensityOperator w = random_density(4, 2, 1);
  EXPECT_EQ(apply_noise(w, {NoiseKind::none, 0.3}, 5).matrix(), w.matrix());
  EXPECT_EQ(apply_noise(w, {NoiseKind::depolarize, 0.0}, 5).matrix(), w.matrix());
}

TEST(Noise, DepolarizeFormulaAndDistance) {
  const DensityOperator w = random_density(6, 3, 2);
  for (double eps : {0.01, 0.1, 0.5, 1.0}) {
    const Matrix out = apply_noise(w, {NoiseKind::depolarize, eps}, 0).matrix();
    EXPECT_LT(max_abs(out - ((1.0 - eps) * w.matrix() + eps * identity(6) / 6.0)), 1e-15);
    EXPECT_LE(trace_norm(out - w.matrix()), 2.0 * eps + 1e-9);
  }
}

TEST(Noise, JitterIsStateAndSeeded) {
  const DensityOperator w = random_density(4, 1, 3);
  const DensityOperator a = apply_noise(w, {NoiseKind::hermitian_jitter, 0.05}, 9);
  const DensityOperator b = apply_noise(w, {NoiseKind::hermitian_jitter, 0.05}, 9);
  const DensityOperator c = apply_noise(w, {NoiseKind::hermitian_jitter, 0.05}, 10);
  EXPECT_EQ(a.matrix(), b.matrix());
  EXPECT_NE(a.matrix(), c.matrix());
  EXPECT_NEAR(a.matrix().trace().real(), 1.0, 1e-12);
  EXPECT_GE(hermitian_eigenvalues(a.matrix())(0), 0.0 - 1e-14);
}

TEST(Noise, InvalidEps) {
  const DensityOperator w = random_density(2, 2, 4);
  EXPECT_THROW(apply_noise(w, {NoiseKind::depolarize, -0.1}, 0), ValidationError);
  EXPECT_THROW(apply_noise(w, {NoiseKind::hermitian_jitter, 1.5}, 0), ValidationError);
}

TEST(Seeds, TrialSeedFormula) {
  EXPECT_EQ(trial_seed(7, 3), 7000024u);
  EXPECT_EQ(trial_seed(0, 0), 0u);
}

TEST(TrialReference, Kinds) {
  ExperimentConfig cfg = small_config({});
  EXPECT_NEAR(make_trial_reference(cfg, 1).min_eig(), 0.5, 1e-14);
  cfg.ref_spec = SpectrumRef{{0.9, 0.1}};
  const ReferenceState spec_ref = make_trial_reference(cfg, 1);
  EXPECT_NEAR(spec_ref.min_eig(), 0.1, 1e-12);
  EXPECT_NEAR(spec_ref.spectrum().eigenvalues(1), 0.9, 1e-12);
  cfg.d1 = 3;
  cfg.ref_spec = RandomMinEigRef{0.05};
  for (std::uint64_t s = 0; s < 10; ++s) EXPECT_GE(make_trial_reference(cfg, s).min_eig(), 0.05 - 1e-12);
  cfg.d1 = 2;
  cfg.ref_spec = SpectrumRef{{1.0, 0.0}};
  EXPECT_THROW(make_trial_reference(cfg, 1), NotAdmissible);
}

TEST(ConfigValidation, Rejections) {
  ExperimentConfig cfg = small_config({});
  cfg.kraus_rank = 7;
  EXPECT_THROW(validate(cfg), ValidationError);
  cfg = small_config({});
  cfg.trials = 0;
  EXPECT_THROW(validate(cfg), ValidationError);
  cfg = small_config({}, SpectrumRef{{0.5, 0.6}});
  EXPECT_THROW(validate(cfg), ValidationError);
  cfg = small_config({}, SpectrumRef{{1.2, -0.2}});
  EXPECT_THROW(validate(cfg), ValidationError);
  cfg = small_config({}, RandomMinEigRef{0.6});
  EXPECT_THROW(validate(cfg), ValidationError);
  cfg = small_config({NoiseKind::depolarize, 2.0});
  EXPECT_THROW(run_roundtrip(cfg), ValidationError);
}

TEST(Roundtrip, NoiselessRecords) {
  for (const RefSpec& ref : {RefSpec{MaximallyMixedRef{}}, RefSpec{RandomMinEigRef{0.05}}}) {
    const std::vector<TrialRecord> rows = run_roundtrip(small_config({}, ref));
    ASSERT_EQ(rows.size(), 20u);
    for (const TrialRecord& r : rows) {
      EXPECT_GE(r.fidelity, 1.0 - 1e-8);
      EXPECT_LE(r.consistency_residual, 1e-8);
      EXPECT_LE(r.tp_residual, 1e-8);
      EXPECT_EQ(r.trace_dist_w, 0.0);
      EXPECT_EQ(r.bound_value, 1.0);
    }
  }
}

TEST(Roundtrip, DepolarizingMaximallyMixedRows) {
  const std::vector<TrialRecord> rows = run_roundtrip(small_config({NoiseKind::depolarize, 0.02}));
  for (const TrialRecord& r : rows) {
    EXPECT_EQ(r.noise_eps, 0.02);
    EXPECT_LE(r.trace_dist_w, 0.04 + 1e-9);
    EXPECT_NEAR(r.bound_value, fidelity_lower_bound(2.0, r.trace_dist_w, 2), 1e-15);
    EXPECT_GE(r.fidelity, r.bound_value - 1e-9);
    EXPECT_NEAR(r.consistency_residual, 0.0, 1e-10);
  }
}

TEST(Roundtrip, BoundHoldsUnderJitter) {
  ExperimentConfig cfg = small_config({NoiseKind::hermitian_jitter, 0.01}, RandomMinEigRef{0.1}, 100);
  std::vector<TrialRecord> rows;
  ASSERT_NO_THROW(rows = run_roundtrip(cfg, 4));
  for (const TrialRecord& r : rows) EXPECT_GE(r.fidelity, r.bound_value - 1e-9);
}

TEST(Roundtrip, DeterministicAcrossJobs) {
  const ExperimentConfig cfg = small_config({NoiseKind::hermitian_jitter, 0.02}, RandomMinEigRef{0.1});
  const std::string a = to_csv(run_roundtrip(cfg, 1));
  EXPECT_EQ(a, to_csv(run_roundtrip(cfg, 1)));
  EXPECT_EQ(a, to_csv(run_roundtrip(cfg, 4)));
  ExperimentConfig other = cfg;
  other.seed = 12;
  EXPECT_NE(a, to_csv(run_roundtrip(other, 1)));
}

TEST(Sweep, RowsFollowGrid) {
  const ExperimentConfig cfg = small_config({NoiseKind::depolarize, 0.01});
  const std::vector<double> grid = {0.5, 0.25, 0.1, 0.05, 0.01};
  const std::vector<TrialRecord> rows = run_spectrum_sweep(cfg, grid);
  ASSERT_EQ(rows.size(), grid.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_NEAR(rows[i].min_eig_rho, grid[i], 1e-12);
    EXPECT_GE(rows[i].fidelity, rows[i].bound_value - 1e-9);
    if (i > 0) EXPECT_LE(rows[i].bound_value, rows[i - 1].bound_value);
  }
}

TEST(Sweep, BoundMonotoneForFixedStates) {
  const ReferenceState ref = testing::random_reference(2, 5);
  const KrausChannel t = random_channel(2, 2, 2, 6);
  const Matrix w = forward_map_matrix(t, ref);
  const Matrix noisy = 0.98 * w + 0.02 * identity(4) / 4.0;
  const double dist = trace_norm(w - noisy);
  double prev = 1.0;
  for (double m : {0.5, 0.25, 0.1, 0.05, 0.01}) {
    const double b = fidelity_lower_bound(1.0 / m, dist, 2);
    EXPECT_LE(b, prev);
    prev = b;
  }
}

TEST(Sweep, GridErrors) {
  const ExperimentConfig cfg = small_config({});
  EXPECT_THROW(run_spectrum_sweep(cfg, {}), ValidationError);
  EXPECT_THROW(run_spectrum_sweep(cfg, {0.6}), ValidationError);
  EXPECT_THROW(run_spectrum_sweep(cfg, {0.0}), ValidationError);
}

TEST(Csv, HeaderAndPrecision) {
  TrialRecord r{3, 0.1, 0.01, 1.0 / 3.0, 0.0, 1e-17, 0.75, 0.5};
  std::ostringstream os;
  write_csv(os, {r});
  EXPECT_EQ(os.str(),
            "trial_index,min_eig_rho,noise_eps,trace_dist_w,consistency_residual,tp_residual,fidelity,bound_value\n"
            "3,0.10000000000000001,0.01,0.33333333333333331,0,1.0000000000000001e-17,0.75,0.5\n");
}

}  // namespace
}  // namespace qsysid
