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

// Identifies an amplitude-damping qubit channel from one entangled probe and
// prints how close the reconstruction is, with and without depolarizing noise
// on the measured output.

#include <cstdio>

#include "qsysid/qsysid.hpp"

int main() {
  using namespace qsysid;

  const KrausChannel truth = amplitude_damping_channel(0.3);
  Matrix rho = Matrix::Zero(2, 2);
  rho(0, 0) = 0.7;
  rho(1, 1) = 0.3;
  const ReferenceState ref = make_reference(DensityOperator(rho));

  const DensityOperator w = forward_map(truth, ref);
  const ReconstructionResult clean = reconstruct(w, ref, 2);
  std::printf("noiseless: fidelity %.15f  tp_residual %.3g  consistency %.3g\n",
              channel_fidelity(truth, clean.cp_map), clean.tp_residual, clean.consistency_residual);

  for (double eps : {0.01, 0.05, 0.1}) {
    const DensityOperator noisy = apply_noise(w, {NoiseKind::depolarize, eps}, 0);
    const BoundReport b = worst_case_bound(w, noisy, ref);
    std::printf("eps %.2f: fidelity %.6f >= bound %.6f  (||w1-w2||_1 = %.4f)\n", eps, b.fidelity, b.bound,
                b.trace_dist_w);
  }
  return 0;
}
