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

// Batch experiments: random round-trips with optional noise on the bipartite
// output, and sweeps over the smallest eigenvalue of the reference state.

#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "qsysid/channel.hpp"
#include "qsysid/identify.hpp"
#include "qsysid/linalg.hpp"
#include "qsysid/metrics.hpp"

namespace qsysid {

struct MaximallyMixedRef {};
struct SpectrumRef {
  std::vector<double> values;
};
struct RandomMinEigRef {
  double value;
};
using RefSpec = std::variant<MaximallyMixedRef, SpectrumRef, RandomMinEigRef>;

/// Noise models are artifact choices; the identification scheme itself
/// assumes a noiseless apparatus.
enum class NoiseKind { none, depolarize, hermitian_jitter };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::none;
  double eps = 0.0;
};

struct ExperimentConfig {
  Index d1 = 2;
  Index d2 = 2;
  Index kraus_rank = 2;
  RefSpec ref_spec = MaximallyMixedRef{};
  NoiseSpec noise{};
  int trials = 1;
  std::uint64_t seed = 0;
  /// Used by the sweep only.
  std::vector<double> min_eig_grid;
};

struct TrialRecord {
  int trial_index;
  double min_eig_rho;
  double noise_eps;
  double trace_dist_w;
  double consistency_residual;
  double tp_residual;
  double fidelity;
  double bound_value;

  double rho_inv_norm() const { return 1.0 / min_eig_rho; }
};

inline constexpr double kBoundSlack = 1e-9;
inline constexpr const char* kCsvHeader =
    "trial_index,min_eig_rho,noise_eps,trace_dist_w,consistency_residual,tp_residual,fidelity,bound_value";

// ---------------------------------------------------------------------------
// Validation and seeds

inline void validate(const NoiseSpec& noise) {
  detail::require(noise.eps >= 0.0 && noise.eps <= 1.0, "noise eps must lie in [0, 1]");
}

inline void validate(const ExperimentConfig& cfg) {
  detail::require(cfg.d1 >= 1 && cfg.d2 >= 1, "config: d1 and d2 must be positive");
  detail::require(cfg.kraus_rank >= 1 && cfg.kraus_rank <= cfg.d1 * cfg.d2,
                  "config: kraus_rank must lie in [1, d1*d2]");
  detail::require(cfg.d2 * cfg.kraus_rank >= cfg.d1, "config: d2*kraus_rank must be at least d1");
  detail::require(cfg.trials >= 1, "config: trials must be positive");
  validate(cfg.noise);
  if (const auto* s = std::get_if<SpectrumRef>(&cfg.ref_spec)) {
    detail::require(static_cast<Index>(s->values.size()) == cfg.d1, "config: spectrum must have d1 entries");
    double sum = 0.0;
    for (double p : s->values) {
      detail::require(p >= 0.0, "config: spectrum entries must be nonnegative");
      sum += p;
    }
    detail::require(std::abs(sum - 1.0) <= 1e-9, "config: spectrum must sum to one");
  } else if (const auto* r = std::get_if<RandomMinEigRef>(&cfg.ref_spec)) {
    detail::require(r->value > 0.0 && r->value <= 1.0 / static_cast<double>(cfg.d1) + 1e-12,
                    "config: random_min_eig must lie in (0, 1/d1]");
  }
}

/// master_seed * 1000003 + trial_index, with unsigned wraparound.
inline std::uint64_t trial_seed(std::uint64_t master_seed, int trial_index) {
  return master_seed * 1000003ULL + static_cast<std::uint64_t>(trial_index);
}

namespace detail {

enum SeedStream : std::uint64_t { kChannelStream = 0, kBasisStream = 1, kSpectrumStream = 2, kNoiseStream = 3 };

inline DensityOperator diagonal_in_basis(const std::vector<double>& p, const Matrix& basis) {
  RealVector diag(static_cast<Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) diag(static_cast<Index>(i)) = p[i];
  return DensityOperator(hermitian_part(basis * diag.cast<Complex>().asDiagonal() * basis.adjoint()));
}

}  // namespace detail

/// Builds the reference state of one trial from the config's ref_spec.
inline ReferenceState make_trial_reference(const ExperimentConfig& cfg, std::uint64_t seed) {
  const Index d = cfg.d1;
  return std::visit(
      [&](const auto& spec) -> ReferenceState {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, MaximallyMixedRef>) {
          return make_reference(DensityOperator::maximally_mixed(d));
        } else if constexpr (std::is_same_v<T, SpectrumRef>) {
          std::vector<double> p = spec.values;
          std::sort(p.begin(), p.end());
          if (!(p.front() > kAdmissibilityCutoff))
            throw NotAdmissible("reference spectrum has an eigenvalue at or below the admissibility cutoff");
          const Matrix u = random_unitary(d, detail::mix_seed(seed, detail::kBasisStream));
          return make_reference(detail::diagonal_in_basis(p, u));
        } else {
          std::mt19937_64 gen(detail::mix_seed(seed, detail::kSpectrumStream));
          std::exponential_distribution<double> expo(1.0);
          std::vector<double> q(static_cast<std::size_t>(d));
          double total = 0.0;
          for (double& x : q) total += (x = expo(gen));
          std::vector<double> p(q.size());
          const double free_mass = std::max(0.0, 1.0 - static_cast<double>(d) * spec.value);
          for (std::size_t i = 0; i < q.size(); ++i) p[i] = spec.value + free_mass * q[i] / total;
          const Matrix u = random_unitary(d, detail::mix_seed(seed, detail::kBasisStream));
          return make_reference(detail::diagonal_in_basis(p, u));
        }
      },
      cfg.ref_spec);
}

// ---------------------------------------------------------------------------
// Noise

/// depolarize:       (1 - eps) w + eps 1/D
/// hermitian_jitter: w + eps H/||H||_op with H random traceless Hermitian,
///                   then clipped to PSD and renormalized.
inline DensityOperator apply_noise(const DensityOperator& w, const NoiseSpec& model, std::uint64_t seed) {
  validate(model);
  const Index n = w.dim();
  switch (model.kind) {
    case NoiseKind::none:
      return w;
    case NoiseKind::depolarize:
      if (model.eps == 0.0) return w;
      return DensityOperator(
          hermitian_part((1.0 - model.eps) * w.matrix() + (model.eps / static_cast<double>(n)) * identity(n)));
    case NoiseKind::hermitian_jitter: {
      if (model.eps == 0.0) return w;
      const Matrix h = random_traceless_hermitian(n, seed);
      return clip_to_density(hermitian_part(w.matrix() + model.eps * h)).state;
    }
  }
  throw ValidationError("apply_noise: unknown noise kind");
}

// ---------------------------------------------------------------------------
// Trials

namespace detail {

inline TrialRecord evaluate_trial(int index, const KrausChannel& t, const ReferenceState& ref,
                                  const NoiseSpec& noise, std::uint64_t noise_seed) {
  const DensityOperator w = forward_map(t, ref);
  const DensityOperator noisy = apply_noise(w, noise, noise_seed);
  const ReconstructionResult clean = reconstruct(w, ref, t.dim_out());
  const ReconstructionResult perturbed = reconstruct(noisy, ref, t.dim_out());

  TrialRecord rec{};
  rec.trial_index = index;
  rec.min_eig_rho = ref.min_eig();
  rec.noise_eps = noise.kind == NoiseKind::none ? 0.0 : noise.eps;
  rec.trace_dist_w = trace_norm(hermitian_part(w.matrix() - noisy.matrix()));
  rec.consistency_residual = perturbed.consistency_residual;
  rec.tp_residual = perturbed.tp_residual;
  rec.fidelity = channel_fidelity(clean.cp_map, perturbed.cp_map);
  rec.bound_value = fidelity_lower_bound(ref.inverse_norm(), rec.trace_dist_w, ref.dim());
  if (rec.fidelity < rec.bound_value - kBoundSlack) {
    std::ostringstream os;
    os.precision(17);
    os << "trial " << index << ": fidelity " << rec.fidelity << " is below the bound " << rec.bound_value;
    throw BoundViolation(os.str());
  }
  return rec;
}

/// Runs body(i) for i in [0, count) on up to `jobs` threads. Results land in
/// index order; the first exception by index is rethrown.
template <typename Body>
std::vector<TrialRecord> parallel_trials(int count, int jobs, Body body) {
  std::vector<TrialRecord> out(static_cast<std::size_t>(count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  auto work = [&](int begin, int stride) {
    for (int i = begin; i < count; i += stride) {
      try {
        out[static_cast<std::size_t>(i)] = body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  const int workers = std::clamp(jobs, 1, std::max(1, count));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace detail

/// Per trial: draw a channel and reference state, push w through the noise
/// model, reconstruct the clean and noisy outputs, and record the diagnostics.
inline std::vector<TrialRecord> run_roundtrip(const ExperimentConfig& cfg, int jobs = 1) {
  validate(cfg);
  return detail::parallel_trials(cfg.trials, jobs, [&cfg](int i) {
    const std::uint64_t seed = trial_seed(cfg.seed, i);
    const KrausChannel t =
        random_channel(cfg.d1, cfg.d2, cfg.kraus_rank, detail::mix_seed(seed, detail::kChannelStream));
    const ReferenceState ref = make_trial_reference(cfg, seed);
    return detail::evaluate_trial(i, t, ref, cfg.noise, detail::mix_seed(seed, detail::kNoiseStream));
  });
}

/// One record per grid value m, with reference spectrum {m, (1-m)/(d1-1), ...}
/// in a fixed random eigenbasis. Channel and noise draw are shared by all rows.
inline std::vector<TrialRecord> run_spectrum_sweep(const ExperimentConfig& cfg, const std::vector<double>& grid) {
  validate(cfg);
  detail::require(!grid.empty(), "sweep: min_eig_grid is empty");
  const double top = 1.0 / static_cast<double>(cfg.d1);
  for (double m : grid) {
    if (!(m > 0.0) || m > top + 1e-12) {
      std::ostringstream os;
      os << "sweep: grid value " << m << " is outside (0, 1/d1]";
      throw ValidationError(os.str());
    }
  }
  const std::uint64_t seed = trial_seed(cfg.seed, 0);
  const KrausChannel t =
      random_channel(cfg.d1, cfg.d2, cfg.kraus_rank, detail::mix_seed(seed, detail::kChannelStream));
  const Matrix basis = random_unitary(cfg.d1, detail::mix_seed(seed, detail::kBasisStream));
  const std::uint64_t noise_seed = detail::mix_seed(seed, detail::kNoiseStream);

  std::vector<TrialRecord> out;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double m = std::min(grid[g], top);
    std::vector<double> p(static_cast<std::size_t>(cfg.d1), m);
    if (cfg.d1 > 1)
      for (std::size_t i = 1; i < p.size(); ++i) p[i] = (1.0 - m) / static_cast<double>(cfg.d1 - 1);
    else
      p[0] = 1.0;
    const ReferenceState ref = make_reference(detail::diagonal_in_basis(p, basis));
    out.push_back(detail::evaluate_trial(static_cast<int>(g), t, ref, cfg.noise, noise_seed));
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV

inline void write_csv(std::ostream& os, const std::vector<TrialRecord>& records) {
  os << kCsvHeader << '\n';
  std::ostringstream line;
  line << std::setprecision(17);
  for (const TrialRecord& r : records) {
    line.str("");
    line << r.trial_index << ',' << r.min_eig_rho << ',' << r.noise_eps << ',' << r.trace_dist_w << ','
         << r.consistency_residual << ',' << r.tp_residual << ',' << r.fidelity << ',' << r.bound_value;
    os << line.str() << '\n';
  }
}

inline std::string to_csv(const std::vector<TrialRecord>& records) {
  std::ostringstream os;
  write_csv(os, records);
  return os.str();
}

}  // namespace qsysid
