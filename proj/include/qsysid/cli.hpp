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

// Command-line front end. Exit codes: 0 success, 1 validation error
// (bad flags, malformed JSON, inconsistent dimensions), 2 numerical failure
// (NotAdmissible, NotCompletelyPositive, SingularOperator, BoundViolation).

#pragma once

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qsysid/channel.hpp"
#include "qsysid/harness.hpp"
#include "qsysid/identify.hpp"
#include "qsysid/io.hpp"
#include "qsysid/metrics.hpp"

namespace qsysid {

namespace detail {

inline void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty())
    out << text;
  else
    io::write_text_file(path, text);
}

inline std::string dump(const io::json& j) { return j.dump(2) + "\n"; }

}  // namespace detail

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"Channel identification from entangled probes"};
  app.require_subcommand(1);

  // randchannel
  Index rc_d1 = 2, rc_d2 = 2, rc_rank = 1;
  std::uint64_t rc_seed = 0;
  std::string rc_out;
  auto* randchannel = app.add_subcommand("randchannel", "Emit a random channel as JSON");
  randchannel->add_option("--d1", rc_d1, "Input dimension")->required();
  randchannel->add_option("--d2", rc_d2, "Output dimension")->required();
  randchannel->add_option("--rank", rc_rank, "Number of Kraus operators")->required();
  randchannel->add_option("--seed", rc_seed, "Seed");
  randchannel->add_option("--out", rc_out, "Output file (default stdout)");

  // forward
  std::string fw_channel, fw_ref, fw_out;
  auto* forward = app.add_subcommand("forward", "Compute the bipartite output w of a channel");
  forward->add_option("--channel", fw_channel, "Channel JSON")->required();
  forward->add_option("--ref", fw_ref, "Reference state JSON")->required();
  forward->add_option("--out", fw_out, "Output file (default stdout)");

  // reconstruct
  std::string rs_w, rs_ref, rs_out, rs_report;
  Index rs_d2 = 0;
  bool rs_clip = false;
  auto* reconstruct_cmd = app.add_subcommand("reconstruct", "Invert the forward map on an output state");
  reconstruct_cmd->add_option("--w", rs_w, "Bipartite output state (ComplexMatrix JSON)")->required();
  reconstruct_cmd->add_option("--ref", rs_ref, "Reference state JSON")->required();
  reconstruct_cmd->add_option("--d2", rs_d2, "Output dimension (default: size of w / d1)");
  reconstruct_cmd->add_option("--out", rs_out, "Channel output file (default stdout)");
  reconstruct_cmd->add_option("--report", rs_report, "Report file (default <out>.report.json)");
  reconstruct_cmd->add_flag("--clip", rs_clip, "Project w onto density operators first");

  // fidelity
  std::string fd_a, fd_b, fd_out;
  auto* fidelity = app.add_subcommand("fidelity", "Channel fidelity of two channels");
  fidelity->add_option("--a", fd_a, "First channel JSON")->required();
  fidelity->add_option("--b", fd_b, "Second channel JSON")->required();
  fidelity->add_option("--out", fd_out, "Output file (default stdout)");

  // bound
  std::string bd_w1, bd_w2, bd_ref, bd_out;
  auto* bound = app.add_subcommand("bound", "Worst-case fidelity bound for two output states");
  bound->add_option("--w1", bd_w1, "First output state")->required();
  bound->add_option("--w2", bd_w2, "Second output state")->required();
  bound->add_option("--ref", bd_ref, "Reference state JSON")->required();
  bound->add_option("--out", bd_out, "Output file (default stdout)");

  // cbdist
  std::string cb_a, cb_b, cb_out;
  CbOptions cb_opts;
  auto* cbdist = app.add_subcommand("cbdist", "Interval for the CB-norm distance of two channels");
  cbdist->add_option("--a", cb_a, "First channel JSON")->required();
  cbdist->add_option("--b", cb_b, "Second channel JSON")->required();
  cbdist->add_option("--starts", cb_opts.starts, "Random starts")->capture_default_str();
  cbdist->add_option("--max-iters", cb_opts.max_iters, "Ascent iterations per start")->capture_default_str();
  cbdist->add_option("--tol", cb_opts.tol, "Improvement threshold")->capture_default_str();
  cbdist->add_option("--seed", cb_opts.seed, "Seed of the first random start")->capture_default_str();
  cbdist->add_option("--out", cb_out, "Output file (default stdout)");

  // roundtrip / sweep
  std::string rt_config, rt_out;
  int rt_jobs = 1;
  auto* roundtrip = app.add_subcommand("roundtrip", "Random round-trip experiment, CSV out");
  roundtrip->add_option("--config", rt_config, "Experiment config JSON")->required();
  roundtrip->add_option("--out", rt_out, "CSV output file (default stdout)");
  roundtrip->add_option("--jobs", rt_jobs, "Worker threads")->capture_default_str();

  std::string sw_config, sw_out;
  std::vector<double> sw_grid;
  auto* sweep = app.add_subcommand("sweep", "Sweep the smallest reference eigenvalue, CSV out");
  sweep->add_option("--config", sw_config, "Experiment config JSON")->required();
  sweep->add_option("--out", sw_out, "CSV output file (default stdout)");
  sweep->add_option("--grid", sw_grid, "Grid of smallest eigenvalues (overrides min_eig_grid)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (randchannel->parsed()) {
      detail::emit(rc_out, detail::dump(io::to_json(random_channel(rc_d1, rc_d2, rc_rank, rc_seed))), out);
    } else if (forward->parsed()) {
      const KrausChannel t = io::channel_from_json(io::read_json_file(fw_channel));
      const ReferenceState ref = io::reference_from_json(io::read_json_file(fw_ref));
      detail::emit(fw_out, detail::dump(io::to_json(forward_map(t, ref).matrix())), out);
    } else if (reconstruct_cmd->parsed()) {
      const ReferenceState ref = io::reference_from_json(io::read_json_file(rs_ref));
      Matrix w = io::matrix_from_json(io::read_json_file(rs_w));
      detail::require_dims(w.rows() == w.cols() && w.rows() % ref.dim() == 0,
                           "reconstruct: w size is not a multiple of the reference dimension");
      const Index d2 = rs_d2 > 0 ? rs_d2 : w.rows() / ref.dim();
      double clip = 0.0;
      if (rs_clip) {
        ClippedDensity c = clip_to_density(hermitian_part(w));
        clip = c.clip_magnitude;
        w = c.state.matrix();
      }
      const ReconstructionResult r = reconstruct(w, ref, d2);
      io::json report = {{"tp_residual", r.tp_residual},
                         {"consistency_residual", r.consistency_residual},
                         {"clip_magnitude", clip},
                         {"kraus_count", r.cp_map.kraus_count()},
                         {"trace_preserving", r.cp_map.trace_preserving()}};
      detail::emit(rs_out, detail::dump(io::to_json(r.cp_map)), out);
      const std::string report_path = !rs_report.empty() ? rs_report
                                      : !rs_out.empty()  ? rs_out + ".report.json"
                                                         : std::string();
      if (report_path.empty())
        err << report.dump() << "\n";
      else
        io::write_text_file(report_path, detail::dump(report));
    } else if (fidelity->parsed()) {
      const KrausChannel a = io::channel_from_json(io::read_json_file(fd_a));
      const KrausChannel b = io::channel_from_json(io::read_json_file(fd_b));
      const FvdgGap gap = fvdg_gap(a, b);
      io::json j = {{"fidelity", channel_fidelity(a, b)}, {"fvdg_lhs", gap.lhs}, {"fvdg_rhs", gap.rhs}};
      detail::emit(fd_out, detail::dump(j), out);
    } else if (bound->parsed()) {
      const ReferenceState ref = io::reference_from_json(io::read_json_file(bd_ref));
      const DensityOperator w1(io::matrix_from_json(io::read_json_file(bd_w1)));
      const DensityOperator w2(io::matrix_from_json(io::read_json_file(bd_w2)));
      detail::emit(bd_out, detail::dump(io::to_json(worst_case_bound(w1, w2, ref))), out);
    } else if (cbdist->parsed()) {
      const KrausChannel a = io::channel_from_json(io::read_json_file(cb_a));
      const KrausChannel b = io::channel_from_json(io::read_json_file(cb_b));
      detail::emit(cb_out, detail::dump(io::to_json(cb_distance_interval(a, b, cb_opts))), out);
    } else if (roundtrip->parsed()) {
      const ExperimentConfig cfg = io::config_from_json(io::read_json_file(rt_config));
      detail::emit(rt_out, to_csv(run_roundtrip(cfg, rt_jobs)), out);
    } else if (sweep->parsed()) {
      const ExperimentConfig cfg = io::config_from_json(io::read_json_file(sw_config));
      const std::vector<double>& grid = sw_grid.empty() ? cfg.min_eig_grid : sw_grid;
      detail::emit(sw_out, to_csv(run_spectrum_sweep(cfg, grid)), out);
    }
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace qsysid
