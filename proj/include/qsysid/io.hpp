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

// JSON encodings.
//
//   ComplexMatrix   {"rows":R,"cols":C,"data":[[re,im],...]}   row-major
//   complex vector  [[re,im],...]
//   KrausChannel    {"dim_in":d1,"dim_out":d2,"kraus":[<ComplexMatrix>,...]}
//   ChoiMatrix      <ComplexMatrix> + "dim_in","dim_out","normalized"
//   ReferenceState  {"density":<ComplexMatrix>,"cutoff":c,"basis":<ComplexMatrix>|null}
//
// Doubles are written in shortest round-trip form, so decode(encode(x)) is
// bit-exact.

#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qsysid/channel.hpp"
#include "qsysid/errors.hpp"
#include "qsysid/harness.hpp"
#include "qsysid/identify.hpp"
#include "qsysid/linalg.hpp"
#include "qsysid/metrics.hpp"

namespace qsysid::io {

using json = nlohmann::json;

namespace detail {

template <typename F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ValidationError(std::string(what) + ": " + e.what());
  }
}

inline json complex_pair(Complex z) { return json::array({z.real(), z.imag()}); }

inline Complex complex_from(const json& j) {
  qsysid::detail::require(j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(),
                          "complex entry must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

inline json to_json(const Matrix& m) {
  json data = json::array();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) data.push_back(detail::complex_pair(m(i, j)));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline Matrix matrix_from_json(const json& j) {
  return detail::guarded("ComplexMatrix", [&] {
    qsysid::detail::require(j.is_object(), "ComplexMatrix must be an object");
    const auto rows = j.at("rows").get<long long>();
    const auto cols = j.at("cols").get<long long>();
    qsysid::detail::require(rows > 0 && cols > 0, "ComplexMatrix dimensions must be positive");
    const json& data = j.at("data");
    qsysid::detail::require(data.is_array() && static_cast<long long>(data.size()) == rows * cols,
                            "ComplexMatrix data must hold rows*cols entries");
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index c = 0; c < cols; ++c) m(i, c) = detail::complex_from(data[static_cast<std::size_t>(i * cols + c)]);
    qsysid::detail::require(qsysid::detail::all_finite(m), "ComplexMatrix has non-finite entries");
    return m;
  });
}

inline json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(detail::complex_pair(v(i)));
  return out;
}

inline Vector vector_from_json(const json& j) {
  return detail::guarded("complex vector", [&] {
    qsysid::detail::require(j.is_array(), "complex vector must be an array");
    Vector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = detail::complex_from(j[i]);
    return v;
  });
}

inline json to_json(const KrausChannel& t) {
  json kraus = json::array();
  for (const Matrix& a : t.kraus()) kraus.push_back(to_json(a));
  return {{"dim_in", t.dim_in()}, {"dim_out", t.dim_out()}, {"kraus", std::move(kraus)}};
}

inline KrausChannel channel_from_json(const json& j) {
  return detail::guarded("channel", [&] {
    qsysid::detail::require(j.is_object(), "channel must be an object");
    std::vector<Matrix> kraus;
    for (const json& a : j.at("kraus")) kraus.push_back(matrix_from_json(a));
    return KrausChannel(j.at("dim_in").get<Index>(), j.at("dim_out").get<Index>(), std::move(kraus));
  });
}

inline json to_json(const ChoiMatrix& c) {
  json out = to_json(c.mat);
  out["dim_in"] = c.dim_in;
  out["dim_out"] = c.dim_out;
  out["normalized"] = c.normalized;
  return out;
}

inline ChoiMatrix choi_from_json(const json& j) {
  return detail::guarded("choi", [&] {
    return ChoiMatrix{j.at("dim_in").get<Index>(), j.at("dim_out").get<Index>(), matrix_from_json(j),
                      j.at("normalized").get<bool>()};
  });
}

inline json to_json(const ReferenceState& ref) {
  return {{"density", to_json(ref.rho().matrix())},
          {"cutoff", ref.cutoff()},
          {"basis", ref.out_basis().size() == 0 ? json(nullptr) : to_json(ref.out_basis())}};
}

/// Rebuilds the reference from its density matrix (spectral data recomputed).
inline ReferenceState reference_from_json(const json& j) {
  return detail::guarded("reference", [&] {
    qsysid::detail::require(j.is_object(), "reference must be an object");
    const DensityOperator rho(matrix_from_json(j.at("density")));
    const double cutoff = j.value("cutoff", kAdmissibilityCutoff);
    Matrix basis;
    if (j.contains("basis") && !j.at("basis").is_null()) basis = matrix_from_json(j.at("basis"));
    return make_reference(rho, cutoff, std::move(basis));
  });
}

inline json to_json(const ReconstructionResult& r) {
  return {{"channel", to_json(r.cp_map)},
          {"tp_residual", r.tp_residual},
          {"consistency_residual", r.consistency_residual}};
}

inline json to_json(const BoundReport& b) {
  return {{"fidelity", b.fidelity},
          {"bound", b.bound},
          {"trace_dist_w", b.trace_dist_w},
          {"rho_inv_norm", b.rho_inv_norm},
          {"dim", b.dim}};
}

inline json to_json(const NormInterval& n) {
  return {{"lower", n.lower}, {"upper", n.upper}, {"argmax_state", vector_to_json(n.argmax_state)}};
}

// ---------------------------------------------------------------------------
// Experiment configs

inline json to_json(const NoiseSpec& n) {
  switch (n.kind) {
    case NoiseKind::none:
      return {{"kind", "none"}};
    case NoiseKind::depolarize:
      return {{"kind", "depolarize"}, {"eps", n.eps}};
    case NoiseKind::hermitian_jitter:
      return {{"kind", "hermitian_jitter"}, {"eps", n.eps}};
  }
  return {};
}

inline NoiseSpec noise_from_json(const json& j) {
  return detail::guarded("noise", [&] {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "none") return NoiseSpec{NoiseKind::none, 0.0};
    if (kind == "depolarize") return NoiseSpec{NoiseKind::depolarize, j.at("eps").get<double>()};
    if (kind == "hermitian_jitter") return NoiseSpec{NoiseKind::hermitian_jitter, j.at("eps").get<double>()};
    throw ValidationError("noise: unknown kind '" + kind + "'");
  });
}

inline json to_json(const RefSpec& r) {
  return std::visit(
      [](const auto& spec) -> json {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, MaximallyMixedRef>)
          return {{"kind", "maximally_mixed"}};
        else if constexpr (std::is_same_v<T, SpectrumRef>)
          return {{"kind", "spectrum"}, {"values", spec.values}};
        else
          return {{"kind", "random_min_eig"}, {"value", spec.value}};
      },
      r);
}

inline RefSpec ref_spec_from_json(const json& j) {
  return detail::guarded("ref_spec", [&]() -> RefSpec {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "maximally_mixed") return MaximallyMixedRef{};
    if (kind == "spectrum") return SpectrumRef{j.at("values").get<std::vector<double>>()};
    if (kind == "random_min_eig") return RandomMinEigRef{j.at("value").get<double>()};
    throw ValidationError("ref_spec: unknown kind '" + kind + "'");
  });
}

inline json to_json(const ExperimentConfig& c) {
  json out = {{"d1", c.d1},
              {"d2", c.d2},
              {"kraus_rank", c.kraus_rank},
              {"ref_spec", to_json(c.ref_spec)},
              {"noise", to_json(c.noise)},
              {"trials", c.trials},
              {"seed", c.seed}};
  if (!c.min_eig_grid.empty()) out["min_eig_grid"] = c.min_eig_grid;
  return out;
}

/// Missing fields take their ExperimentConfig defaults; unknown fields are rejected.
inline ExperimentConfig config_from_json(const json& j) {
  return detail::guarded("config", [&] {
    qsysid::detail::require(j.is_object(), "config must be an object");
    static const char* known[] = {"d1", "d2", "kraus_rank", "ref_spec", "noise", "trials", "seed", "min_eig_grid"};
    for (const auto& item : j.items()) {
      bool ok = false;
      for (const char* k : known) ok = ok || item.key() == k;
      qsysid::detail::require(ok, "config: unknown field '" + item.key() + "'");
    }
    ExperimentConfig c;
    c.d1 = j.value("d1", c.d1);
    c.d2 = j.value("d2", c.d2);
    c.kraus_rank = j.value("kraus_rank", c.kraus_rank);
    if (j.contains("ref_spec")) c.ref_spec = ref_spec_from_json(j.at("ref_spec"));
    if (j.contains("noise")) c.noise = noise_from_json(j.at("noise"));
    c.trials = j.value("trials", c.trials);
    c.seed = j.value("seed", c.seed);
    if (j.contains("min_eig_grid")) c.min_eig_grid = j.at("min_eig_grid").get<std::vector<double>>();
    validate(c);
    return c;
  });
}

// ---------------------------------------------------------------------------
// Files

inline json parse_json(const std::string& text, const std::string& origin = "input") {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed JSON in " + origin + ": " + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str(), path);
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << text;
}

}  // namespace qsysid::io
