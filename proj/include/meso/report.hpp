#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "meso/errors.hpp"
#include "meso/graph.hpp"
#include "meso/hash.hpp"
#include "meso/inference.hpp"
#include "meso/model.hpp"
#include "meso/sampler.hpp"
#include "meso/synth.hpp"

namespace meso {

inline constexpr int report_schema_version = 1;

inline const char* to_string(InitStrategy s) noexcept {
  return s == InitStrategy::degree_split ? "degree" : "random";
}

struct InputInfo {
  std::string source;
  std::size_t n = 0;
  std::size_t m = 0;
  std::string edge_list_sha256;
  std::size_t duplicates_collapsed = 0;
  std::size_t isolated_added = 0;
};

inline InputInfo describe_input(const Graph& g, std::string source, const ParseDiagnostics& diag = {}) {
  return {std::move(source), g.n(), g.m(), sha256_hex(to_edge_list(g)), diag.duplicates_collapsed, diag.isolated_added};
}

/// Everything an analysis run produces, before serialization.
struct AnalysisReport {
  InputInfo input;
  Hyperparameters hyper;
  ChainConfig chain;
  std::size_t bins = 50;
  StructureVerdict verdict;
  std::vector<std::string> node_names;
  std::vector<double> membership;
  std::vector<double> group_size;
  DensitySummary density;
  double acceptance_rate = 0.0;
  std::optional<SquareMatrix> coassignment;
  std::vector<std::string> warnings;
  std::optional<double> wall_seconds;  // only serialized when requested
};

inline AnalysisReport build_report(const Graph& g, InputInfo input, const Hyperparameters& h, const ChainConfig& cfg,
                                   const PosteriorSamples& samples, std::size_t bins = 50) {
  AnalysisReport r;
  r.input = std::move(input);
  r.hyper = h;
  r.chain = cfg;
  r.bins = bins;
  r.verdict = classify_structure(samples);
  r.node_names = g.names();
  r.membership = membership_probabilities(samples);
  r.group_size = group_size_posterior(samples);
  r.density = density_summary(samples, bins);
  r.acceptance_rate = samples.swap_acceptance_rate();
  if (samples.coassign_enabled) r.coassignment = coassignment_matrix(samples);
  if (auto w = identifiability_warning(h)) r.warnings.push_back(*w);
  return r;
}

namespace detail {

inline double finite(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericalError(std::string("non-finite value in report field '") + what + "'");
  return v;
}

inline nlohmann::ordered_json verdict_json(const StructureVerdict& v) {
  nlohmann::ordered_json j;
  j["assortative"] = finite(v.p_assortative, "assortative");
  j["core_periphery"] = finite(v.p_core_periphery, "core_periphery");
  j["disassortative"] = finite(v.p_disassortative, "disassortative");
  j["most_probable"] = to_string(v.most_probable());
  j["n_samples"] = v.n_samples;
  if (!v.per_chain.empty()) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : v.per_chain) arr.push_back(verdict_json(c));
    j["per_chain"] = std::move(arr);
  }
  return j;
}

inline nlohmann::ordered_json parameter_json(const ParameterSummary& s, const char* name) {
  nlohmann::ordered_json j;
  j["mean"] = finite(s.mean, name);
  j["sd"] = finite(s.sd, name);
  j["q025"] = finite(s.q025, name);
  j["q50"] = finite(s.q50, name);
  j["q975"] = finite(s.q975, name);
  j["mass"] = s.mass;
  return j;
}

inline nlohmann::ordered_json hyper_json(const Hyperparameters& h) {
  nlohmann::ordered_json j;
  j["a0_11"] = h.block11.a;
  j["b0_11"] = h.block11.b;
  j["a0_12"] = h.block12.a;
  j["b0_12"] = h.block12.b;
  j["a0_22"] = h.block22.a;
  j["b0_22"] = h.block22.b;
  bool uniform = !h.pi.empty();
  for (double p : h.pi) uniform = uniform && p == h.pi.front();
  if (uniform)
    j["pi"] = h.pi.front();
  else
    j["pi"] = h.pi;
  return j;
}

}  // namespace detail

inline nlohmann::ordered_json chain_config_json(const ChainConfig& cfg) {
  nlohmann::ordered_json j;
  j["samples"] = cfg.total_samples;
  j["burn_in"] = cfg.burn_in;
  j["thin"] = cfg.thin;
  j["chains"] = cfg.chains;
  j["seed"] = cfg.seed;
  j["init"] = to_string(cfg.init);
  j["coassign"] = cfg.coassign;
  j["store_labels"] = cfg.store_labels;
  return j;
}

inline nlohmann::ordered_json verdict_to_json(const StructureVerdict& v) { return detail::verdict_json(v); }

inline nlohmann::ordered_json report_to_json(const AnalysisReport& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = report_schema_version;

  auto& in = j["input"];
  in["source"] = r.input.source;
  in["n"] = r.input.n;
  in["m"] = r.input.m;
  in["edge_list_sha256"] = r.input.edge_list_sha256;
  in["duplicates_collapsed"] = r.input.duplicates_collapsed;
  in["isolated_added"] = r.input.isolated_added;

  auto& cfg = j["config"];
  cfg = chain_config_json(r.chain);
  cfg["bins"] = r.bins;
  cfg["hyperparameters"] = detail::hyper_json(r.hyper);

  j["verdict"] = detail::verdict_json(r.verdict);

  auto members = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < r.membership.size(); ++i) {
    nlohmann::ordered_json row;
    row["node"] = r.node_names[i];
    row["p_group1"] = detail::finite(r.membership[i], "membership");
    members.push_back(std::move(row));
  }
  j["membership"] = std::move(members);
  j["group_size"] = r.group_size;

  auto& dens = j["density"];
  dens["bins"] = r.bins;
  dens["p11"] = detail::parameter_json(r.density.p11, "p11");
  dens["p12"] = detail::parameter_json(r.density.p12, "p12");
  dens["p22"] = detail::parameter_json(r.density.p22, "p22");
  dens["exceedance"] = {{"p11_gt_p12", r.density.p11_gt_p12},
                        {"p12_gt_p22", r.density.p12_gt_p22},
                        {"p11_gt_p22", r.density.p11_gt_p22}};

  j["acceptance_rate"] = detail::finite(r.acceptance_rate, "acceptance_rate");
  if (r.coassignment) {
    auto rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < r.coassignment->n; ++i) {
      std::vector<double> row(r.coassignment->data.begin() + static_cast<std::ptrdiff_t>(i * r.coassignment->n),
                              r.coassignment->data.begin() + static_cast<std::ptrdiff_t>((i + 1) * r.coassignment->n));
      rows.push_back(row);
    }
    j["coassignment"] = std::move(rows);
  }
  j["warnings"] = r.warnings;
  if (r.wall_seconds) j["timing"] = {{"wall_seconds", *r.wall_seconds}};
  return j;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// Long-format CSV of a report: section,key,value.
inline std::string report_to_csv(const AnalysisReport& r) {
  std::string out = "section,key,value\n";
  const auto row = [&](const char* section, const std::string& key, const std::string& value) {
    out += section;
    out += ',' + csv_field(key) + ',' + csv_field(value) + '\n';
  };
  row("input", "source", r.input.source);
  row("input", "n", std::to_string(r.input.n));
  row("input", "m", std::to_string(r.input.m));
  row("input", "edge_list_sha256", r.input.edge_list_sha256);
  row("config", "samples", std::to_string(r.chain.total_samples));
  row("config", "burn_in", std::to_string(r.chain.burn_in));
  row("config", "thin", std::to_string(r.chain.thin));
  row("config", "chains", std::to_string(r.chain.chains));
  row("config", "seed", std::to_string(r.chain.seed));
  row("config", "init", to_string(r.chain.init));
  row("verdict", "assortative", csv_number(r.verdict.p_assortative));
  row("verdict", "core_periphery", csv_number(r.verdict.p_core_periphery));
  row("verdict", "disassortative", csv_number(r.verdict.p_disassortative));
  row("verdict", "n_samples", std::to_string(r.verdict.n_samples));
  for (std::size_t i = 0; i < r.membership.size(); ++i) row("membership", r.node_names[i], csv_number(r.membership[i]));
  for (std::size_t k = 0; k < r.group_size.size(); ++k) row("group_size", std::to_string(k), csv_number(r.group_size[k]));
  row("exceedance", "p11_gt_p12", csv_number(r.density.p11_gt_p12));
  row("exceedance", "p12_gt_p22", csv_number(r.density.p12_gt_p22));
  row("exceedance", "p11_gt_p22", csv_number(r.density.p11_gt_p22));
  row("chain", "acceptance_rate", csv_number(r.acceptance_rate));
  return out;
}

/// parameter,bin_lo,bin_hi,mass for each block probability.
inline std::string densities_to_csv(const DensitySummary& d) {
  std::string out = "parameter,bin_lo,bin_hi,mass\n";
  const auto emit = [&](const char* name, const ParameterSummary& s) {
    for (std::size_t b = 0; b < s.mass.size(); ++b)
      out += std::string(name) + ',' + csv_number(s.bin_edges[b]) + ',' + csv_number(s.bin_edges[b + 1]) + ',' +
             csv_number(s.mass[b]) + '\n';
  };
  emit("p11", d.p11);
  emit("p12", d.p12);
  emit("p22", d.p22);
  return out;
}

/// One row per retained draw: chain,draw,p11,p12,p22,log_lik.
inline std::string traces_to_csv(const PosteriorSamples& s) {
  std::string out = "chain,draw,p11,p12,p22,log_lik\n";
  const auto emit = [&](std::size_t chain, const PosteriorSamples& c) {
    for (std::size_t t = 0; t < c.draws.size(); ++t)
      out += std::to_string(chain) + ',' + std::to_string(t) + ',' + csv_number(c.draws[t].p11) + ',' +
             csv_number(c.draws[t].p12) + ',' + csv_number(c.draws[t].p22) + ',' + csv_number(c.log_lik[t]) + '\n';
  };
  if (s.chains.empty()) {
    emit(0, s);
  } else {
    for (std::size_t k = 0; k < s.chains.size(); ++k) emit(k, s.chains[k]);
  }
  return out;
}

inline std::string sweep_to_csv(const SweepResult& r) {
  std::string out = "p12,mean_assortative,se_assortative,mean_cp,se_cp,mean_disassortative,se_disassortative,replicates\n";
  for (const auto& row : r.rows)
    out += csv_number(row.p12) + ',' + csv_number(row.mean_assortative) + ',' + csv_number(row.se_assortative) + ',' +
           csv_number(row.mean_cp) + ',' + csv_number(row.se_cp) + ',' + csv_number(row.mean_disassortative) + ',' +
           csv_number(row.se_disassortative) + ',' + std::to_string(row.replicates) + '\n';
  return out;
}

inline std::string replicates_to_csv(const SweepResult& r) {
  std::string out = "p12,replicate,edges,assortative,core_periphery,disassortative,label_recovery\n";
  for (const auto& rep : r.replicates)
    out += csv_number(rep.p12) + ',' + std::to_string(rep.replicate) + ',' + std::to_string(rep.edges) + ',' +
           csv_number(rep.verdict.p_assortative) + ',' + csv_number(rep.verdict.p_core_periphery) + ',' +
           csv_number(rep.verdict.p_disassortative) + ',' + csv_number(rep.label_recovery) + '\n';
  return out;
}

}  // namespace meso
