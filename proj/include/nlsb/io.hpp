#pragma once

// JSON views of reports, observables, traces, and the resolved run
// configuration.  Uses insertion-ordered JSON and sorted maps throughout so
// identical inputs serialize byte-identically.

#include <json.hpp>

#include <fstream>
#include <stdexcept>
#include <string>

#include "nlsb/config.hpp"
#include "nlsb/criteria.hpp"
#include "nlsb/observables.hpp"
#include "nlsb/solver.hpp"

namespace nlsb {

using ordered_json = nlohmann::ordered_json;

inline ordered_json json_of_observables(const Observables& obs) {
  ordered_json j;
  j["mass"] = obs.mass;
  j["kinetic"] = obs.kinetic;
  j["energy"] = obs.energy;
  j["variance"] = obs.variance;
  j["variance_rate"] = obs.variance_rate;
  j["grad_norm_sq"] = obs.grad_norm_sq;
  j["potential_terms"] = obs.potential_terms;
  return j;
}

inline ordered_json json_of_report(const CriterionReport& r) {
  ordered_json j;
  j["id"] = criterion_id_name(r.id);
  j["case"] = r.case_label;
  j["applicable"] = r.applicable;
  j["satisfied"] = r.satisfied;
  j["margin"] = r.margin;
  ordered_json params;
  for (const auto& [k, v] : r.parameters) params[k] = v;
  j["parameters"] = params;
  ordered_json lists;
  for (const auto& [k, v] : r.parameter_lists) lists[k] = v;
  j["parameter_lists"] = lists;
  j["notes"] = r.notes;
  return j;
}

inline ordered_json json_of_config(const RunConfig& cfg, const Grid* effective_grid) {
  ordered_json j;
  ordered_json nl;
  nl["kind"] = cfg.nl_kind;
  if (cfg.nl_kind == "exponential") {
    nl["truncation"] = cfg.nl_truncation;
  } else {
    ordered_json terms = ordered_json::array();
    for (const auto& t : cfg.effective_terms()) terms.push_back({t.c, t.beta});
    nl["terms"] = terms;
  }
  j["nonlinearity"] = nl;

  ordered_json prof;
  prof["family"] = cfg.profile_family;
  prof["theta"] = cfg.theta;
  prof["A"] = cfg.A;
  prof["b"] = cfg.b;
  if (cfg.profile_family == "weighted-decay") prof["n"] = cfg.n;
  j["profile"] = prof;

  if (effective_grid != nullptr) {
    ordered_json grid;
    grid["half_width"] = effective_grid->half_width;
    grid["num_points"] = effective_grid->num_points;
    j["grid"] = grid;
  }

  ordered_json crit;
  crit["checks"] = cfg.checks.empty() ? std::vector<std::string>{"auto"} : cfg.checks;
  crit["real_data_shortcut"] = cfg.real_data_shortcut;
  auto maybe = [&crit](const char* name, const std::optional<double>& v) {
    if (v) crit[name] = *v;
  };
  maybe("lambda1", cfg.lambda1);
  maybe("lambda2", cfg.lambda2);
  maybe("lambda3", cfg.lambda3);
  maybe("alpha1", cfg.alpha1);
  maybe("alpha2", cfg.alpha2);
  maybe("alpha3", cfg.alpha3);
  maybe("eps1", cfg.eps1);
  maybe("eps2", cfg.eps2);
  maybe("p", cfg.p);
  maybe("q", cfg.q);
  j["criteria"] = crit;

  ordered_json solver;
  solver["dt"] = cfg.dt;
  solver["t_end"] = cfg.t_end;
  solver["cadence"] = cfg.cadence;
  j["solver"] = solver;

  j["output"] = {{"directory", cfg.output_directory}};
  return j;
}

inline ordered_json json_of_diagnostics(const SimulationTrace& trace,
                                        const TraceDiagnostics& diag) {
  ordered_json j;
  j["stop_reason"] = stop_reason_name(trace.stop_reason);
  if (trace.blowup_time_estimate)
    j["blowup_time_estimate"] = *trace.blowup_time_estimate;
  else
    j["blowup_time_estimate"] = nullptr;
  j["samples"] = trace.times.size();
  j["mass_drift"] = diag.mass_drift;
  j["energy_drift"] = diag.energy_drift;
  if (diag.virial_mismatch)
    j["virial_mismatch"] = *diag.virial_mismatch;
  else
    j["virial_mismatch"] = nullptr;
  j["vtt_negative"] = diag.vtt_negative;
  return j;
}

inline void write_json_file(const ordered_json& j, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  os << j.dump(2) << '\n';
}

}  // namespace nlsb
