#include "reports.hpp"

namespace schurlab::cli {

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json to_json(const std::vector<LadderStep>& ladder) {
  json out = json::array();
  for (const auto& s : ladder) {
    out.push_back({{"radius", s.radius}, {"window_size", s.window_size}, {"norm", s.norm}});
  }
  return out;
}

json to_json(const PsdReport& r) {
  return {{"psd", r.psd},
          {"min_eigenvalue", r.min_eigenvalue},
          {"scale", r.scale},
          {"asymmetry", r.asymmetry}};
}

json to_json(const NormResult& r) {
  return {{"value", r.value},
          {"converged", r.converged},
          {"iterations", r.iterations},
          {"method", r.method}};
}

json to_json(const CpNormReport& r) {
  return {{"trials", r.trials},
          {"upper_violations", r.upper_violations},
          {"max_ratio", r.max_ratio},
          {"witness_ratio", r.witness_ratio},
          {"kernel_at_identity", r.kernel_at_identity}};
}

json to_json(const SchurTestBound& r) {
  return {{"c1", r.c1}, {"c2", r.c2}, {"bound", r.bound}};
}

json to_json(const L1MultiplierBound& r) {
  return {{"multiplied_norm", r.multiplied_norm},
          {"base_norm", r.base_norm},
          {"l1_norm", r.l1_norm},
          {"ratio", r.ratio},
          {"holds", r.holds}};
}

json to_json(const Group& g, const DecompositionReport& r) {
  json chains = json::array();
  for (const auto& c : r.chains) {
    json shifts = json::array();
    for (const auto& s : c.shifts) shifts.push_back(s ? io::element_to_json(g, *s) : json(nullptr));
    chains.push_back({{"index", c.index},
                      {"status", to_string(c.status)},
                      {"shifts", shifts},
                      {"masses", c.masses},
                      {"late_spread", c.late_spread},
                      {"reason", c.reason}});
  }
  json seps = json::array();
  for (const auto& s : r.separations) {
    seps.push_back({{"i", s.i},
                    {"j", s.j},
                    {"indices", s.indices},
                    {"distances", s.distances},
                    {"late_minimum", s.late_minimum},
                    {"nondecreasing", s.nondecreasing},
                    {"strictly_increasing", s.strictly_increasing}});
  }
  json out = {{"stable", r.stable},
              {"status", r.stable ? "STABLE" : "UNSTABLE"},
              {"p", r.p},
              {"xi", r.xi ? io::xi_to_json(*r.xi) : json(nullptr)},
              {"eps_used", r.eps_used},
              {"chains", chains},
              {"residual_pp", r.residual_pp},
              {"residual_inf", r.residual_inf},
              {"separations", seps},
              {"dp_trajectory", r.dp_trajectory},
              {"dp_nonincreasing", r.dp_nonincreasing},
              {"residual_inf_final_ok", r.residual_inf_final_ok},
              {"residual_mass_ok", r.residual_mass_ok},
              {"orthogonality_residual", r.orthogonality_residual},
              {"diagnostics", r.diagnostics}};
  if (r.norm_convergence) {
    out["norm_convergence"] = {{"sup_gap", r.norm_convergence->sup_gap},
                               {"l1_gap", r.norm_convergence->l1_gap},
                               {"ladder", to_json(r.norm_convergence->ladder)}};
  } else {
    out["norm_convergence"] = nullptr;
  }
  return out;
}

json to_json(const Group& g, const DeltaResult& r) {
  json starts = json::array();
  for (const auto& s : r.log.starts) {
    starts.push_back({{"label", s.label},
                      {"initial", s.initial},
                      {"final", s.final_value},
                      {"sweeps", s.sweeps}});
  }
  json out = {{"F", io::elements_to_json(g, r.set)},
              {"p", r.p},
              {"value", r.value},
              {"witness_value", r.witness_value},
              {"minimizer", io::xi_to_json(r.minimizer)},
              {"phi_on_F", r.phi_on_set},
              {"window_norm", r.window_norm},
              {"window_size", r.window_size},
              {"window_stabilized", r.window_stabilized},
              {"window_ladder", to_json(r.window_ladder)},
              {"search_log",
               {{"evaluations", r.log.evaluations},
                {"support_radius", r.log.support_radius},
                {"coordinates", r.log.coordinates},
                {"best_start", r.log.best_start},
                {"single_profile_value", optional_number(r.log.single_profile_value)},
                {"starts", starts}}}};
  if (r.oracle) {
    json best = json::array();
    for (const auto& [x, v] : r.oracle->best) best.push_back({io::element_to_json(g, x), v});
    out["oracle"] = {{"value", r.oracle->value},
                     {"supports", r.oracle->supports},
                     {"evaluations", r.oracle->evaluations},
                     {"best", best},
                     {"gap", r.value - r.oracle->value}};
  } else {
    out["oracle"] = nullptr;
  }
  return out;
}

json to_json(const Group&, const Estimate& e) {
  return {{"mean", e.mean},
          {"stderr", e.std_error},
          {"exact", optional_number(e.exact)},
          {"samples", e.samples},
          {"truncated", e.truncated},
          {"seed", e.seed}};
}

json to_json(const Group& g, const MtpReport& r) {
  return {{"lhs", to_json(g, r.lhs)},
          {"rhs", to_json(g, r.rhs)},
          {"difference", r.difference},
          {"difference_stderr", r.difference_std_error},
          {"z_score", finite_or_null(r.z_score)}};
}

json to_json(const Group& g, const ScheduleRow& r) {
  json values = json::array();
  for (std::size_t i = 0; i < r.set.size(); ++i) {
    json v = to_json(g, r.values[i]);
    v["s"] = io::element_to_json(g, r.set[i]);
    values.push_back(std::move(v));
  }
  return {{"n", r.index},
          {"model", r.model},
          {"p", r.p},
          {"values", values},
          {"psd", to_json(r.psd)},
          {"psd_tolerance", r.psd_tolerance},
          {"max_deviation", r.max_deviation},
          {"bounded_by_one", r.bounded_by_one}};
}

}  // namespace schurlab::cli
