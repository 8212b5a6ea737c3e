#pragma once

#include "dgml/experiments.hpp"
#include "dgml/krylov.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <string>

namespace dgml {

namespace detail {

// JSON has no NaN; missing values become null.
inline nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace detail

inline nlohmann::json to_json(const SolveReport& r) {
  nlohmann::json km = nlohmann::json::object();
  for (const auto& [m, k] : r.K_m) km[std::to_string(m)] = detail::number(k);
  return {{"iterations", r.iterations},
          {"converged", r.converged},
          {"residuals", r.rel_residual_history},
          {"eig_min", detail::number(r.eig_min)},
          {"eig_max", detail::number(r.eig_max)},
          {"eigs", r.eig_sorted_low},
          {"K", detail::number(r.K)},
          {"K_m", km}};
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
  return {{"table", to_string(c.kind)},
          {"eps", c.eps_list},
          {"min_level", c.min_level},
          {"max_level", c.max_level},
          {"theta", c.theta},
          {"alpha", c.alpha},
          {"variant", to_string(c.variant)},
          {"ratio", c.ratio},
          {"smoother", to_string(c.smoother.kind)},
          {"sweeps", c.smoother.sweeps},
          {"cr_precond", to_string(c.cr_precond)},
          {"tol", c.tol},
          {"maxit", c.maxit},
          {"m", c.m},
          {"seed", c.seed},
          {"lanczos_steps", c.lanczos_steps}};
}

inline nlohmann::json to_json(const TableCell& c) {
  nlohmann::json j = {{"eps", c.eps}, {"level", c.level}, {"feasible", c.feasible}};
  if (!c.feasible) return j;
  j["dimension"] = c.dimension;
  j["converged"] = c.converged;
  if (!std::isnan(c.norm)) {
    j["norm"] = c.norm;
    j["norm_iterations"] = c.norm_iterations;
    return j;
  }
  j["iterations"] = c.iterations;
  j["residuals"] = c.residuals;
  j["energy_monotone"] = c.energy_monotone;
  j["spectrum"] = c.spectrum_method;
  j["orthogonality_lost"] = c.orthogonality_lost;
  j["lambda_min"] = detail::number(c.lambda_min);
  j["lambda_2"] = detail::number(c.lambda_2);
  j["lambda_max"] = detail::number(c.lambda_max);
  j["K"] = detail::number(c.K);
  j["K_m"] = detail::number(c.K_m);
  j["isolated"] = c.isolated;
  return j;
}

inline nlohmann::json to_json(const TableResult& t) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : t.cells) cells.push_back(to_json(c));
  nlohmann::json golden = nlohmann::json::array();
  for (const auto& g : t.golden)
    golden.push_back({{"eps", g.eps},
                      {"level", g.level},
                      {"quantity", g.quantity},
                      {"reference", g.reference},
                      {"measured", detail::number(g.measured)},
                      {"tolerance", g.tolerance},
                      {"pass", g.pass}});
  nlohmann::json assumptions = nlohmann::json::object();
  if (t.config.kind == TableKind::IIPGPropagator) {
    assumptions["alpha_star"] = 8.0;
    assumptions["norm"] = "A_S energy norm, A_S = (A + A^T) / 2";
  }
  return {{"name", t.name},
          {"config", to_json(t.config)},
          {"assumptions", assumptions},
          {"config_hash", t.hash},
          {"cells", cells},
          {"reference_applicable", t.golden_applicable},
          {"reference_checks", golden},
          {"reference_failures", t.golden_failures()},
          {"passed", t.passed()}};
}

}  // namespace dgml
