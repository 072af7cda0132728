#pragma once

// JSON encodings of certificates, verdicts and reports. Complex numbers are
// [re, im] pairs; non-finite doubles become null.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "polyconvex/ball_certifier.hpp"
#include "polyconvex/hull_oracle.hpp"
#include "polyconvex/variety_lab.hpp"

namespace polyconvex::json_io {

using nlohmann::json;

inline json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json complex(Complex z) { return json::array({number(z.real()), number(z.imag())}); }

inline json vector(const ComplexVector& v) {
  json out = json::array();
  for (Eigen::Index j = 0; j < v.size(); ++j) out.push_back(complex(v(j)));
  return out;
}

inline json matrix(const ComplexMatrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector(m.row(i).transpose()));
  return out;
}

inline json centre_status(const CentreStatus& s) {
  json out{{"admissible", s.admissible}};
  if (s.centre) {
    out["theta"] = number(s.centre->theta);
    out["b"] = vector(s.centre->b);
  }
  if (s.failure) {
    out["failure"] = std::string(to_string(*s.failure));
    out["detail"] = s.detail;
  }
  return out;
}

inline json hub_check(const HubCheck& h) {
  json records = json::array();
  for (const auto& r : h.records) {
    records.push_back({{"ball", r.ball},
                       {"theta", number(r.theta)},
                       {"b", vector(r.b)},
                       {"radius", number(r.radius)},
                       {"lower_bound", number(r.lower_bound)},
                       {"sampled_min", number(r.sampled_min)}});
  }
  return {{"hub", h.hub},
          {"map", {{"mu", complex(h.map.mu)}, {"shift", vector(h.map.shift)}}},
          {"lagrangian_search", h.lagrangian_search},
          {"unitary", matrix(h.unitary)},
          {"records", records},
          {"unit_ball_sampled_max", number(h.unit_ball_sampled_max)},
          {"halfplanes",
           {{"misses_disk", h.halfplanes.misses_disk},
            {"min_boundary_distance", number(h.halfplanes.min_boundary_distance)},
            {"grid_confirms", h.halfplanes.grid_confirms}}},
          {"complement",
           {{"analytic", h.complement.analytic},
            {"grid", h.complement.grid},
            {"components", h.complement.components}}},
          {"hull_margin", number(h.hull_margin)}};
}

inline json split_check(const SplitCheck& s) {
  json records = json::array();
  for (const auto& r : s.records) {
    records.push_back({{"ball", r.ball},
                       {"theta", number(r.theta)},
                       {"sector",
                        {{"centre_angle", number(r.sector.centre_angle)},
                         {"half_width", number(r.sector.half_width)},
                         {"radius_lo", number(r.sector.radius_lo)},
                         {"radius_hi", number(r.sector.radius_hi)}}},
                       {"sampled_excess", number(r.sampled_excess)}});
  }
  return {{"first", s.first}, {"second", s.second}, {"records", records}, {"hull_margin", number(s.hull_margin)}};
}

inline json linear_split_check(const LinearSplitCheck& s) {
  return {{"first", s.first},
          {"second", s.second},
          {"direction", vector(s.direction)},
          {"cut", number(s.cut)},
          {"hull_margin", number(s.hull_margin)},
          {"sampled_first_excess", number(s.sampled_first_excess)},
          {"sampled_second_excess", number(s.sampled_second_excess)}};
}

inline json certificate(const KallinCertificate& c) {
  json hypothesis = json::array();
  for (std::size_t j = 0; j < c.hypothesis.size(); ++j) {
    json h = centre_status(c.hypothesis[j]);
    h["ball"] = j;
    hypothesis.push_back(h);
  }
  json levels = json::array();
  for (const auto& level : c.levels) {
    json l{{"id", level.id},
           {"parent", level.parent},
           {"balls", level.balls},
           {"strategy", std::string(to_string(level.strategy))},
           {"passed", level.passed},
           {"children", level.children}};
    if (!level.hub_rejection.empty()) l["hub_rejection"] = level.hub_rejection;
    if (level.hub) l["hub"] = hub_check(*level.hub);
    if (level.split) l["split"] = split_check(*level.split);
    if (level.linear) l["linear_split"] = linear_split_check(*level.linear);
    levels.push_back(l);
  }
  json out{{"verdict", std::string(to_string(c.verdict))},
           {"dimension", c.dimension},
           {"ball_count", c.ball_count},
           {"min_margin", number(min_margin(c))},
           {"hypothesis", hypothesis},
           {"levels", levels},
           {"analytic_assertions", c.analytic_assertions}};
  if (c.failure) {
    out["failure"] = {{"kind", std::string(to_string(c.failure->kind))},
                      {"level", c.failure->level},
                      {"detail", c.failure->detail}};
  }
  return out;
}

inline json hull_verdict(const HullVerdict& v) {
  json coefficients = json::array();
  for (std::size_t k = 0; k < v.coefficients.size(); ++k) {
    coefficients.push_back({{"exponent", v.exponents[k]}, {"value", complex(v.coefficients[k])}});
  }
  return {{"status", std::string(to_string(v.status))},
          {"degree", v.degree},
          {"rho", number(v.rho)},
          {"probe_modulus", number(v.probe_modulus)},
          {"best_restart", v.best_restart},
          {"coefficients", coefficients}};
}

inline json variety_point(const VarietyPoint& p) {
  return {{"z", complex(p.z)}, {"w", complex(p.w)}, {"residual", number(p.residual)}};
}

inline json approx_report(const ApproxReport& r) {
  json errors = json::array(), training = json::array();
  for (double e : r.errors) errors.push_back(number(e));
  for (double e : r.training_errors) training.push_back(number(e));
  json out{{"target", r.target},
           {"degrees", r.degrees},
           {"errors", errors},
           {"training_errors", training},
           {"training_size", r.training_size},
           {"heldout_size", r.heldout_size}};
  out["ill_conditioned_degree"] = r.ill_conditioned_degree ? json(*r.ill_conditioned_degree) : json(nullptr);
  return out;
}

inline json variety_report(const VarietyReport& r) {
  json z1 = json::array(), z2 = json::array(), all = json::array(), levi = json::array(), probes = json::array();
  for (const auto& p : r.exceptional.z1) z1.push_back(variety_point(p));
  for (const auto& p : r.exceptional.z2) z2.push_back(variety_point(p));
  for (const auto& p : r.exceptional_union) all.push_back(variety_point(p));
  for (const auto& c : r.levi) {
    levi.push_back({{"analytic", number(c.analytic)},
                    {"numeric", number(c.numeric)},
                    {"relative_error", number(c.relative_error)}});
  }
  for (const auto& p : r.probes) {
    probes.push_back({{"z", complex(p.z)}, {"w", complex(p.w)}, {"distance", number(p.distance)},
                      {"verdict", hull_verdict(p.verdict)}});
  }
  return {{"exceptional_set", {{"Z1", z1}, {"Z2", z2}, {"Z", all}}},
          {"sampled", r.sampled},
          {"skipped", r.skipped},
          {"excluded_near_Z", r.excluded_near_z},
          {"totally_real", r.totally_real},
          {"not_totally_real", r.not_totally_real},
          {"max_det_identity_error", number(r.max_det_identity_error)},
          {"max_levi_relative_error", number(r.max_levi_relative_error)},
          {"levi_checks", levi},
          {"approximation", approx_report(r.approximation)},
          {"hull_probes", probes},
          {"all_pass", r.all_pass()}};
}

}  // namespace polyconvex::json_io
