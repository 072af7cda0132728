#pragma once

// Subcommand dispatch for the polyconvex tool. Exit codes: 0 certified or
// completed, 2 not certified, 1 input error.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "polyconvex/ball_certifier.hpp"
#include "polyconvex/config.hpp"
#include "polyconvex/error.hpp"
#include "polyconvex/hull_oracle.hpp"
#include "polyconvex/json_io.hpp"
#include "polyconvex/svg.hpp"
#include "polyconvex/variety_lab.hpp"

#ifndef POLYCONVEX_VERSION
#define POLYCONVEX_VERSION "0.0.0"
#endif

namespace polyconvex::cli {

using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNotCertified = 2;

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"certify-balls", "hull-membership", "variety-report", "approx-test",
                                              "sample-variety"};
  return names;
}

struct Options {
  std::string subcommand;
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::string format = "json";
  bool svg = false;
  config::HullOverrides hull;
};

struct Outcome {
  int exit_code = kExitOk;
  json result;
  json resolved;
  std::uint64_t seed = 0;
  std::string summary;
  /// file name -> content, written under --out
  std::vector<std::pair<std::string, std::string>> artifacts;
};

inline std::string fixed(double x, int digits = 6) {
  std::ostringstream os;
  os << std::setprecision(digits) << x;
  return os.str();
}

inline Outcome certify_balls(const json& doc, const Options& opts) {
  auto cfg = config::parse_certify(doc);
  if (opts.seed) {
    cfg.options.seed = *opts.seed;
    cfg.resolved["seed"] = *opts.seed;
  }
  Outcome out;
  out.seed = cfg.options.seed;
  out.resolved = cfg.resolved;
  const KallinCertificate cert = certify(cfg.balls, cfg.options);
  out.result = json_io::certificate(cert);
  out.exit_code = cert.verdict == Verdict::Certified ? kExitOk : kExitNotCertified;
  out.summary = std::string(to_string(cert.verdict)) + " (" + std::to_string(cert.ball_count) + " balls in C^" +
                std::to_string(cert.dimension) + ", " + std::to_string(cert.levels.size()) + " levels";
  if (cert.verdict == Verdict::Certified) out.summary += ", min margin " + fixed(min_margin(cert));
  out.summary += ")";
  if (cert.failure) out.summary += "\n" + std::string(to_string(cert.failure->kind)) + ": " + cert.failure->detail;
  if (opts.svg) {
    for (const auto& level : cert.levels) {
      if (!level.hub || level.hub->records.empty()) continue;
      std::vector<double> thetas;
      for (const auto& r : level.hub->records) thetas.push_back(r.theta);
      out.artifacts.emplace_back("halfplanes_level" + std::to_string(level.id) + ".svg", svg::halfplanes(thetas));
    }
  }
  return out;
}

inline Outcome hull_membership(const json& doc, const Options& opts) {
  auto cfg = config::parse_hull(doc, opts.config.parent_path(), opts.hull);
  if (opts.seed) {
    cfg.budget.seed = *opts.seed;
    cfg.resolved["seed"] = *opts.seed;
  }
  Outcome out;
  out.seed = cfg.budget.seed;
  out.resolved = cfg.resolved;
  const auto verdicts = hull_scan(cfg.samples, cfg.probes, cfg.budget.degree, cfg.budget, cfg.escape);
  json list = json::array();
  std::size_t escaped = 0;
  for (std::size_t k = 0; k < verdicts.size(); ++k) {
    json v = json_io::hull_verdict(verdicts[k]);
    v["probe"] = k;
    list.push_back(v);
    if (verdicts[k].status == HullStatus::Escaped) ++escaped;
  }
  out.result = {{"verdicts", list}, {"escaped", escaped}, {"probes", verdicts.size()}};
  std::ostringstream os;
  os << escaped << " of " << verdicts.size() << " probes escaped at degree " << cfg.budget.degree;
  for (std::size_t k = 0; k < verdicts.size(); ++k) {
    os << "\n  probe " << k << ": " << to_string(verdicts[k].status) << " rho " << fixed(verdicts[k].rho);
  }
  out.summary = os.str();
  return out;
}

inline Outcome variety(const json& doc, const Options& opts) {
  auto cfg = config::parse_variety_report(doc);
  if (opts.seed) {
    cfg.options.seed = *opts.seed;
    cfg.resolved["seed"] = *opts.seed;
  }
  Outcome out;
  out.seed = cfg.options.seed;
  out.resolved = cfg.resolved;
  const VarietyReport r = variety_report(cfg.p, cfg.q, cfg.ball.a_z, cfg.ball.a_w, cfg.ball.radius, cfg.options);
  out.result = json_io::variety_report(r);
  std::ostringstream os;
  os << "Z has " << r.exceptional_union.size() << " points; " << r.totally_real << " of " << r.sampled
     << " sampled points totally real (" << r.excluded_near_z << " excluded near Z)\n"
     << "max Levi relative error " << fixed(r.max_levi_relative_error) << "\n"
     << "approximation errors:";
  for (std::size_t k = 0; k < r.approximation.errors.size(); ++k) {
    os << " d" << r.approximation.degrees[k] << "=" << fixed(r.approximation.errors[k], 4);
  }
  os << "\nall checks " << (r.all_pass() ? "pass" : "FAIL");
  out.summary = os.str();
  if (opts.svg) {
    out.artifacts.emplace_back("approximation.svg",
                               svg::error_curve(r.approximation.degrees, r.approximation.errors));
  }
  return out;
}

inline Outcome approx(const json& doc, const Options& opts) {
  auto cfg = config::parse_approx(doc);
  if (opts.seed) {
    cfg.seed = *opts.seed;
    cfg.disk.seed = *opts.seed;
    cfg.resolved["seed"] = *opts.seed;
  }
  Outcome out;
  out.seed = cfg.seed;
  out.resolved = cfg.resolved;
  ApproxReport report;
  std::string bound;
  if (cfg.experiment == "disk_map") {
    const auto e = disk_map_experiment(cfg.m, cfg.n, cfg.degrees, cfg.disk);
    report = e.report;
    out.result = {{"report", json_io::approx_report(report)},
                  {"gcd", e.gcd},
                  {"symmetry_lower_bound", e.symmetry_lower_bound},
                  {"non_increasing", report.non_increasing()}};
    if (e.gcd > 1) bound = "\nsymmetry lower bound " + fixed(e.symmetry_lower_bound, 4) + " (gcd " + std::to_string(e.gcd) + ")";
  } else {
    std::size_t skipped = 0;
    const auto training = detail::grid_in_ball(cfg.p, cfg.q, cfg.ball.a_z, cfg.ball.a_w, cfg.ball.radius,
                                               cfg.training_radii, cfg.training_angles, cfg.tol);
    if (training.empty()) throw Error(ErrorKind::InvalidArgument, "the ball does not meet the variety");
    const auto heldout = detail::sample_in_ball(cfg.p, cfg.q, cfg.ball.a_z, cfg.ball.a_w, cfg.ball.radius,
                                                4 * training.size(), splitmix64(cfg.seed ^ 2), cfg.tol, skipped);
    report = uniform_approx_test(conj_z_samples(training), conj_z_samples(heldout), cfg.degrees, "conj_z");
    out.result = {{"report", json_io::approx_report(report)},
                  {"skipped", skipped},
                  {"non_increasing", report.non_increasing()}};
  }
  std::ostringstream os;
  os << cfg.experiment << " target conj(z):";
  for (std::size_t k = 0; k < report.errors.size(); ++k) os << " d" << report.degrees[k] << "=" << fixed(report.errors[k], 4);
  os << bound;
  if (report.ill_conditioned_degree) os << "\nIllConditioned at degree " << *report.ill_conditioned_degree;
  out.summary = os.str();
  if (opts.svg) out.artifacts.emplace_back("approximation.svg", svg::error_curve(report.degrees, report.errors));
  return out;
}

inline std::string samples_csv(const std::vector<VarietyPoint>& points) {
  std::ostringstream os;
  os << "z_re,z_im,w_re,w_im,residual\n" << std::setprecision(17);
  for (const auto& p : points) {
    os << p.z.real() << ',' << p.z.imag() << ',' << p.w.real() << ',' << p.w.imag() << ',' << p.residual << '\n';
  }
  return os.str();
}

inline Outcome sample(const json& doc, const Options& opts) {
  auto cfg = config::parse_sample(doc);
  if (opts.seed) {
    cfg.seed = *opts.seed;
    cfg.resolved["seed"] = *opts.seed;
  }
  Outcome out;
  out.seed = cfg.seed;
  out.resolved = cfg.resolved;
  const VarietySample s = sample_variety(cfg.p, cfg.q, cfg.centre, cfg.radius, cfg.count, cfg.seed, cfg.tol);
  double worst = 0.0;
  json points = json::array();
  for (const auto& p : s.points) {
    worst = std::max(worst, p.residual);
    points.push_back(json_io::variety_point(p));
  }
  out.result = {{"points", points}, {"count", s.points.size()}, {"skipped", s.skipped}, {"max_residual", worst}};
  out.summary = std::to_string(s.points.size()) + " points of S, " + std::to_string(s.skipped) +
                " draws skipped, max residual " + fixed(worst, 3);
  out.artifacts.emplace_back("samples.csv", samples_csv(s.points));
  return out;
}

inline json report_document(const Options& opts, const Outcome& outcome) {
  return {{"tool", "polyconvex"},
          {"version", POLYCONVEX_VERSION},
          {"subcommand", opts.subcommand},
          {"seed", outcome.seed},
          {"config", outcome.resolved},
          {"result", outcome.result},
          {"exit_code", outcome.exit_code}};
}

/// Runs one subcommand; the report goes to `out`, diagnostics to `err`.
inline int run(const Options& opts, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  try {
    if (opts.format != "json" && opts.format != "text") {
      throw Error(ErrorKind::InvalidArgument, "--format must be json or text");
    }
    const json doc = config::load(opts.config);
    Outcome outcome;
    if (opts.subcommand == "certify-balls") outcome = certify_balls(doc, opts);
    else if (opts.subcommand == "hull-membership") outcome = hull_membership(doc, opts);
    else if (opts.subcommand == "variety-report") outcome = variety(doc, opts);
    else if (opts.subcommand == "approx-test") outcome = approx(doc, opts);
    else if (opts.subcommand == "sample-variety") outcome = sample(doc, opts);
    else throw Error(ErrorKind::InvalidArgument, "unknown subcommand " + opts.subcommand);

    const std::string report = report_document(opts, outcome).dump(2) + "\n";
    if (opts.out) {
      std::error_code ec;
      std::filesystem::create_directories(*opts.out, ec);
      if (ec) throw Error(ErrorKind::IoFailure, "cannot create " + opts.out->string());
      svg::write_file((*opts.out / "report.json").string(), report);
      for (const auto& [name, content] : outcome.artifacts) svg::write_file((*opts.out / name).string(), content);
    }
    if (opts.format == "json") {
      out << report;
    } else {
      const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      out << opts.subcommand << ": " << outcome.summary << "\n(elapsed " << fixed(seconds, 3) << " s)\n";
    }
    return outcome.exit_code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace polyconvex::cli
