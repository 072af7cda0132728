#pragma once

// Run configurations: schema checks with JSON-pointer diagnostics, unknown
// keys rejected, defaults filled in. The schemas are published in docs/schemas.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "polyconvex/ball_certifier.hpp"
#include "polyconvex/error.hpp"
#include "polyconvex/hull_oracle.hpp"
#include "polyconvex/variety_lab.hpp"

namespace polyconvex::config {

using nlohmann::json;

[[noreturn]] inline void invalid(const std::string& pointer, const std::string& message) {
  throw Error(ErrorKind::ConfigInvalid, (pointer.empty() ? std::string("/") : pointer) + ": " + message);
}

inline std::string child(const std::string& pointer, const std::string& key) {
  std::string escaped;
  for (char c : key) {
    if (c == '~') escaped += "~0";
    else if (c == '/') escaped += "~1";
    else escaped += c;
  }
  return pointer + "/" + escaped;
}

inline std::string child(const std::string& pointer, std::size_t index) { return pointer + "/" + std::to_string(index); }

/// Typed accessors over a JSON object that remember which keys were read.
class Node {
 public:
  Node(const json& value, std::string pointer) : value_(value), pointer_(std::move(pointer)) {}

  const std::string& pointer() const { return pointer_; }
  const json& value() const { return value_; }

  static Node object(const json& value, std::string pointer, std::initializer_list<const char*> allowed) {
    if (!value.is_object()) invalid(pointer, "must be an object");
    for (const auto& [key, _] : value.items()) {
      bool known = false;
      for (const char* a : allowed) known = known || key == a;
      if (!known) invalid(child(pointer, key), "unknown key");
    }
    return Node(value, std::move(pointer));
  }

  bool has(const char* key) const { return value_.contains(key); }

  Node at(const char* key) const {
    if (!value_.contains(key)) invalid(child(pointer_, key), "required key is missing");
    return Node(value_.at(key), child(pointer_, key));
  }

  double number(const char* key, std::optional<double> fallback = std::nullopt) const {
    if (!has(key)) {
      if (!fallback) invalid(child(pointer_, key), "required key is missing");
      return *fallback;
    }
    return at(key).as_number();
  }

  std::int64_t integer(const char* key, std::optional<std::int64_t> fallback = std::nullopt) const {
    if (!has(key)) {
      if (!fallback) invalid(child(pointer_, key), "required key is missing");
      return *fallback;
    }
    return at(key).as_integer();
  }

  std::string string(const char* key, std::optional<std::string> fallback = std::nullopt) const {
    if (!has(key)) {
      if (!fallback) invalid(child(pointer_, key), "required key is missing");
      return *fallback;
    }
    const Node n = at(key);
    if (!n.value_.is_string()) invalid(n.pointer_, "must be a string");
    return n.value_.get<std::string>();
  }

  double as_number() const {
    if (!value_.is_number()) invalid(pointer_, "must be a number");
    const double x = value_.get<double>();
    if (!std::isfinite(x)) invalid(pointer_, "must be finite");
    return x;
  }

  std::int64_t as_integer() const {
    if (!value_.is_number_integer()) invalid(pointer_, "must be an integer");
    return value_.get<std::int64_t>();
  }

  std::vector<Node> elements(std::size_t min_items = 0) const {
    if (!value_.is_array()) invalid(pointer_, "must be an array");
    if (value_.size() < min_items) invalid(pointer_, "needs at least " + std::to_string(min_items) + " items");
    std::vector<Node> out;
    for (std::size_t k = 0; k < value_.size(); ++k) out.emplace_back(value_.at(k), child(pointer_, k));
    return out;
  }

  Complex as_complex() const {
    const auto parts = elements();
    if (parts.size() != 2) invalid(pointer_, "complex numbers are [re, im] pairs");
    return {parts[0].as_number(), parts[1].as_number()};
  }

  /// Either [[re, im], ...] or interleaved reals [re1, im1, re2, im2, ...].
  ComplexVector as_complex_vector() const {
    const auto items = elements(1);
    if (items.front().value_.is_array()) {
      ComplexVector v(static_cast<Eigen::Index>(items.size()));
      for (std::size_t k = 0; k < items.size(); ++k) v(static_cast<Eigen::Index>(k)) = items[k].as_complex();
      return v;
    }
    if (items.size() % 2 != 0) invalid(pointer_, "interleaved real pairs need an even number of entries");
    ComplexVector v(static_cast<Eigen::Index>(items.size() / 2));
    for (std::size_t k = 0; k < items.size() / 2; ++k) {
      v(static_cast<Eigen::Index>(k)) = Complex(items[2 * k].as_number(), items[2 * k + 1].as_number());
    }
    return v;
  }

  std::vector<Complex> as_complex_list() const {
    std::vector<Complex> out;
    for (const auto& n : elements(1)) out.push_back(n.as_complex());
    return out;
  }

 private:
  const json& value_;
  std::string pointer_;
};

inline double positive(const Node& parent, const char* key, std::optional<double> fallback = std::nullopt) {
  const double x = parent.number(key, fallback);
  if (!(x > 0.0)) invalid(child(parent.pointer(), key), "must be positive");
  return x;
}

inline std::int64_t bounded(const Node& parent, const char* key, std::int64_t lo, std::int64_t hi,
                            std::optional<std::int64_t> fallback = std::nullopt) {
  const std::int64_t x = parent.integer(key, fallback);
  if (x < lo || x > hi) {
    invalid(child(parent.pointer(), key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return x;
}

inline std::uint64_t seed(const Node& root) {
  if (!root.has("seed")) return 0;
  const Node n = root.at("seed");
  if (!n.value().is_number_unsigned() && !(n.value().is_number_integer() && n.value().get<std::int64_t>() >= 0)) {
    invalid(n.pointer(), "must be a non-negative integer");
  }
  return n.value().get<std::uint64_t>();
}

inline json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline json vector_json(const ComplexVector& v) {
  json out = json::array();
  for (Eigen::Index j = 0; j < v.size(); ++j) out.push_back(complex_json(v(j)));
  return out;
}

inline json list_json(const std::vector<Complex>& v) {
  json out = json::array();
  for (Complex z : v) out.push_back(complex_json(z));
  return out;
}

inline std::vector<int> degree_list(const Node& parent, const char* key, std::vector<int> fallback) {
  if (!parent.has(key)) return fallback;
  std::vector<int> out;
  for (const auto& n : parent.at(key).elements(1)) {
    const auto d = n.as_integer();
    if (d < 0 || d > 40) invalid(n.pointer(), "degrees must lie in [0, 40]");
    out.push_back(static_cast<int>(d));
  }
  return out;
}

inline UnivariatePolynomial polynomial(const Node& parent, const char* key) {
  const Node n = parent.at(key);
  UnivariatePolynomial p(n.as_complex_list());
  if (p.is_constant()) invalid(n.pointer(), "polynomial must be non-constant");
  return p;
}

// certify-balls --------------------------------------------------------------

struct CertifyConfig {
  BallConfig balls;
  CertifyOptions options;
  json resolved;
};

inline CertifyConfig parse_certify(const json& doc) {
  const Node root = Node::object(doc, "", {"balls", "frame", "samples_per_ball", "resolution", "seed", "tolerances"});
  CertifyConfig out;
  for (const auto& item : root.at("balls").elements(1)) {
    const Node ball = Node::object(item.value(), item.pointer(), {"centre", "radius"});
    Ball b;
    b.centre = ball.at("centre").as_complex_vector();
    b.radius = positive(ball, "radius");
    if (!out.balls.balls.empty() && b.centre.size() != out.balls.balls.front().centre.size()) {
      invalid(child(ball.pointer(), "centre"), "all centres must have the same dimension");
    }
    out.balls.balls.push_back(b);
  }
  const Eigen::Index n = out.balls.dimension();
  if (root.has("frame")) {
    LagrangianFrame frame;
    for (const auto& v : root.at("frame").elements(1)) {
      frame.basis.push_back(v.as_complex_vector());
      if (frame.basis.back().size() != n) invalid(v.pointer(), "frame vectors must match the ball dimension");
    }
    if (static_cast<Eigen::Index>(frame.basis.size()) != n) invalid(root.at("frame").pointer(), "frame needs n vectors");
    out.options.frame = frame;
  }
  out.options.samples_per_ball = static_cast<int>(bounded(root, "samples_per_ball", 16, 1000000, 2000));
  out.options.resolution = static_cast<int>(bounded(root, "resolution", 32, 4096, 512));
  out.options.seed = seed(root);
  if (root.has("tolerances")) {
    const Node tol = Node::object(root.at("tolerances").value(), "/tolerances", {"real", "angle", "sample_slack"});
    out.options.tol.real = positive(tol, "real", out.options.tol.real);
    out.options.tol.angle = positive(tol, "angle", out.options.tol.angle);
    out.options.tol.sample_slack = tol.number("sample_slack", out.options.tol.sample_slack);
    if (out.options.tol.sample_slack < 0.0) invalid("/tolerances/sample_slack", "must be non-negative");
  }

  json balls = json::array();
  for (const auto& b : out.balls.balls) balls.push_back({{"centre", vector_json(b.centre)}, {"radius", b.radius}});
  out.resolved = {{"balls", balls},
                  {"samples_per_ball", out.options.samples_per_ball},
                  {"resolution", out.options.resolution},
                  {"seed", out.options.seed},
                  {"tolerances",
                   {{"real", out.options.tol.real},
                    {"angle", out.options.tol.angle},
                    {"sample_slack", out.options.tol.sample_slack}}}};
  if (out.options.frame) {
    json frame = json::array();
    for (const auto& v : out.options.frame->basis) frame.push_back(vector_json(v));
    out.resolved["frame"] = frame;
  }
  return out;
}

// hull-membership ------------------------------------------------------------

/// Rows of 2n real columns (re1, im1, re2, im2, ...); blank lines and lines starting with '#' are skipped.
inline std::vector<ComplexVector> read_points_csv(const std::filesystem::path& path, const std::string& pointer) {
  std::ifstream in(path);
  if (!in) invalid(pointer, "cannot open " + path.string());
  std::vector<ComplexVector> out;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> values;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        if (out.empty() && values.empty()) break;  // header row
        invalid(pointer, path.string() + " row " + std::to_string(row) + ": not a number");
      }
    }
    if (values.empty()) continue;
    if (values.size() % 2 != 0) invalid(pointer, path.string() + " row " + std::to_string(row) + ": odd column count");
    ComplexVector v(static_cast<Eigen::Index>(values.size() / 2));
    for (std::size_t k = 0; k < values.size() / 2; ++k) v(static_cast<Eigen::Index>(k)) = {values[2 * k], values[2 * k + 1]};
    if (!out.empty() && v.size() != out.front().size()) {
      invalid(pointer, path.string() + " row " + std::to_string(row) + ": column count differs");
    }
    out.push_back(v);
  }
  if (out.empty()) invalid(pointer, path.string() + " holds no points");
  return out;
}

struct HullConfig {
  std::vector<ComplexVector> samples;
  std::vector<ComplexVector> probes;
  HullQuery budget;
  EscapeOptions escape;
  json resolved;
};

struct HullOverrides {
  std::optional<std::string> samples_csv;
  std::optional<std::string> probes_csv;
  std::optional<int> degree;
  std::optional<int> restarts;
};

inline std::vector<ComplexVector> point_set(const Node& root, const char* inline_key, const char* csv_key,
                                            const std::optional<std::string>& override_csv,
                                            const std::filesystem::path& base) {
  if (override_csv) return read_points_csv(*override_csv, std::string("--") + (inline_key[0] == 's' ? "samples" : "probes"));
  if (root.has(csv_key)) {
    std::filesystem::path p = root.string(csv_key);
    if (p.is_relative()) p = base / p;
    return read_points_csv(p, child(root.pointer(), csv_key));
  }
  if (!root.has(inline_key)) invalid(child(root.pointer(), inline_key), "required key is missing");
  std::vector<ComplexVector> out;
  for (const auto& n : root.at(inline_key).elements(1)) out.push_back(n.as_complex_vector());
  return out;
}

inline HullConfig parse_hull(const json& doc, const std::filesystem::path& base, const HullOverrides& overrides = {}) {
  const Node root = Node::object(doc, "", {"samples", "samples_csv", "probes", "probes_csv", "degree", "restarts",
                                           "iterations", "tau_escape", "seed"});
  HullConfig out;
  out.samples = point_set(root, "samples", "samples_csv", overrides.samples_csv, base);
  out.probes = point_set(root, "probes", "probes_csv", overrides.probes_csv, base);
  const Eigen::Index n = out.samples.front().size();
  for (std::size_t k = 0; k < out.samples.size(); ++k) {
    if (out.samples[k].size() != n) invalid(child("/samples", k), "dimension differs from the first sample");
  }
  for (std::size_t k = 0; k < out.probes.size(); ++k) {
    if (out.probes[k].size() != n) invalid(child("/probes", k), "probe dimension differs from the samples");
  }
  out.budget.degree = overrides.degree ? *overrides.degree : static_cast<int>(bounded(root, "degree", 1, 30, 2));
  if (out.budget.degree < 1) invalid("/degree", "must be at least 1");
  out.budget.restarts = overrides.restarts ? *overrides.restarts : static_cast<int>(bounded(root, "restarts", 1, 100, 5));
  if (out.budget.restarts < 1) invalid("/restarts", "must be at least 1");
  out.budget.iterations = static_cast<int>(bounded(root, "iterations", 10, 1000000, 2000));
  out.escape.tau_escape = root.number("tau_escape", 0.05);
  if (!(out.escape.tau_escape > 0.0 && out.escape.tau_escape < 1.0)) invalid("/tau_escape", "must lie in (0, 1)");
  out.budget.seed = seed(root);

  json samples = json::array(), probes = json::array();
  for (const auto& s : out.samples) samples.push_back(vector_json(s));
  for (const auto& p : out.probes) probes.push_back(vector_json(p));
  out.resolved = {{"samples", samples},          {"probes", probes},
                  {"degree", out.budget.degree}, {"restarts", out.budget.restarts},
                  {"iterations", out.budget.iterations}, {"tau_escape", out.escape.tau_escape},
                  {"seed", out.budget.seed}};
  return out;
}

// variety-report / approx-test / sample-variety ------------------------------

inline VarietyTolerances variety_tolerances(const Node& root) {
  VarietyTolerances tol;
  if (!root.has("tolerances")) return tol;
  const Node t = Node::object(root.at("tolerances").value(), "/tolerances",
                              {"variety", "det", "dedup", "exclusion", "root"});
  tol.variety = positive(t, "variety", tol.variety);
  tol.det = positive(t, "det", tol.det);
  tol.dedup = positive(t, "dedup", tol.dedup);
  tol.exclusion = positive(t, "exclusion", tol.exclusion);
  tol.root = positive(t, "root", tol.root);
  return tol;
}

inline json tolerances_json(const VarietyTolerances& t) {
  return {{"variety", t.variety}, {"det", t.det}, {"dedup", t.dedup}, {"exclusion", t.exclusion}, {"root", t.root}};
}

struct BallRegion {
  Complex a_z;
  Complex a_w;
  double radius = 1.0;
};

inline BallRegion ball_region(const Node& root) {
  const Node b = Node::object(root.at("ball").value(), "/ball", {"centre", "radius"});
  const ComplexVector c = b.at("centre").as_complex_vector();
  if (c.size() != 2) invalid("/ball/centre", "centre must be a point of C^2");
  return {c(0), c(1), positive(b, "radius")};
}

struct VarietyConfig {
  UnivariatePolynomial p;
  UnivariatePolynomial q;
  BallRegion ball;
  VarietyReportOptions options;
  json resolved;
};

inline VarietyConfig parse_variety_report(const json& doc) {
  const Node root = Node::object(doc, "", {"p", "q", "ball", "samples", "degrees", "levi_checks", "hull_degree",
                                           "hull_probes", "hull_restarts", "hull_iterations", "training", "seed",
                                           "tolerances"});
  VarietyConfig out;
  out.p = polynomial(root, "p");
  out.q = polynomial(root, "q");
  out.ball = ball_region(root);
  auto& o = out.options;
  o.samples = static_cast<std::size_t>(bounded(root, "samples", 1, 100000, 300));
  o.degrees = degree_list(root, "degrees", o.degrees);
  o.levi_checks = static_cast<std::size_t>(bounded(root, "levi_checks", 0, 100000, 20));
  o.hull_degree = static_cast<int>(bounded(root, "hull_degree", 1, 20, o.hull_degree));
  o.hull_probes = static_cast<std::size_t>(bounded(root, "hull_probes", 0, 1000, 4));
  o.hull_budget.restarts = static_cast<int>(bounded(root, "hull_restarts", 1, 100, 5));
  o.hull_budget.iterations = static_cast<int>(bounded(root, "hull_iterations", 10, 1000000, 2000));
  if (root.has("training")) {
    const Node t = Node::object(root.at("training").value(), "/training", {"radii", "angles"});
    o.training_radii = static_cast<int>(bounded(t, "radii", 1, 1000, o.training_radii));
    o.training_angles = static_cast<int>(bounded(t, "angles", 1, 10000, o.training_angles));
  }
  o.seed = seed(root);
  o.tol = variety_tolerances(root);
  out.resolved = {{"p", list_json(out.p.coefficients())},
                  {"q", list_json(out.q.coefficients())},
                  {"ball", {{"centre", json::array({complex_json(out.ball.a_z), complex_json(out.ball.a_w)})},
                            {"radius", out.ball.radius}}},
                  {"samples", o.samples},
                  {"degrees", o.degrees},
                  {"levi_checks", o.levi_checks},
                  {"hull_degree", o.hull_degree},
                  {"hull_probes", o.hull_probes},
                  {"hull_restarts", o.hull_budget.restarts},
                  {"hull_iterations", o.hull_budget.iterations},
                  {"training", {{"radii", o.training_radii}, {"angles", o.training_angles}}},
                  {"seed", o.seed},
                  {"tolerances", tolerances_json(o.tol)}};
  return out;
}

struct ApproxConfig {
  std::string experiment;
  int m = 2;
  int n = 3;
  DiskMapOptions disk;
  UnivariatePolynomial p;
  UnivariatePolynomial q;
  BallRegion ball;
  int training_radii = 16;
  int training_angles = 64;
  std::vector<int> degrees;
  std::uint64_t seed = 0;
  VarietyTolerances tol;
  json resolved;
};

inline ApproxConfig parse_approx(const json& doc) {
  if (!doc.is_object()) invalid("", "must be an object");
  const Node probe(doc, "");
  const std::string experiment = probe.has("experiment") ? probe.string("experiment") : "";
  ApproxConfig out;
  out.experiment = experiment;
  if (experiment == "disk_map") {
    const Node root = Node::object(doc, "", {"experiment", "m", "n", "grid", "degrees", "seed"});
    out.m = static_cast<int>(bounded(root, "m", 1, 50));
    out.n = static_cast<int>(bounded(root, "n", 1, 50));
    if (root.has("grid")) {
      const Node g = Node::object(root.at("grid").value(), "/grid", {"radii", "angles"});
      out.disk.radii = static_cast<int>(bounded(g, "radii", 1, 1000, out.disk.radii));
      out.disk.angles = static_cast<int>(bounded(g, "angles", 1, 10000, out.disk.angles));
    }
    out.degrees = degree_list(root, "degrees", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
    out.seed = seed(root);
    out.disk.seed = out.seed;
    out.resolved = {{"experiment", experiment},
                    {"m", out.m},
                    {"n", out.n},
                    {"grid", {{"radii", out.disk.radii}, {"angles", out.disk.angles}}},
                    {"degrees", out.degrees},
                    {"seed", out.seed}};
  } else if (experiment == "variety") {
    const Node root =
        Node::object(doc, "", {"experiment", "p", "q", "ball", "training", "degrees", "seed", "tolerances"});
    out.p = polynomial(root, "p");
    out.q = polynomial(root, "q");
    out.ball = ball_region(root);
    if (root.has("training")) {
      const Node t = Node::object(root.at("training").value(), "/training", {"radii", "angles"});
      out.training_radii = static_cast<int>(bounded(t, "radii", 1, 1000, out.training_radii));
      out.training_angles = static_cast<int>(bounded(t, "angles", 1, 10000, out.training_angles));
    }
    out.degrees = degree_list(root, "degrees", {1, 2, 3, 4, 5, 6});
    out.seed = seed(root);
    out.tol = variety_tolerances(root);
    out.resolved = {{"experiment", experiment},
                    {"p", list_json(out.p.coefficients())},
                    {"q", list_json(out.q.coefficients())},
                    {"ball", {{"centre", json::array({complex_json(out.ball.a_z), complex_json(out.ball.a_w)})},
                              {"radius", out.ball.radius}}},
                    {"training", {{"radii", out.training_radii}, {"angles", out.training_angles}}},
                    {"degrees", out.degrees},
                    {"seed", out.seed},
                    {"tolerances", tolerances_json(out.tol)}};
  } else {
    invalid("/experiment", "must be \"disk_map\" or \"variety\"");
  }
  return out;
}

struct SampleConfig {
  UnivariatePolynomial p;
  UnivariatePolynomial q;
  Complex centre;
  double radius = 1.0;
  std::size_t count = 100;
  std::uint64_t seed = 0;
  VarietyTolerances tol;
  json resolved;
};

inline SampleConfig parse_sample(const json& doc) {
  const Node root = Node::object(doc, "", {"p", "q", "disk", "count", "seed", "tolerances"});
  SampleConfig out;
  out.p = polynomial(root, "p");
  out.q = polynomial(root, "q");
  const Node disk = Node::object(root.at("disk").value(), "/disk", {"centre", "radius"});
  out.centre = disk.at("centre").as_complex();
  out.radius = positive(disk, "radius");
  out.count = static_cast<std::size_t>(bounded(root, "count", 1, 10000000, 100));
  out.seed = seed(root);
  out.tol = variety_tolerances(root);
  out.resolved = {{"p", list_json(out.p.coefficients())},
                  {"q", list_json(out.q.coefficients())},
                  {"disk", {{"centre", complex_json(out.centre)}, {"radius", out.radius}}},
                  {"count", out.count},
                  {"seed", out.seed},
                  {"tolerances", tolerances_json(out.tol)}};
  return out;
}

inline json load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigInvalid, "/: cannot open config file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ConfigInvalid, std::string("/: malformed JSON: ") + e.what());
  }
}

}  // namespace polyconvex::config
