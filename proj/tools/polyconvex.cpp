#include <iostream>

#include <CLI11.hpp>

#include "polyconvex/cli.hpp"

int main(int argc, char** argv) {
  namespace cli = polyconvex::cli;
  CLI::App app{"Polynomial convexity certificates and experiments"};
  app.set_version_flag("--version", POLYCONVEX_VERSION);
  app.require_subcommand(1);

  cli::Options opts;
  std::uint64_t seed = 0;
  int degree = 0, restarts = 0;
  std::string samples, probes, out;

  for (const auto& name : cli::subcommands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", opts.config, "JSON config file")->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--out", out, "directory for report.json and artifacts");
    sub->add_option("--format", opts.format, "json or text")->check(CLI::IsMember({"json", "text"}));
    sub->add_flag("--svg", opts.svg, "also write SVG plots under --out");
    if (name == "hull-membership") {
      sub->add_option("--samples", samples, "CSV of samples of K (2n real columns)");
      sub->add_option("--probes", probes, "CSV of probe points (2n real columns)");
      sub->add_option("--degree", degree, "polynomial degree")->check(CLI::PositiveNumber);
      sub->add_option("--restarts", restarts, "descent restarts")->check(CLI::PositiveNumber);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitInputError;
  }

  CLI::App* sub = app.get_subcommands().front();
  opts.subcommand = sub->get_name();
  if (sub->count("--seed")) opts.seed = seed;
  if (sub->count("--out")) opts.out = out;
  if (opts.subcommand == "hull-membership") {
    if (sub->count("--samples")) opts.hull.samples_csv = samples;
    if (sub->count("--probes")) opts.hull.probes_csv = probes;
    if (sub->count("--degree")) opts.hull.degree = degree;
    if (sub->count("--restarts")) opts.hull.restarts = restarts;
  }
  return cli::run(opts, std::cout, std::cerr);
}
