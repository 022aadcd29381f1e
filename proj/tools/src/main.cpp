#include "fpl_app/app.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv)
{
  CLI::App cli{"Weighted anisotropic p-Laplace solver and Sobolev-constant verifier"};
  cli.require_subcommand(1);

  fpl::app::RunOptions opts;
  std::string out_path;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "output path (default: stdout)");
    sub->add_option("--seed", seed, "seed, overrides the config");
    sub->add_option("--jobs", opts.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
    sub->add_option("--format", opts.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--set", opts.overrides, "key=value override, repeatable")->allow_extra_args(false);
  };
  for (const char* name : {"solve", "extremal", "verify", "sweep", "check-norms"}) {
    static const std::map<std::string, std::string> help{
      {"solve", "solve the regularized problem over the n schedule"},
      {"extremal", "best constant by formula and by direct minimization"},
      {"verify", "test the Sobolev inequality for a constant or for 0.99/1.05 mu"},
      {"sweep", "extremal pipeline over a (p, delta, nu, norm) grid"},
      {"check-norms", "sampled Finsler norm property suite"}};
    add_common(cli.add_subcommand(name, help.at(name)));
  }

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = cli.exit(e);
    return rc == 0 ? 0 : fpl::app::kConfigError;
  }
  opts.subcommand = cli.get_subcommands().front()->get_name();
  if (cli.get_subcommands().front()->count("--seed") > 0)
    opts.seed = seed;

  if (out_path.empty())
    return fpl::app::run(opts, std::cout, std::cerr);
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "fpl: cannot open output '" << out_path << "'\n";
    return fpl::app::kConfigError;
  }
  return fpl::app::run(opts, out, std::cerr);
}
