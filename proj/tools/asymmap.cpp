#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>
#include <spdlog/sinks/stdout_color_sinks.h>

#include "asymmap/commands.hpp"

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("asymmap");
  spdlog::set_default_logger(logger);
  const char* env = std::getenv("ASYMMAP_LOG");
  const std::string level = env ? env : "error";
  if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else {
    spdlog::set_level(spdlog::level::err);
    if (level != "error") spdlog::error("ASYMMAP_LOG='{}' not recognized; using 'error'", level);
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Replica-symmetric predictions for MAP recovery with asymmetric penalties"};
  app.require_subcommand(1);

  asymmap::CommandOptions opts;
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  std::string format;

  for (const char* name : {"predict", "sweep", "rt", "validate", "tune"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output file (default: output.path or stdout)");
    sub->add_option("--seed", seed, "master seed for simulation");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  }
  app.get_subcommand("predict")->description("solve the fixed point and report distortions");
  app.get_subcommand("sweep")->description("threshold compression rate over a c grid (CSV)");
  app.get_subcommand("rt")->description("threshold compression rate for one model");
  app.get_subcommand("validate")->description("finite-N Monte Carlo against the replica prediction");
  app.get_subcommand("tune")->description("lambda minimizing the replica mse");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : asymmap::kExitConfig;
  }

  auto* sub = app.get_subcommands().front();
  opts.command = sub->get_name();
  opts.config = config;
  if (!out.empty()) opts.out = out;
  if (sub->count("--seed") > 0) opts.seed = seed;
  if (!format.empty()) opts.format = format;
  opts.threads = threads;

  spdlog::info("{} --config {} (threads={})", opts.command, config, threads);
  const int code = asymmap::run_command(opts, std::cout, std::cerr);
  spdlog::info("{} finished with exit code {}", opts.command, code);
  return code;
}
