#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kornlab/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitHypothesisUnmet = 2;
constexpr int kExitUsage = 64;

struct CommandDoc {
  const char* name;
  const char* help;
};

constexpr CommandDoc kCommands[] = {
    {"seminorm", "projected and Gagliardo seminorms of a catalog field"},
    {"korn", "Korn ratio of a field, or a ratio-maximizing search"},
    {"extend-check", "empirical bound for the epigraph extension operator"},
    {"geom-check", "reflection comparability inequality and threshold scan"},
    {"solve", "minimize the coupled nonlocal p-Laplace energy on a grid"},
    {"caccioppoli", "energy localization diagnostic for a solved field"},
    {"dual-pair", "self-improvement diagnostic over the dual pair"},
    {"jbound", "kernel tail integral against the boundary distance"},
};

// The config file either is the params object itself or wraps it as
// {"command": ..., "params": {...}}; a wrapped command must match the
// subcommand actually invoked.
kornlab::experiment::json load_params(const std::string& path,
                                      const std::string& command) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw kornlab::experiment::UsageError("config: cannot read " + path);
  auto doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded())
    throw kornlab::experiment::UsageError("config: " + path +
                                          " is not valid JSON");
  if (!doc.is_object())
    throw kornlab::experiment::UsageError(
        "config: top level must be a JSON object");
  if (doc.contains("command")) {
    if (!doc["command"].is_string() ||
        doc["command"].get<std::string>() != command)
      throw kornlab::experiment::UsageError(
          "config: field 'command' does not match the invoked subcommand");
  }
  if (doc.contains("params")) {
    if (!doc["params"].is_object())
      throw kornlab::experiment::UsageError(
          "config: field 'params' must be a JSON object");
    return doc["params"];
  }
  doc.erase("command");
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kornlab " KORNLAB_VERSION
               ": empirical checks for fractional Korn inequalities, an "
               "epigraph extension operator, and a coupled nonlocal "
               "p-Laplace system"};
  app.require_subcommand(1);
  app.set_version_flag("--version", KORNLAB_VERSION);

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int threads = 1;
  app.add_option("--config", config_path,
                 "JSON file with parameters for the chosen command");
  app.add_option("--seed", seed, "base seed recorded in every output");
  app.add_option("--threads", threads,
                 "worker threads for parallel reductions")
      ->check(CLI::Range(1, 256));
  app.add_option("--out", out_dir, "directory for the report and CSV tables");

  for (const auto& doc : kCommands)
    app.add_subcommand(doc.name, doc.help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  kornlab::experiment::ExperimentConfig cfg;
  cfg.command = app.get_subcommands().front()->get_name();
  cfg.seed = seed;
  cfg.threads = threads;

  namespace fs = std::filesystem;
  fs::path report_path = fs::path(out_dir) / (cfg.command + ".json");
  try {
    if (!config_path.empty()) cfg.params = load_params(config_path, cfg.command);

    auto artifacts = kornlab::experiment::run(cfg);
    kornlab::report::write_text_file(
        report_path,
        kornlab::report::canonical_json(artifacts.report) + "\n");
    for (const auto& [name, table] : artifacts.tables) {
      fs::path csv_path =
          fs::path(out_dir) / (cfg.command + "_" + name + ".csv");
      kornlab::report::write_text_file(csv_path, table.serialize());
    }
    std::cout << cfg.command << ": ok, report at " << report_path.string()
              << "\n";
    return kExitOk;
  } catch (const kornlab::HypothesisUnmet& e) {
    auto results = kornlab::experiment::json::object();
    results["hypothesis_unmet"] = true;
    results["reason"] = e.what();
    auto report = kornlab::report::make_report(cfg.command, cfg.params, seed,
                                               threads, results);
    try {
      kornlab::report::write_text_file(
          report_path, kornlab::report::canonical_json(report) + "\n");
    } catch (const std::exception& io) {
      std::cerr << io.what() << "\n";
      return kExitFailure;
    }
    std::cerr << cfg.command << ": hypothesis unmet: " << e.what() << "\n";
    return kExitHypothesisUnmet;
  } catch (const kornlab::experiment::UsageError& e) {
    std::cerr << cfg.command << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const kornlab::DegenerateParameters& e) {
    std::cerr << cfg.command << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << cfg.command << ": " << e.what() << "\n";
    return kExitFailure;
  }
}
