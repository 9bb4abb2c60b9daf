// Batch driver: one JSON config, one experiment, one output directory.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "fatkpp/config.hpp"
#include "fatkpp/errors.hpp"
#include "fatkpp/experiments.hpp"

namespace {

int exit_code(fatkpp::ErrorKind kind) {
  using fatkpp::ErrorKind;
  switch (kind) {
    case ErrorKind::IoError: return 4;
    case ErrorKind::BoundaryContamination:
    case ErrorKind::StabilityViolation:
    case ErrorKind::CFLViolation:
    case ErrorKind::GradientOutOfRange:
    case ErrorKind::NoConvergence:
    case ErrorKind::OutOfDomain:
    case ErrorKind::DomainError: return 3;
    default: return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal Fisher-KPP experiments with fat-tailed kernels"};
  std::string config_path;
  std::string out_dir;
  bool quiet = false;
  app.add_option("--config", config_path, "JSON experiment config")->required();
  app.add_option("--out", out_dir, "output directory (overrides output.directory)");
  app.add_flag("--quiet", quiet, "no progress messages");
  CLI11_PARSE(app, argc, argv);

  try {
    fatkpp::RunConfig cfg = fatkpp::parse_config(config_path);
    if (!out_dir.empty()) cfg.output.directory = out_dir;
    fatkpp::ProgressFn progress;
    if (!quiet) progress = [](const std::string& msg) { std::cerr << "[fatkpp] " << msg << '\n'; };
    const auto result = fatkpp::run_experiment(cfg, cfg.output.directory, progress);
    if (!quiet) {
      for (const auto& [name, value] : result.metrics) {
        std::printf("%-32s %.10g\n", name.c_str(), value);
      }
      std::printf("wrote %zu files to %s\n", result.files.size(), result.directory.c_str());
    }
    return 0;
  } catch (const fatkpp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
