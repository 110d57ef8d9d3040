#pragma once

#include <optional>
#include <string>
#include <vector>

#include "agres/io.hpp"

namespace CLI {
class App;
}

namespace agres::cli {

/// Fully resolved run configuration. Every field is echoed in the manifest.
struct RunConfig {
  std::string command;
  std::string lambda = "1/4";
  std::string lambda2 = "3/8";  // second parameter for `hausdorff`
  std::string target = "1/sqrt8";
  double s = 0.5;
  int level = 3;
  std::string n = "4..10";
  std::optional<double> alpha;
  std::string pairs;
  std::string measure = "hausdorff";
  double eigen_tol = 1e-12;
  double bisect_tol = 1e-10;
  int max_iters = 10000;
  int depth = 8;   // hausdorff cloud depth
  int guard = 12;  // largest boundary set `relations` will enumerate
  int relation_depth = 1;
  double gap = 1e-2;
  bool gamma = false;
  bool grid = false;
  std::string out = "out";
  int threads = 1;
};

const std::vector<std::string>& commands();

/// Every violation names the offending field and constraint. Empty iff the
/// configuration can be dispatched.
std::vector<std::string> validate(const RunConfig& cfg);

/// Registers flags, config file support and subcommands, all writing into cfg.
void configure(CLI::App& app, RunConfig& cfg);

Json manifest_json(const RunConfig& cfg, const std::vector<std::string>& outputs);

/// Dispatches a validated configuration. Returns the process exit code.
int run(const RunConfig& cfg);

/// Parses argv, validates, dispatches, and maps failures to exit codes with a
/// JSON error object on stderr.
int main(int argc, char** argv);

}  // namespace agres::cli
