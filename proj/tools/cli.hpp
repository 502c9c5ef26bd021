#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "trajopt/kernel_checks.hpp"
#include "trajopt/problem.hpp"

namespace trajopt::cli {

// Stable process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitInfeasible = 2,
  kExitKernelFailure = 3,
};

inline constexpr std::size_t kMinCompareSeeds = 20;

struct RunManifest {
  std::string command;  // plan | compare-pso | kernels
  std::filesystem::path config;
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<SyncMode> sync_mode;
  double dt = 0.01;
  std::size_t seeds = kMinCompareSeeds;
  std::size_t threads = 1;
};

int run(int argc, char** argv, std::ostream& out, std::ostream& err);

// trajectory.csv, times.json, convergence.csv
int cmd_plan(const RunManifest& manifest, std::ostream& out, std::ostream& err);

// compare.csv, compare_history.csv, summary.json
int cmd_compare_pso(const RunManifest& manifest, std::ostream& out, std::ostream& err);

// Prints a pass/fail table; kExitKernelFailure if any check failed.
int cmd_kernels(const std::vector<kernels::KernelCheckResult>& results, std::ostream& out);

// %.17g, independent of the global locale.
std::string format_double(double value);

// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Worker count: hardware concurrency, capped by TRAJOPT_THREADS when set.
std::size_t worker_threads();

}  // namespace trajopt::cli
