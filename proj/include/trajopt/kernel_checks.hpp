#pragma once

#include <string>
#include <vector>

namespace trajopt::kernels {

struct KernelCheckResult {
  std::string name;
  std::string reported;  // value(s) the kernel produced
  bool passed = false;
};

// Evaluates the reference examples for every kernel formula.
std::vector<KernelCheckResult> run_kernel_checks();

}  // namespace trajopt::kernels
