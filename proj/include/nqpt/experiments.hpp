#pragma once

#include "nqpt/config.hpp"
#include "nqpt/error.hpp"

#include <string>
#include <vector>

namespace nqpt {

// Runs one experiment and writes its CSV files into cfg.out. Returns the
// paths written, in order. Module failures propagate as Error.
std::vector<std::string> run(const ExperimentConfig& cfg);

// Distinct nonzero process status per error kind (10 + kind index).
int exit_code(ErrorKind kind);

// Couplings lo..hi inclusive, n points.
std::vector<double> linspace(double lo, double hi, int n);

} // namespace nqpt
