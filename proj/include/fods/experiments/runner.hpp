// Scenario execution: drives the core library per an ExperimentSpec and
// writes the CSV/SVG artifacts.
#pragma once

#include "fods/experiments/config.hpp"
#include "fods/experiments/csv.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fods::experiments {

// Input sequence u[0..K-1] for the plant-driving scenarios. `seed` matters
// only for random inputs; identical arguments give identical sequences.
std::vector<VectorX<double>> build_inputs(const InputSpec& spec, int K, Eigen::Index input_dim,
                                          std::uint64_t seed);

// Column names for one signal block: plain `base` when width is 1, otherwise
// base1..baseN. The trace schema and SVG channel selection share these names.
std::vector<std::string> signal_names(const std::string& base, Eigen::Index width);

// Runs the scenario, writes its artifacts under spec.output.directory
// (created if missing), and returns the written paths in a fixed order.
std::vector<std::string> run_experiment(const ExperimentSpec& spec);

}  // namespace fods::experiments
