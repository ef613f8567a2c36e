// Experiment configuration: JSON ingestion, validation, and scenario specs.
#pragma once

#include "fods/mpc.hpp"
#include "fods/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fods::experiments {

enum class Scenario { Simulate, Observe, ClosedLoop, Mpc, VerifySeparation };

std::string scenario_name(Scenario s);
Scenario scenario_from_name(const std::string& name);  // ConfigError on unknown names

// Either a named preset ("eeg" or "scalar") or inline matrices.
struct ModelSpec {
  std::string preset;  // empty when the matrices below are set inline
  MatrixX<double> A;
  VectorX<double> alpha;
  MatrixX<double> B;
  MatrixX<double> C;

  SystemModel<double> resolve() const;  // ConfigError on inconsistent dimensions
};

enum class InputKind { Zero, Random, Impulse };

struct InputSpec {
  InputKind kind = InputKind::Zero;
  double scale = 1.0;  // random amplitude bound, or impulse height
};

enum class GainKind { Zero, Designed, Explicit };

struct GainSpec {
  GainKind kind = GainKind::Designed;
  double target_radius = 0.5;            // Designed
  std::vector<MatrixX<double>> gains;    // Explicit
};

enum class ReferenceKind { Zero, Square };

struct ReferenceSpec {
  ReferenceKind kind = ReferenceKind::Square;
  double frequency = 8.0;  // Hz
  double amplitude = 1.0;
};

struct SeparationSpec {
  int block_order = 10;
  double tolerance = 1e-8;
  bool memory_gain_blocks = false;
};

struct OutputSpec {
  std::string directory = ".";
  bool svg = false;
  std::vector<std::string> channels;  // SVG channel selection; empty = scenario default
};

struct ExperimentSpec {
  Scenario scenario = Scenario::Simulate;
  bool scenario_explicit = false;  // true when the config file named the scenario
  ModelSpec model;
  int horizon = 160;
  std::uint64_t seed = 0;
  VectorX<double> x0;     // empty = scenario default (ones; zeros for mpc)
  VectorX<double> xhat0;  // empty = zeros
  InputSpec input;
  GainSpec observer;
  GainSpec feedback;
  MpcConfig<double> mpc;
  ReferenceSpec reference;
  SeparationSpec separation;
  OutputSpec output;

  void validate() const;  // ConfigError naming the offending field(s)
};

// Parses and validates a JSON config document. Throws ConfigError with line
// and column on syntax errors, and with the field path on semantic errors;
// unknown keys are rejected.
ExperimentSpec parse_config(const std::string& text);

// Reads `path` and delegates to parse_config. IoError when unreadable.
ExperimentSpec load_config(const std::string& path);

}  // namespace fods::experiments
