#include "fods/experiments/config.hpp"

#include "fods/presets.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace fods::experiments {

using nlohmann::json;

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::Simulate: return "simulate";
    case Scenario::Observe: return "observe";
    case Scenario::ClosedLoop: return "closedloop";
    case Scenario::Mpc: return "mpc";
    case Scenario::VerifySeparation: return "verify-separation";
  }
  throw std::invalid_argument("scenario_name: unhandled scenario");
}

Scenario scenario_from_name(const std::string& name) {
  if (name == "simulate") return Scenario::Simulate;
  if (name == "observe") return Scenario::Observe;
  if (name == "closedloop") return Scenario::ClosedLoop;
  if (name == "mpc") return Scenario::Mpc;
  if (name == "verify-separation") return Scenario::VerifySeparation;
  throw ConfigError("unknown scenario \"" + name +
                    "\" (expected simulate, observe, closedloop, mpc, or verify-separation)");
}

SystemModel<double> ModelSpec::resolve() const {
  if (!preset.empty()) {
    if (A.size() || alpha.size() || B.size() || C.size())
      throw ConfigError("model.preset excludes inline matrices");
    if (preset == "eeg") return eeg_model<double>();
    if (preset == "scalar") return scalar_model<double>();
    throw ConfigError("unknown model preset \"" + preset + "\" (expected eeg or scalar)");
  }
  if (!A.size() || !alpha.size() || !B.size() || !C.size())
    throw ConfigError("model: need either a preset or all of A, alpha, B, C");
  try {
    return SystemModel<double>(A, B, C, FractionalOrders<double>(alpha));
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

void ExperimentSpec::validate() const {
  if (horizon < 1) throw ConfigError("horizon must be at least 1, got " + std::to_string(horizon));
  if (!(input.scale >= 0.0))
    throw ConfigError("input.scale must be >= 0, got " + detail::g17(input.scale));
  if (!(observer.target_radius >= 0.0))
    throw ConfigError("observer.target_radius must be >= 0, got " +
                      detail::g17(observer.target_radius));
  if (!(feedback.target_radius >= 0.0))
    throw ConfigError("feedback.target_radius must be >= 0, got " +
                      detail::g17(feedback.target_radius));
  if (observer.kind == GainKind::Explicit && observer.gains.empty())
    throw ConfigError("observer.gains: explicit gain list is empty");
  if (feedback.kind == GainKind::Explicit && feedback.gains.empty())
    throw ConfigError("feedback.gains: explicit gain list is empty");
  try {
    mpc.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("mpc: ") + e.what());
  }
  if (!(reference.frequency > 0.0))
    throw ConfigError("reference.frequency must be positive, got " +
                      detail::g17(reference.frequency));
  if (separation.block_order < 1)
    throw ConfigError("separation.block_order must be at least 1, got " +
                      std::to_string(separation.block_order));
  if (!(separation.tolerance > 0.0))
    throw ConfigError("separation.tolerance must be positive, got " +
                      detail::g17(separation.tolerance));
  if (output.directory.empty()) throw ConfigError("output.directory must not be empty");
  model.resolve();  // surfaces model errors at load time
}

namespace {

// --- typed field access with path-qualified errors -------------------------

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config field " + path + ": " + what);
}

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

VectorX<double> as_vector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of numbers");
  VectorX<double> v(j.size());
  for (size_t i = 0; i < j.size(); ++i)
    v(Eigen::Index(i)) = as_number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

MatrixX<double> as_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
  const size_t rows = j.size();
  size_t cols = 0;
  MatrixX<double> m;
  for (size_t r = 0; r < rows; ++r) {
    const std::string row_path = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].empty()) fail(row_path, "expected a non-empty array of numbers");
    if (r == 0) {
      cols = j[r].size();
      m.resize(Eigen::Index(rows), Eigen::Index(cols));
    } else if (j[r].size() != cols) {
      fail(row_path, "row has " + std::to_string(j[r].size()) + " entries, expected " +
                         std::to_string(cols));
    }
    for (size_t c = 0; c < cols; ++c)
      m(Eigen::Index(r), Eigen::Index(c)) =
          as_number(j[r][c], row_path + "[" + std::to_string(c) + "]");
  }
  return m;
}

std::vector<MatrixX<double>> as_matrix_list(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of matrices");
  std::vector<MatrixX<double>> out;
  out.reserve(j.size());
  for (size_t i = 0; i < j.size(); ++i)
    out.push_back(as_matrix(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

void reject_unknown_keys(const json& j, const std::string& prefix,
                         std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) { known = true; break; }
    if (!known)
      throw ConfigError("unknown config key \"" + (prefix.empty() ? item.key() : prefix + "." + item.key()) + "\"");
  }
}

ModelSpec parse_model(const json& j) {
  expect_object(j, "model");
  reject_unknown_keys(j, "model", {"preset", "A", "alpha", "B", "C"});
  ModelSpec spec;
  if (j.contains("preset")) spec.preset = as_string(j["preset"], "model.preset");
  if (j.contains("A")) spec.A = as_matrix(j["A"], "model.A");
  if (j.contains("alpha")) spec.alpha = as_vector(j["alpha"], "model.alpha");
  if (j.contains("B")) spec.B = as_matrix(j["B"], "model.B");
  if (j.contains("C")) spec.C = as_matrix(j["C"], "model.C");
  return spec;
}

InputSpec parse_input(const json& j) {
  expect_object(j, "input");
  reject_unknown_keys(j, "input", {"kind", "scale"});
  InputSpec spec;
  if (j.contains("kind")) {
    const std::string kind = as_string(j["kind"], "input.kind");
    if (kind == "zero") spec.kind = InputKind::Zero;
    else if (kind == "random") spec.kind = InputKind::Random;
    else if (kind == "impulse") spec.kind = InputKind::Impulse;
    else fail("input.kind", "unknown kind \"" + kind + "\" (expected zero, random, or impulse)");
  }
  if (j.contains("scale")) spec.scale = as_number(j["scale"], "input.scale");
  return spec;
}

GainSpec parse_gains(const json& j, const std::string& path) {
  expect_object(j, path);
  reject_unknown_keys(j, path, {"kind", "target_radius", "gains"});
  GainSpec spec;
  if (j.contains("kind")) {
    const std::string kind = as_string(j["kind"], path + ".kind");
    if (kind == "zero") spec.kind = GainKind::Zero;
    else if (kind == "designed") spec.kind = GainKind::Designed;
    else if (kind == "explicit") spec.kind = GainKind::Explicit;
    else fail(path + ".kind", "unknown kind \"" + kind + "\" (expected zero, designed, or explicit)");
  }
  if (j.contains("target_radius"))
    spec.target_radius = as_number(j["target_radius"], path + ".target_radius");
  if (j.contains("gains")) spec.gains = as_matrix_list(j["gains"], path + ".gains");
  if (spec.kind == GainKind::Explicit && spec.gains.empty())
    fail(path + ".gains", "kind \"explicit\" needs a gains list");
  return spec;
}

MpcConfig<double> parse_mpc(const json& j) {
  expect_object(j, "mpc");
  reject_unknown_keys(j, "mpc", {"prediction_horizon", "control_horizon", "mvar_order",
                                 "regularization", "sample_rate"});
  MpcConfig<double> cfg;
  if (j.contains("prediction_horizon"))
    cfg.prediction_horizon = as_int(j["prediction_horizon"], "mpc.prediction_horizon");
  if (j.contains("control_horizon"))
    cfg.control_horizon = as_int(j["control_horizon"], "mpc.control_horizon");
  if (j.contains("mvar_order")) cfg.mvar_order = as_int(j["mvar_order"], "mpc.mvar_order");
  if (j.contains("regularization"))
    cfg.regularization = as_number(j["regularization"], "mpc.regularization");
  if (j.contains("sample_rate")) cfg.sample_rate = as_number(j["sample_rate"], "mpc.sample_rate");
  if (cfg.control_horizon > cfg.prediction_horizon)
    throw ConfigError("mpc.control_horizon (" + std::to_string(cfg.control_horizon) +
                      ") exceeds mpc.prediction_horizon (" +
                      std::to_string(cfg.prediction_horizon) + ")");
  return cfg;
}

ReferenceSpec parse_reference(const json& j) {
  expect_object(j, "reference");
  reject_unknown_keys(j, "reference", {"kind", "frequency", "amplitude"});
  ReferenceSpec spec;
  if (j.contains("kind")) {
    const std::string kind = as_string(j["kind"], "reference.kind");
    if (kind == "zero") spec.kind = ReferenceKind::Zero;
    else if (kind == "square") spec.kind = ReferenceKind::Square;
    else fail("reference.kind", "unknown kind \"" + kind + "\" (expected zero or square)");
  }
  if (j.contains("frequency")) spec.frequency = as_number(j["frequency"], "reference.frequency");
  if (j.contains("amplitude")) spec.amplitude = as_number(j["amplitude"], "reference.amplitude");
  return spec;
}

SeparationSpec parse_separation(const json& j) {
  expect_object(j, "separation");
  reject_unknown_keys(j, "separation", {"block_order", "tolerance", "memory_gain_blocks"});
  SeparationSpec spec;
  if (j.contains("block_order")) spec.block_order = as_int(j["block_order"], "separation.block_order");
  if (j.contains("tolerance")) spec.tolerance = as_number(j["tolerance"], "separation.tolerance");
  if (j.contains("memory_gain_blocks"))
    spec.memory_gain_blocks = as_bool(j["memory_gain_blocks"], "separation.memory_gain_blocks");
  return spec;
}

OutputSpec parse_output(const json& j) {
  expect_object(j, "output");
  reject_unknown_keys(j, "output", {"directory", "svg", "channels"});
  OutputSpec spec;
  if (j.contains("directory")) spec.directory = as_string(j["directory"], "output.directory");
  if (j.contains("svg")) spec.svg = as_bool(j["svg"], "output.svg");
  if (j.contains("channels")) {
    const json& ch = j["channels"];
    if (!ch.is_array()) fail("output.channels", "expected an array of column names");
    for (size_t i = 0; i < ch.size(); ++i)
      spec.channels.push_back(as_string(ch[i], "output.channels[" + std::to_string(i) + "]"));
  }
  return spec;
}

// Line/column of a byte offset in `text`, both 1-based.
std::pair<size_t, size_t> line_column(const std::string& text, size_t byte) {
  size_t line = 1, col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') { ++line; col = 1; }
    else ++col;
  }
  return {line, col};
}

}  // namespace

ExperimentSpec parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError("config parse error at line " + std::to_string(line) + ", column " +
                      std::to_string(col) + ": " + e.what());
  }
  expect_object(root, "(top level)");
  reject_unknown_keys(root, "", {"scenario", "model", "horizon", "seed", "x0", "xhat0", "input",
                                 "observer", "feedback", "mpc", "reference", "separation",
                                 "output"});
  ExperimentSpec spec;
  if (root.contains("scenario")) {
    spec.scenario = scenario_from_name(as_string(root["scenario"], "scenario"));
    spec.scenario_explicit = true;
  }
  if (root.contains("model")) spec.model = parse_model(root["model"]);
  if (root.contains("horizon")) spec.horizon = as_int(root["horizon"], "horizon");
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) fail("seed", "expected a non-negative integer");
    spec.seed = root["seed"].get<std::uint64_t>();
  }
  if (root.contains("x0")) spec.x0 = as_vector(root["x0"], "x0");
  if (root.contains("xhat0")) spec.xhat0 = as_vector(root["xhat0"], "xhat0");
  if (root.contains("input")) spec.input = parse_input(root["input"]);
  if (root.contains("observer")) spec.observer = parse_gains(root["observer"], "observer");
  if (root.contains("feedback")) spec.feedback = parse_gains(root["feedback"], "feedback");
  if (root.contains("mpc")) spec.mpc = parse_mpc(root["mpc"]);
  if (root.contains("reference")) spec.reference = parse_reference(root["reference"]);
  if (root.contains("separation")) spec.separation = parse_separation(root["separation"]);
  if (root.contains("output")) spec.output = parse_output(root["output"]);
  spec.validate();
  return spec;
}

ExperimentSpec load_config(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open config " + path);
  std::ostringstream buffer;
  buffer << file.rdbuf();
  try {
    return parse_config(buffer.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace fods::experiments
