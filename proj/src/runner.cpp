#include "fods/experiments/runner.hpp"

#include "fods/experiments/svg.hpp"
#include "fods/fods.hpp"

#include <filesystem>
#include <fstream>

namespace fods::experiments {

namespace {

namespace fsys = std::filesystem;

VectorX<double> initial_state(const ExperimentSpec& spec, Eigen::Index n) {
  if (spec.x0.size()) {
    if (spec.x0.size() != n)
      throw ConfigError("x0 has " + std::to_string(spec.x0.size()) + " entries for a " +
                        std::to_string(n) + "-state model");
    return spec.x0;
  }
  // Regulation scenarios start at rest; the others need something to observe.
  return spec.scenario == Scenario::Mpc ? VectorX<double>(VectorX<double>::Zero(n))
                                        : VectorX<double>(VectorX<double>::Ones(n));
}

VectorX<double> initial_estimate(const ExperimentSpec& spec, Eigen::Index n) {
  if (spec.xhat0.size()) {
    if (spec.xhat0.size() != n)
      throw ConfigError("xhat0 has " + std::to_string(spec.xhat0.size()) + " entries for a " +
                        std::to_string(n) + "-state model");
    return spec.xhat0;
  }
  return VectorX<double>::Zero(n);
}

ObserverGains<double> resolve_observer(const GainSpec& g, const SystemModel<double>& model,
                                       const CoefficientTable<double>& table) {
  const Eigen::Index n = model.state_dim(), q = model.output_dim();
  switch (g.kind) {
    case GainKind::Zero:
      return ObserverGains<double>({MatrixX<double>::Zero(n, q)});
    case GainKind::Designed:
      return ObserverGains<double>({design_observer_gain(table, model.C, g.target_radius)});
    case GainKind::Explicit:
      for (size_t i = 0; i < g.gains.size(); ++i)
        if (g.gains[i].rows() != n || g.gains[i].cols() != q)
          throw ConfigError("observer.gains[" + std::to_string(i) + "] must be " +
                            std::to_string(n) + "x" + std::to_string(q) + ", got " +
                            std::to_string(g.gains[i].rows()) + "x" +
                            std::to_string(g.gains[i].cols()));
      return ObserverGains<double>(g.gains);
  }
  throw std::invalid_argument("resolve_observer: unhandled gain kind");
}

FeedbackGains<double> resolve_feedback(const GainSpec& g, const SystemModel<double>& model,
                                       const CoefficientTable<double>& table) {
  const Eigen::Index n = model.state_dim(), p = model.input_dim();
  switch (g.kind) {
    case GainKind::Zero:
      return FeedbackGains<double>({MatrixX<double>::Zero(p, n)});
    case GainKind::Designed:
      return FeedbackGains<double>({design_feedback_gain(table, model.B, g.target_radius)});
    case GainKind::Explicit:
      for (size_t i = 0; i < g.gains.size(); ++i)
        if (g.gains[i].rows() != p || g.gains[i].cols() != n)
          throw ConfigError("feedback.gains[" + std::to_string(i) + "] must be " +
                            std::to_string(p) + "x" + std::to_string(n) + ", got " +
                            std::to_string(g.gains[i].rows()) + "x" +
                            std::to_string(g.gains[i].cols()));
      return FeedbackGains<double>(g.gains);
  }
  throw std::invalid_argument("resolve_feedback: unhandled gain kind");
}

struct SignalBlock {
  std::string base;
  const std::vector<VectorX<double>>* samples;  // may be one short of the row count (inputs)
  Eigen::Index width;
};

// One row per step k = 0..K with columns k, t, then the signal blocks.
// Blocks shorter than the row count (inputs stop at K-1) pad the tail with 0.
Table make_trace(double fs, size_t row_count, const std::vector<SignalBlock>& blocks) {
  Table t;
  t.columns = {"k", "t"};
  for (const auto& b : blocks)
    for (auto& name : signal_names(b.base, b.width)) t.columns.push_back(std::move(name));
  t.rows.reserve(row_count);
  for (size_t k = 0; k < row_count; ++k) {
    std::vector<double> row;
    row.reserve(t.columns.size());
    row.push_back(double(k));
    row.push_back(double(k) / fs);
    for (const auto& b : blocks) {
      if (k < b.samples->size()) {
        const VectorX<double>& v = (*b.samples)[k];
        for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(v(i));
      } else {
        for (Eigen::Index i = 0; i < b.width; ++i) row.push_back(0.0);
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string prepare_directory(const std::string& dir) {
  try {
    fsys::create_directories(fsys::path(dir));
  } catch (const fsys::filesystem_error& e) {
    throw IoError("cannot create output directory " + dir + ": " + e.what());
  }
  return dir;
}

std::string join(const std::string& dir, const char* name) {
  return (fsys::path(dir) / name).string();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open " + path + " for writing");
  file << text;
  if (!file.flush()) throw IoError("write failed for " + path);
}

std::vector<std::string> default_channels(const ExperimentSpec& spec,
                                          const SystemModel<double>& model) {
  std::vector<std::string> ch = signal_names("x", model.state_dim());
  switch (spec.scenario) {
    case Scenario::Observe:
    case Scenario::ClosedLoop:
      for (auto& name : signal_names("xhat", model.state_dim())) ch.push_back(std::move(name));
      break;
    case Scenario::Mpc:
      ch.push_back(signal_names("ref", model.state_dim()).front());
      break;
    default:
      break;
  }
  return ch;
}

// Emits trace.csv (+ trace.svg when requested) and returns the paths.
std::vector<std::string> emit_trace(const ExperimentSpec& spec, const SystemModel<double>& model,
                                    const std::string& dir, const Table& trace) {
  std::vector<std::string> artifacts;
  const std::string csv_path = join(dir, "trace.csv");
  write_csv(csv_path, trace);
  artifacts.push_back(csv_path);
  if (spec.output.svg) {
    const auto channels =
        spec.output.channels.empty() ? default_channels(spec, model) : spec.output.channels;
    artifacts.push_back(render_svg(csv_path, channels));
  }
  return artifacts;
}

std::vector<std::string> run_simulate(const ExperimentSpec& spec, const SystemModel<double>& model,
                                      const std::string& dir) {
  const int K = spec.horizon;
  const auto table = build_coefficient_table(model, K > 0 ? K - 1 : 0);
  const auto inputs = build_inputs(spec.input, K, model.input_dim(), spec.seed);
  const auto traj = simulate(model, table, initial_state(spec, model.state_dim()), inputs);
  const Table trace = make_trace(
      spec.mpc.sample_rate, traj.states.size(),
      {{"x", &traj.states, model.state_dim()},
       {"u", &traj.inputs, model.input_dim()},
       {"y", &traj.outputs, model.output_dim()}});
  return emit_trace(spec, model, dir, trace);
}

std::vector<std::string> run_observe(const ExperimentSpec& spec, const SystemModel<double>& model,
                                     const std::string& dir) {
  const int K = spec.horizon;
  const auto table = build_coefficient_table(model, K > 0 ? K - 1 : 0);
  const auto inputs = build_inputs(spec.input, K, model.input_dim(), spec.seed);
  const auto traj = simulate(model, table, initial_state(spec, model.state_dim()), inputs);
  const auto ogains = resolve_observer(spec.observer, model, table);

  EstimateHistory<double> est;
  est.append(model.C, initial_estimate(spec, model.state_dim()));
  for (int k = 0; k < K; ++k) {
    VectorX<double> next;
    if (ogains.gains.size() == 1) {
      next = observer_step(model, table, ogains, est, inputs[size_t(k)], traj.outputs[size_t(k)]);
    } else {
      const std::vector<VectorX<double>> u_hist(inputs.begin(), inputs.begin() + k + 1);
      const std::vector<VectorX<double>> y_hist(traj.outputs.begin(),
                                                traj.outputs.begin() + k + 1);
      next = observer_step_memory(model, table, ogains, est, u_hist, y_hist);
    }
    est.append(model.C, std::move(next));
  }

  const Table trace = make_trace(
      spec.mpc.sample_rate, traj.states.size(),
      {{"x", &traj.states, model.state_dim()},
       {"xhat", &est.estimates, model.state_dim()},
       {"u", &traj.inputs, model.input_dim()},
       {"y", &traj.outputs, model.output_dim()}});
  return emit_trace(spec, model, dir, trace);
}

std::vector<std::string> run_closedloop(const ExperimentSpec& spec,
                                        const SystemModel<double>& model,
                                        const std::string& dir) {
  const int K = spec.horizon;
  const auto table = build_coefficient_table(model, K > 0 ? K - 1 : 0);
  const auto fgains = resolve_feedback(spec.feedback, model, table);
  const auto ogains = resolve_observer(spec.observer, model, table);
  const auto trace_data =
      closed_loop_simulate(model, table, fgains, ogains, initial_state(spec, model.state_dim()),
                           initial_estimate(spec, model.state_dim()), K);
  const Table trace = make_trace(
      spec.mpc.sample_rate, trace_data.states.size(),
      {{"x", &trace_data.states, model.state_dim()},
       {"xhat", &trace_data.estimates, model.state_dim()},
       {"u", &trace_data.inputs, model.input_dim()},
       {"y", &trace_data.outputs, model.output_dim()}});
  return emit_trace(spec, model, dir, trace);
}

std::vector<std::string> run_mpc(const ExperimentSpec& spec, const SystemModel<double>& model,
                                 const std::string& dir) {
  const int K = spec.horizon;
  const Eigen::Index n = model.state_dim();
  const int ref_steps = K + spec.mpc.prediction_horizon;

  ReferenceSignal<double> ref;
  if (spec.reference.kind == ReferenceKind::Square) {
    ref = square_wave_reference(spec.reference.frequency, spec.mpc.sample_rate,
                                spec.reference.amplitude, ref_steps, n);
  } else {
    ref.samples.assign(size_t(ref_steps) + 1, VectorX<double>::Zero(n));
  }

  const auto design_table = build_coefficient_table(model, 0);
  const auto ogains = resolve_observer(spec.observer, model, design_table);
  const auto result = run_mpc_closed_loop(model, spec.mpc, ogains, ref, K,
                                          initial_state(spec, n), initial_estimate(spec, n));

  const Table trace = make_trace(
      spec.mpc.sample_rate, result.trace.states.size(),
      {{"x", &result.trace.states, n},
       {"xhat", &result.trace.estimates, n},
       {"u", &result.trace.inputs, model.input_dim()},
       {"y", &result.trace.outputs, model.output_dim()},
       {"ref", &result.references, n}});
  auto artifacts = emit_trace(spec, model, dir, trace);

  Table solves;
  solves.columns = {"step", "cost", "cost_at_zero", "gradient_norm", "degenerate"};
  for (const auto& s : result.solves)
    solves.rows.push_back({double(s.step), s.cost, s.cost_at_zero, s.gradient_norm,
                           s.degenerate ? 1.0 : 0.0});
  const std::string solves_path = join(dir, "solves.csv");
  write_csv(solves_path, solves);
  artifacts.push_back(solves_path);
  return artifacts;
}

std::vector<std::string> run_verify_separation(const ExperimentSpec& spec,
                                               const SystemModel<double>& model,
                                               const std::string& dir) {
  const auto design_table = build_coefficient_table(model, 0);
  const auto fgains = resolve_feedback(spec.feedback, model, design_table);
  const auto ogains = resolve_observer(spec.observer, model, design_table);
  const auto report =
      verify_separation(model, fgains, ogains, spec.separation.block_order,
                        spec.separation.tolerance, spec.separation.memory_gain_blocks);

  const std::string text_path = join(dir, "separation.txt");
  const std::string csv_path = join(dir, "separation.csv");
  write_text_file(text_path, report.to_text());
  write_text_file(csv_path, report.to_csv());
  return {text_path, csv_path};
}

}  // namespace

std::vector<VectorX<double>> build_inputs(const InputSpec& spec, int K, Eigen::Index input_dim,
                                          std::uint64_t seed) {
  if (K < 0) throw std::invalid_argument("build_inputs: negative horizon");
  std::vector<VectorX<double>> inputs;
  inputs.reserve(size_t(K));
  switch (spec.kind) {
    case InputKind::Zero:
      inputs.assign(size_t(K), VectorX<double>::Zero(input_dim));
      break;
    case InputKind::Random: {
      Rng rng(seed);
      for (int k = 0; k < K; ++k)
        inputs.push_back(rng.vector(input_dim, -spec.scale, spec.scale));
      break;
    }
    case InputKind::Impulse:
      inputs.assign(size_t(K), VectorX<double>::Zero(input_dim));
      if (K > 0) inputs[0] = VectorX<double>::Constant(input_dim, spec.scale);
      break;
  }
  return inputs;
}

std::vector<std::string> signal_names(const std::string& base, Eigen::Index width) {
  std::vector<std::string> names;
  if (width == 1) {
    names.push_back(base);
  } else {
    for (Eigen::Index i = 1; i <= width; ++i) names.push_back(base + std::to_string(i));
  }
  return names;
}

std::vector<std::string> run_experiment(const ExperimentSpec& spec) {
  const SystemModel<double> model = spec.model.resolve();
  const std::string dir = prepare_directory(spec.output.directory);
  switch (spec.scenario) {
    case Scenario::Simulate: return run_simulate(spec, model, dir);
    case Scenario::Observe: return run_observe(spec, model, dir);
    case Scenario::ClosedLoop: return run_closedloop(spec, model, dir);
    case Scenario::Mpc: return run_mpc(spec, model, dir);
    case Scenario::VerifySeparation: return run_verify_separation(spec, model, dir);
  }
  throw std::invalid_argument("run_experiment: unhandled scenario");
}

}  // namespace fods::experiments
