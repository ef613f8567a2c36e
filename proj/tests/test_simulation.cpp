#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fods/presets.hpp>
#include <fods/random.hpp>
#include <fods/simulation.hpp>

using namespace fods;

namespace {

std::vector<VectorX<double>> zero_inputs(int K, Eigen::Index p = 1) {
  return std::vector<VectorX<double>>(size_t(K), VectorX<double>::Zero(p));
}

std::vector<VectorX<double>> random_inputs(Rng& rng, int K, Eigen::Index p, double scale) {
  std::vector<VectorX<double>> u;
  u.reserve(size_t(K));
  for (int k = 0; k < K; ++k) u.push_back(rng.vector(p, -scale, scale));
  return u;
}

}  // namespace

TEST_CASE("scalar free response follows the hand-unrolled recursion") {
  const auto model = scalar_model();
  VectorX<double> x0(1);
  x0 << 1.0;
  const auto traj = simulate(model, x0, zero_inputs(3));
  REQUIRE(traj.states.size() == 4);
  CHECK(traj.states[0](0) == 1.0);
  CHECK(traj.states[1](0) == 0.5);     // A_0 x0
  CHECK(traj.states[2](0) == 0.375);   // 0.5*0.5 + 0.125*1
  CHECK(traj.states[3](0) == 0.3125);  // 0.5*0.375 + 0.125*0.5 + 0.0625*1

  SUBCASE("outputs are C x and inputs are echoed") {
    REQUIRE(traj.outputs.size() == 4);
    for (int k = 0; k < 4; ++k) CHECK(traj.outputs[size_t(k)](0) == traj.states[size_t(k)](0));
    CHECK(traj.inputs.size() == 3);
  }
}

TEST_CASE("zero initial state and zero input stay exactly at zero") {
  const auto model = eeg_model();
  const auto traj = simulate(model, VectorX<double>::Zero(4), zero_inputs(50));
  for (const auto& x : traj.states) CHECK(x.norm() == 0.0);
}

TEST_CASE("integer orders reduce to the standard linear recursion") {
  Rng rng(7);
  const MatrixX<double> A = rng.matrix(4, 4, -0.3, 0.3);
  const MatrixX<double> B = rng.matrix(4, 2, -1.0, 1.0);
  SystemModel<double> model(A, B, MatrixX<double>::Identity(4, 4),
                            FractionalOrders<double>(VectorX<double>::Ones(4)));
  const VectorX<double> x0 = rng.vector(4, -1.0, 1.0);
  const auto inputs = random_inputs(rng, 200, 2, 1.0);

  const auto traj = simulate(model, x0, inputs);
  const MatrixX<double> Aplus = A + MatrixX<double>::Identity(4, 4);
  VectorX<double> x = x0;
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    x = Aplus * x + B * inputs[size_t(k)];
    worst = std::max(worst, (traj.states[size_t(k) + 1] - x).template lpNorm<Eigen::Infinity>());
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("superposition: response splits into free and forced parts") {
  const auto model = eeg_model();
  Rng rng(21);
  const VectorX<double> x0 = rng.vector(4, -1.0, 1.0);
  const auto inputs = random_inputs(rng, 60, 1, 1.0);

  const auto full = simulate(model, x0, inputs);
  const auto free = simulate(model, x0, zero_inputs(60));
  const auto forced = simulate(model, VectorX<double>::Zero(4), inputs);
  for (size_t k = 0; k < full.states.size(); ++k) {
    const VectorX<double> sum = free.states[k] + forced.states[k];
    CHECK((full.states[k] - sum).template lpNorm<Eigen::Infinity>() <= 1e-10);
  }
}

TEST_CASE("propagators satisfy the unrolled recursion") {
  const auto model = eeg_model();
  const auto table = build_coefficient_table(model, 10);
  const auto set = propagators(table, 10);
  REQUIRE(set.g.size() == 11);
  CHECK((set.g[0] - MatrixX<double>::Identity(4, 4)).norm() == 0.0);
  CHECK((set.g[1] - table.memory_matrix(0)).norm() == 0.0);
  const MatrixX<double> g2 =
      table.memory_matrix(0) * table.memory_matrix(0) + table.memory_matrix(1);
  CHECK((set.g[2] - g2).norm() <= 1e-15);

  SUBCASE("scalar propagators equal the free response exactly") {
    const auto scalar = scalar_model();
    const auto sset = propagators(scalar, 6);
    VectorX<double> x0(1);
    x0 << 1.0;
    const auto traj = simulate(scalar, x0, zero_inputs(6));
    for (int k = 0; k <= 6; ++k) CHECK(sset.g[size_t(k)](0, 0) == traj.states[size_t(k)](0));
  }
}

TEST_CASE("closed form matches the recursive simulation") {
  const auto model = eeg_model();
  Rng rng(5);
  const VectorX<double> x0 = rng.vector(4, -0.5, 0.5);
  const auto inputs = random_inputs(rng, 40, 1, 0.5);
  const auto traj = simulate(model, x0, inputs);
  const auto set = propagators(model, 40);
  for (int k = 0; k <= 40; ++k) {
    const VectorX<double> closed = closed_form_state(model, set, x0, inputs, k);
    const double rel = (closed - traj.states[size_t(k)]).norm() /
                       std::max(1.0, traj.states[size_t(k)].norm());
    CHECK(rel <= 1e-9);
  }

  SUBCASE("step zero returns the initial state for any inputs") {
    CHECK((closed_form_state(model, set, x0, inputs, 0) - x0).norm() == 0.0);
  }

  SUBCASE("single impulse reproduces the propagator column") {
    auto impulse = zero_inputs(10);
    impulse[0](0) = 1.0;
    for (int k = 1; k <= 10; ++k) {
      const VectorX<double> got =
          closed_form_state(model, set, VectorX<double>::Zero(4), impulse, k);
      CHECK((got - set.g[size_t(k) - 1] * model.B.col(0)).norm() <= 1e-12);
    }
  }
}

TEST_CASE("memory window truncates the recursion tail") {
  const auto model = scalar_model();
  VectorX<double> x0(1);
  x0 << 1.0;

  SUBCASE("window of one keeps only the lag-zero term") {
    const auto table = build_coefficient_table(model, 5);
    const auto traj = simulate(model, table, x0, zero_inputs(5), /*window=*/1);
    double x = 1.0;
    for (int k = 1; k <= 5; ++k) {
      x *= 0.5;  // x[k+1] = A_0 x[k]
      CHECK(traj.states[size_t(k)](0) == x);
    }
  }

  SUBCASE("window covering the horizon changes nothing") {
    const auto full = simulate(model, x0, zero_inputs(20));
    const auto table = build_coefficient_table(model, 19);
    const auto windowed = simulate(model, table, x0, zero_inputs(20), /*window=*/20);
    for (size_t k = 0; k < full.states.size(); ++k)
      CHECK(windowed.states[k](0) == full.states[k](0));
  }
}

TEST_CASE("divergent recursions raise a numeric error with the step index") {
  MatrixX<double> A(1, 1);
  A << 3.0;
  VectorX<double> alpha(1);
  alpha << 0.5;
  SystemModel<double> model(A, MatrixX<double>::Ones(1, 1), MatrixX<double>::Ones(1, 1),
                            FractionalOrders<double>(alpha));
  VectorX<double> x0(1);
  x0 << 1.0;
  CHECK_THROWS_AS(simulate(model, x0, zero_inputs(700)), NumericError);
}

TEST_CASE("dimension mismatches are rejected up front") {
  const auto model = eeg_model();
  CHECK_THROWS_AS(simulate(model, VectorX<double>::Zero(3), zero_inputs(2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate(model, VectorX<double>::Zero(4), zero_inputs(2, 2)),
                  std::invalid_argument);
  const auto set = propagators(model, 3);
  CHECK_THROWS_AS(closed_form_state(model, set, VectorX<double>::Zero(4), zero_inputs(2), 3),
                  std::invalid_argument);

  SUBCASE("short table horizons are caught") {
    const auto table = build_coefficient_table(model, 3);
    CHECK_THROWS_AS(simulate(model, table, VectorX<double>::Zero(4), zero_inputs(10)),
                    std::invalid_argument);
  }
}

TEST_CASE("simulation is generic over the scalar type") {
  const auto model = scalar_model<float>();
  VectorX<float> x0(1);
  x0 << 1.0f;
  const auto traj =
      simulate(model, x0, std::vector<VectorX<float>>(3, VectorX<float>::Zero(1)));
  CHECK(traj.states[2](0) == doctest::Approx(0.375f));
}
