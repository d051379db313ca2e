#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "qgf/errors.hpp"
#include "qgf/exactdiag.hpp"
#include "qgf/vqe.hpp"
#include "test_util.hpp"

using namespace qgf;
using qgf::testing::max_abs;

namespace {

constexpr double kPi = std::numbers::pi;

const FermionOperator& hubbard() {
  static const FermionOperator h = build_hubbard(2, 1.0, 3.0);
  return h;
}

const EnergyModel& model() {
  static const EnergyModel m(jordan_wigner(hubbard(), 4));
  return m;
}

AnsatzParameters random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-kPi, kPi);
  return {u(rng), u(rng), u(rng), u(rng)};
}

// Columns are the circuit applied to each basis state.
Eigen::MatrixXcd unitary_of(const Circuit& c) {
  const int dim = 1 << c.n_qubits();
  Eigen::MatrixXcd u(dim, dim);
  for (int j = 0; j < dim; ++j) {
    u.col(j) = run_circuit(c, StateVector::basis_state(c.n_qubits(), j)).amplitudes();
  }
  return u;
}

}  // namespace

TEST(Ansatz, GateSequence) {
  const Circuit c = build_ansatz({0.1, 0.2, 0.3, 0.4});
  ASSERT_EQ(c.size(), 6u);
  const auto& g = c.gates();
  EXPECT_EQ(g[0].kind, GateKind::x);
  EXPECT_EQ(g[0].qubits[0], 0);
  EXPECT_EQ(g[1].kind, GateKind::x);
  EXPECT_EQ(g[1].qubits[0], 2);
  EXPECT_EQ(g[2].kind, GateKind::a);
  EXPECT_EQ(g[2].qubits, (std::array<int, 2>{0, 1}));
  EXPECT_DOUBLE_EQ(g[2].theta, 0.1);
  EXPECT_DOUBLE_EQ(g[2].phi, 0.2);
  EXPECT_EQ(g[3].qubits, (std::array<int, 2>{2, 3}));
  EXPECT_EQ(g[4].kind, GateKind::cnot);
  EXPECT_EQ(g[4].qubits, (std::array<int, 2>{1, 2}));
  EXPECT_EQ(g[5].qubits, (std::array<int, 2>{1, 3}));
}

TEST(Ansatz, ConservesParticleNumberAndSpinWithExactZeros) {
  const Eigen::MatrixXcd n = number_operator(4);
  const Eigen::MatrixXcd sz = sz_operator(ModeLabeling{2});
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 1000; ++trial) {
    const StateVector s = run_circuit(build_ansatz(random_params(rng)));
    for (std::uint32_t i = 0; i < 16; ++i) {
      const bool in_sector =
          std::abs(n(i, i).real() - 2.0) < 1e-12 && std::abs(sz(i, i).real()) < 1e-12;
      if (!in_sector) {
        ASSERT_EQ(s.amplitude(i), Complex(0.0, 0.0)) << "index " << i;
      }
    }
    const Eigen::VectorXcd& v = s.amplitudes();
    EXPECT_NEAR(v.dot(n * v).real(), 2.0, 1e-12);
    EXPECT_NEAR(v.dot(sz * v).real(), 0.0, 1e-12);
  }
}

TEST(Ansatz, ZeroAnglesGiveBasisStateUpToSign) {
  const StateVector s = run_circuit(build_ansatz({}));
  int nonzero = 0;
  for (std::uint32_t i = 0; i < 16; ++i) {
    const Complex a = s.amplitude(i);
    if (std::abs(a) > 1e-14) {
      ++nonzero;
      EXPECT_NEAR(std::abs(a.real()), 1.0, 1e-14);
      EXPECT_NEAR(a.imag(), 0.0, 1e-14);
    }
  }
  EXPECT_EQ(nonzero, 1);
}

TEST(Ansatz, AGateDecompositionMatchesUpToGlobalPhase) {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int trial = 0; trial < 100; ++trial) {
    const double theta = u(rng), phi = u(rng);
    Circuit direct(2);
    direct.add(Gate::a(0, 1, theta, phi));
    const Eigen::MatrixXcd d = unitary_of(a_gate_decomposition(2, 0, 1, theta, phi));
    const Eigen::MatrixXcd a = unitary_of(direct);
    Eigen::Index r = 0, col = 0;
    a.cwiseAbs().maxCoeff(&r, &col);
    const Complex phase = d(r, col) / a(r, col);
    EXPECT_NEAR(std::abs(phase), 1.0, 1e-12);
    EXPECT_LT(max_abs(d - phase * a), 1e-12);
  }
}

TEST(Energy, VariationalBoundHolds) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 500; ++trial) {
    EXPECT_GE(model().exact(random_params(rng)), -1.0 - 1e-9);
  }
}

TEST(Energy, ModelUsesThreeGroups) { EXPECT_EQ(model().groups().size(), 3u); }

TEST(Energy, SampledIsDeterministicPerSeed) {
  const AnsatzParameters p{0.3, -0.2, 1.1, 0.5};
  SamplingOptions opt;
  opt.shots = 2048;
  const Estimate a = model().sampled(p, opt, 5);
  const Estimate b = model().sampled(p, opt, 5);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_EQ(a.circuits, 3u);
}

TEST(Vqe, ExactSimplexReachesGroundStateWithUnitFidelity) {
  const GroundState g = exact_ground_state(hubbard());
  VqeOptions opt;
  opt.seed = 3;
  const VqeResult r = minimize(model(), opt, g.state);
  ASSERT_EQ(r.runs.size(), 10u);
  const VqeRun& best = r.best_run();
  EXPECT_NEAR(best.energy, -1.0, 1e-9);
  EXPECT_GE(fidelity(run_circuit(build_ansatz(best.params)), g.state), 1.0 - 1e-6);
  for (const VqeRun& run : r.runs) EXPECT_GE(run.energy, best.energy);
}

TEST(Vqe, SimplexBestSoFarIsMonotone) {
  VqeOptions opt;
  opt.n_restarts = 3;
  opt.seed = 4;
  for (const VqeRun& run : minimize(model(), opt).runs) {
    ASSERT_FALSE(run.trace.empty());
    for (std::size_t i = 1; i < run.trace.size(); ++i) {
      EXPECT_EQ(run.trace[i].iteration, run.trace[i - 1].iteration + 1);
      EXPECT_LE(run.trace[i].energy, run.trace[i - 1].energy);
    }
  }
}

TEST(Vqe, TraceWithoutReferenceHasNaNFidelity) {
  VqeOptions opt;
  opt.n_restarts = 1;
  opt.max_iter = 5;
  const VqeRun& run = minimize(model(), opt).best_run();
  EXPECT_TRUE(std::isnan(run.trace.front().fidelity));
  EXPECT_DOUBLE_EQ(run.trace.front().std_error, 0.0);
}

TEST(Vqe, FixedSeedGivesIdenticalTraces) {
  for (EnergyMode mode : {EnergyMode::exact, EnergyMode::sampled}) {
    VqeOptions opt;
    opt.mode = mode;
    opt.optimizer = mode == EnergyMode::exact ? OptimizerKind::simplex : OptimizerKind::spsa;
    opt.n_restarts = 2;
    opt.max_iter = 40;
    opt.sampling.shots = 512;
    opt.seed = 7;
    const VqeResult a = minimize(model(), opt);
    const VqeResult b = minimize(model(), opt);
    ASSERT_EQ(a.runs.size(), b.runs.size());
    for (std::size_t r = 0; r < a.runs.size(); ++r) {
      EXPECT_EQ(a.runs[r].params, b.runs[r].params);
      EXPECT_EQ(a.runs[r].energy, b.runs[r].energy);
      ASSERT_EQ(a.runs[r].trace.size(), b.runs[r].trace.size());
      for (std::size_t i = 0; i < a.runs[r].trace.size(); ++i) {
        EXPECT_EQ(a.runs[r].trace[i].energy, b.runs[r].trace[i].energy);
        EXPECT_EQ(a.runs[r].trace[i].params, b.runs[r].trace[i].params);
      }
    }
    opt.seed = 8;
    EXPECT_NE(minimize(model(), opt).runs[0].initial, a.runs[0].initial);
  }
}

TEST(Vqe, SpsaDisplacementDecays) {
  VqeOptions opt;
  opt.mode = EnergyMode::sampled;
  opt.optimizer = OptimizerKind::spsa;
  opt.n_restarts = 1;
  opt.max_iter = 400;
  opt.sampling.shots = 1024;
  opt.seed = 9;
  const VqeRun& run = minimize(model(), opt).best_run();
  ASSERT_EQ(run.trace.size(), 400u);
  auto mean_step = [&run](std::size_t from, std::size_t to) {
    double sum = 0.0;
    for (std::size_t i = from; i < to; ++i) {
      const auto x = run.trace[i].params.as_array(), y = run.trace[i + 1].params.as_array();
      double d = 0.0;
      for (std::size_t j = 0; j < 4; ++j) d += (x[j] - y[j]) * (x[j] - y[j]);
      sum += std::sqrt(d);
    }
    return sum / static_cast<double>(to - from);
  };
  const double early = mean_step(0, 40), late = mean_step(358, 398);
  EXPECT_LT(late, 0.5 * early);
  EXPECT_GT(late, 0.0);
}

TEST(Vqe, PolishPinsAnglesToMachinePrecision) {
  const GroundState g = exact_ground_state(hubbard());
  VqeOptions opt;
  opt.n_restarts = 1;
  opt.max_iter = 60;  // stop the simplex well before convergence
  opt.seed = 11;
  const VqeRun unpolished = [&] {
    VqeOptions o = opt;
    o.polish_sweeps = 0;
    return minimize(model(), o).best_run();
  }();
  const VqeRun polished = minimize(model(), opt).best_run();
  EXPECT_EQ(unpolished.polish_sweeps, 0);
  EXPECT_GT(polished.polish_sweeps, 0);
  EXPECT_LE(polished.energy, unpolished.energy);
  EXPECT_NEAR(polished.energy, -1.0, 1e-12);
  EXPECT_GE(fidelity(run_circuit(build_ansatz(polished.params)), g.state), 1.0 - 1e-12);
}

TEST(Vqe, RejectsInvalidOptions) {
  VqeOptions opt;
  opt.max_iter = 0;
  EXPECT_THROW(minimize(model(), opt), ValidationError);
  opt = {};
  opt.n_restarts = 0;
  EXPECT_THROW(minimize(model(), opt), ValidationError);
  opt = {};
  opt.polish_sweeps = -1;
  EXPECT_THROW(opt.validate(), ValidationError);
  EXPECT_THROW(parse_optimizer("cobyla"), ValidationError);
  EXPECT_EQ(parse_energy_mode("sampled"), EnergyMode::sampled);
  EXPECT_THROW(EnergyModel(PauliSum(3)), DimensionError);
}
