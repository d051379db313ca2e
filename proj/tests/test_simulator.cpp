#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "qgf/errors.hpp"
#include "qgf/exactdiag.hpp"
#include "qgf/measurement.hpp"
#include "qgf/statevector.hpp"
#include "qgf/vqe.hpp"
#include "test_util.hpp"

using namespace qgf;
using qgf::testing::max_abs;
using qgf::testing::random_fermion;
using qgf::testing::random_state;

namespace {

constexpr double kPi = std::numbers::pi;

// Dense unitary of a circuit, column j = circuit applied to |j>.
Eigen::MatrixXcd circuit_unitary(const Circuit& c) {
  const std::uint32_t dim = 1u << c.n_qubits();
  Eigen::MatrixXcd u(dim, dim);
  for (std::uint32_t j = 0; j < dim; ++j) {
    u.col(j) = run_circuit(c, StateVector::basis_state(c.n_qubits(), j)).amplitudes();
  }
  return u;
}

// Converged ansatz angles for the U=3, t=1 dimer.
AnsatzParameters converged_parameters() {
  VqeOptions o;
  o.n_restarts = 2;
  const EnergyModel model(jordan_wigner(build_hubbard(2, 1.0, 3.0), 4));
  return minimize(model, o).best_run().params;
}

}  // namespace

TEST(Simulator, XFlipsLeftmostQubit) {
  const StateVector s = run_circuit(Circuit(4).add(Gate::x(0)));
  EXPECT_EQ(std::abs(s.amplitude(bitstring_to_index("1000"))), 1.0);
  EXPECT_EQ(index_to_bitstring(8, 4), "1000");
}

TEST(Simulator, AGateAtZeroAngles) {
  const StateVector s01 = run_circuit(Circuit(2).add(Gate::a(0, 1, 0.0, 0.0)),
                                      StateVector::from_bitstring("01"));
  EXPECT_NEAR(std::abs(s01.amplitude(1) - Complex(1.0, 0.0)), 0.0, 1e-15);
  const StateVector s10 = run_circuit(Circuit(2).add(Gate::a(0, 1, 0.0, 0.0)),
                                      StateVector::from_bitstring("10"));
  EXPECT_NEAR(std::abs(s10.amplitude(2) - Complex(-1.0, 0.0)), 0.0, 1e-15);
}

TEST(Simulator, AGateIsUnitaryAndConservesHammingWeight) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  for (int i = 0; i < 1000; ++i) {
    const Gate g = Gate::a(0, 1, angle(rng), angle(rng));
    const Eigen::MatrixXcd m = g.matrix();
    EXPECT_LT(max_abs(m * m.adjoint() - Eigen::MatrixXcd::Identity(4, 4)), 1e-14);
    for (std::uint32_t b = 0; b < 4; ++b) {
      for (std::uint32_t r = 0; r < 4; ++r) {
        if (std::popcount(r) != std::popcount(b)) {
          EXPECT_EQ(m(r, b), Complex(0.0, 0.0));
        }
      }
    }
  }
}

TEST(Simulator, GatesPreserveNorm) {
  std::mt19937_64 rng(32);
  StateVector s = random_state(rng, 4);
  const Gate gates[] = {Gate::x(1),       Gate::h(2),        Gate::s(3),
                        Gate::sdg(0),     Gate::ry(1, 0.3),  Gate::rz(2, -1.1),
                        Gate::cnot(3, 0), Gate::a(2, 1, 0.7, 0.2)};
  for (int i = 0; i < 200; ++i) {
    apply_gate(s, gates[i % 8]);
    EXPECT_NEAR(s.norm(), 1.0, 1e-10);
  }
}

TEST(Simulator, CircuitValidation) {
  Circuit c(2);
  EXPECT_THROW(c.add(Gate::x(2)), DimensionError);
  EXPECT_THROW(c.add(Gate::cnot(1, 1)), ValidationError);
  EXPECT_THROW(run_circuit(c, StateVector(3)), DimensionError);
  EXPECT_THROW(StateVector(1, Eigen::VectorXcd::Ones(2)), ValidationError);
}

TEST(Simulator, InverseCircuitUndoes) {
  std::mt19937_64 rng(33);
  Circuit c(3);
  c.add(Gate::h(0)).add(Gate::a(0, 2, 0.4, 1.3)).add(Gate::s(1)).add(Gate::cnot(1, 2));
  c.add(Gate::ry(2, 0.9)).add(Gate::rz(0, -0.2)).add(Gate::sdg(2));
  const StateVector s = random_state(rng, 3);
  EXPECT_NEAR(fidelity(run_circuit(c.inverse(), run_circuit(c, s)), s), 1.0, 1e-12);
}

TEST(Simulator, ExactExpectationExamples) {
  EXPECT_EQ(exact_expectation(StateVector(1), PauliSum::term(PauliString("Z"))), 1.0);
  const StateVector plus = run_circuit(Circuit(1).add(Gate::h(0)));
  EXPECT_NEAR(exact_expectation(plus, PauliSum::term(PauliString("X"))), 1.0, 1e-15);
  EXPECT_THROW(exact_expectation(plus, PauliSum::term(PauliString("X"), Complex{0.0, 1.0})),
               ValidationError);
}

TEST(Simulator, ExactTransitionExamples) {
  EXPECT_EQ(exact_transition(StateVector(1), PauliSum::term(PauliString("X"))), Complex(0.0, 0.0));
  const StateVector plus = run_circuit(Circuit(1).add(Gate::h(0)));
  EXPECT_NEAR(std::abs(exact_transition(plus, PauliSum::term(PauliString("X"))) - 1.0), 0.0,
              1e-15);
}

TEST(Simulator, TransitionOfExcitationProductMatchesDense) {
  const FermionOperator h = build_hubbard(2, 1.0, 3.0);
  const GroundState g = exact_ground_state(h);
  const FermionOperator op = FermionOperator::annihilation(4, 3) * FermionOperator::creation(4, 1) *
                             FermionOperator::creation(4, 2);
  const Complex dense = g.state.amplitudes().dot(dense_matrix(op, 4) * g.state.amplitudes());
  EXPECT_LT(std::abs(exact_transition(g.state, jordan_wigner(op, 4)) - dense), 1e-10);
}

TEST(Simulator, OracleAndSimulatorAgreeOnRandomCircuits) {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  for (int trial = 0; trial < 50; ++trial) {
    Circuit c(4);
    for (int k = 0; k < 12; ++k) {
      const int q = static_cast<int>(rng() % 4);
      const int r = (q + 1 + static_cast<int>(rng() % 3)) % 4;
      switch (rng() % 4) {
        case 0: c.add(Gate::h(q)); break;
        case 1: c.add(Gate::ry(q, angle(rng))); break;
        case 2: c.add(Gate::cnot(q, r)); break;
        default: c.add(Gate::a(q, r, angle(rng), angle(rng)));
      }
    }
    const StateVector s = run_circuit(c);
    const FermionOperator op = random_fermion(rng, 4);
    const Complex dense = s.amplitudes().dot(dense_matrix(op, 4) * s.amplitudes());
    EXPECT_LT(std::abs(exact_transition(s, jordan_wigner(op, 4)) - dense), 1e-10);
  }
}

TEST(Simulator, FidelityExamples) {
  std::mt19937_64 rng(35);
  const StateVector s = random_state(rng, 3);
  EXPECT_NEAR(fidelity(s, s), 1.0, 1e-14);
  EXPECT_EQ(fidelity(StateVector::from_bitstring("0"), StateVector::from_bitstring("1")), 0.0);
  EXPECT_THROW(fidelity(StateVector(1), StateVector(2)), DimensionError);
}

TEST(Sampling, DeterministicOutcomeHasZeroError) {
  const PauliSum z = PauliSum::term(PauliString("Z"));
  const auto groups = measurement_groups(z);
  const Estimate e = sampled_expectation(Circuit(1), z, 100, 7, groups);
  EXPECT_EQ(e.value, 1.0);
  EXPECT_EQ(e.std_error, 0.0);
}

TEST(Sampling, HubbardEnergyNeedsThreeCircuits) {
  const EnergyModel model(jordan_wigner(build_hubbard(2, 1.0, 3.0), 4));
  EXPECT_EQ(model.groups().size(), 3u);
  EXPECT_EQ(model.sampled(AnsatzParameters{0.3, 0.1, -0.2, 0.5}, SamplingOptions{}, 1).circuits,
            3u);
}

TEST(Sampling, RejectsBadInput) {
  const PauliSum z = PauliSum::term(PauliString("Z"));
  EXPECT_THROW(sampled_expectation(Circuit(1), z, 100, 7, {}), ValidationError);
  EXPECT_THROW(sampled_expectation(Circuit(1), z, 0, 7, measurement_groups(z)), ValidationError);
  const PauliSum x = PauliSum::term(PauliString("X"));
  EXPECT_THROW(sampled_expectation(Circuit(1), x, 10, 7, measurement_groups(z)), ValidationError);
}

TEST(Sampling, ConvergedEnergyWithinThreeSigma) {
  const PauliSum h = jordan_wigner(build_hubbard(2, 1.0, 3.0), 4);
  const auto groups = measurement_groups(h);
  const Circuit c = build_ansatz(converged_parameters());
  int inside = 0;
  const int trials = 200;
  for (int seed = 0; seed < trials; ++seed) {
    const Estimate e = sampled_expectation(c, h, 8192, static_cast<std::uint64_t>(seed), groups);
    if (std::abs(e.value + 1.0) <= 3.0 * e.std_error) ++inside;
  }
  EXPECT_GE(inside, 198);
}

TEST(Sampling, StandardErrorFollowsInverseSquareRoot) {
  const PauliSum h = jordan_wigner(build_hubbard(2, 1.0, 3.0), 4);
  const auto groups = measurement_groups(h);
  const Circuit c = build_ansatz(AnsatzParameters{0.4, 0.2, -0.7, 1.0});
  const double exact = exact_expectation(run_circuit(c), h);
  std::vector<double> x, y;
  for (std::uint64_t shots : {100u, 1000u, 10000u, 100000u}) {
    double mse = 0.0;
    const int reps = 60;
    for (int r = 0; r < reps; ++r) {
      const double d = sampled_expectation(c, h, shots, 1000 + r, groups).value - exact;
      mse += d * d;
    }
    x.push_back(std::log(double(shots)));
    y.push_back(0.5 * std::log(mse / reps));
  }
  const double slope = (y.back() - y.front()) / (x.back() - x.front());
  EXPECT_NEAR(slope, -0.5, 0.1);
}

TEST(Sampling, SeededRunsAreReproducible) {
  std::mt19937_64 rng(36);
  const StateVector s = random_state(rng, 4);
  EXPECT_EQ(sample_counts(s, 5000, 9), sample_counts(s, 5000, 9));
  EXPECT_NE(sample_counts(s, 5000, 9), sample_counts(s, 5000, 10));
}

TEST(Sampling, CountsTableRoundTrip) {
  std::mt19937_64 rng(37);
  const CountsTable t = sample_counts(random_state(rng, 3), 1000, 4);
  EXPECT_EQ(CountsTable::parse(t.to_string()), t);
  std::uint64_t total = 0;
  for (auto n : t.counts()) total += n;
  EXPECT_EQ(total, 1000u);
}

TEST(Readout, ZeroProbabilitiesLeaveCountsUnchanged) {
  std::mt19937_64 rng(38);
  const CountsTable t = sample_counts(random_state(rng, 4), 2000, 5);
  EXPECT_EQ(apply_readout_error(t, 0.0, 0.0, 1).counts(), t.counts());
}

TEST(Readout, CertainFlipsInvertEveryBit) {
  const CountsTable t = sample_counts(StateVector(4), 500, 5);
  const CountsTable f = apply_readout_error(t, 1.0, 1.0, 1);
  EXPECT_EQ(f.count("1111"), 500u);
}

TEST(Readout, AllZeroFractionMatchesBinomial) {
  const std::uint64_t shots = 100000;
  const CountsTable f = apply_readout_error(sample_counts(StateVector(4), shots, 5), 0.02, 0.02, 6);
  const double p = std::pow(0.98, 4);
  const double sigma = std::sqrt(p * (1 - p) / shots);
  EXPECT_NEAR(double(f.count("0000")) / shots, p, 3 * sigma);
}

TEST(Readout, RejectsInvalidProbabilities) {
  const CountsTable t = sample_counts(StateVector(1), 10, 5);
  EXPECT_THROW(apply_readout_error(t, -0.1, 0.0, 1), ValidationError);
  EXPECT_THROW(apply_readout_error(t, 0.0, 1.5, 1), ValidationError);
}

TEST(Mitigation, IdentityCalibrationReturnsFrequencies) {
  std::mt19937_64 rng(39);
  const CountsTable t = sample_counts(random_state(rng, 3), 3000, 5);
  EXPECT_LT((mitigate_readout(t, Eigen::MatrixXd::Identity(8, 8)) - t.frequencies()).norm(), 1e-14);
}

TEST(Mitigation, TensorCalibrationIsColumnStochastic) {
  const Eigen::MatrixXd c = tensor_calibration(4, 0.02, 0.05);
  EXPECT_LT((c.colwise().sum().array() - 1.0).abs().maxCoeff(), 1e-14);
}

TEST(Mitigation, RoundTripRecoversAllZeros) {
  const std::uint64_t shots = 100000;
  const CountsTable noisy =
      apply_readout_error(sample_counts(StateVector(4), shots, 5), 0.02, 0.02, 6);
  const Eigen::VectorXd p = mitigate_readout(noisy, tensor_calibration(4, 0.02, 0.02));
  EXPECT_NEAR(p.sum(), 1.0, 1e-9);
  EXPECT_NEAR(p[0], 1.0, 0.01);
  EXPECT_GT(double(noisy.count("0000")) / shots, 0.9);
  EXPECT_LT(double(noisy.count("0000")) / shots, 0.95);
}

TEST(Mitigation, RejectsBadCalibrations) {
  const CountsTable t = sample_counts(StateVector(1), 10, 5);
  Eigen::MatrixXd bad(2, 2);
  bad << 0.9, 0.1, 0.2, 0.8;
  EXPECT_THROW(mitigate_readout(t, bad), ValidationError);
  Eigen::MatrixXd singular(2, 2);
  singular << 0.5, 0.5, 0.5, 0.5;
  EXPECT_THROW(mitigate_readout(t, singular), NumericalError);
}

TEST(Mitigation, MitigatedEnergyRemovesReadoutBias) {
  const PauliSum h = jordan_wigner(build_hubbard(2, 1.0, 3.0), 4);
  const auto groups = measurement_groups(h);
  const StateVector s = run_circuit(build_ansatz(converged_parameters()));
  SamplingOptions noisy;
  noisy.shots = 200000;
  noisy.noise = ReadoutNoise{0.03, 0.05};
  SamplingOptions mitigated = noisy;
  mitigated.calibration = empirical_calibration(4, noisy.noise, 200000, 77);
  const Estimate raw = sampled_expectation(s, h, noisy, 3, groups);
  const Estimate fixed = sampled_expectation(s, h, mitigated, 3, groups);
  EXPECT_GT(std::abs(raw.value + 1.0), 0.05);
  EXPECT_LT(std::abs(fixed.value + 1.0), 5.0 * fixed.std_error + 0.01);
}

TEST(Clifford, ConjugationMatchesDenseAlgebra) {
  const Gate gates[] = {Gate::x(0), Gate::h(1), Gate::s(0), Gate::sdg(1), Gate::cnot(0, 1),
                        Gate::cnot(1, 0)};
  const char* letters = "IXYZ";
  for (const Gate& g : gates) {
    const Eigen::MatrixXcd u = circuit_unitary(Circuit(2).add(g));
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        const PauliString p(std::string{letters[a], letters[b]});
        const auto [sign, img] = conjugate_pauli(g, 1, p);
        const Eigen::MatrixXcd lhs = u * to_dense(PauliSum::term(p)) * u.adjoint();
        EXPECT_LT(max_abs(lhs - double(sign) * to_dense(PauliSum::term(img))), 1e-14);
      }
    }
  }
}

TEST(Clifford, GeneralGroupsAreDiagonalized) {
  std::mt19937_64 rng(40);
  std::uniform_int_distribution<int> letter(0, 3);
  int built = 0;
  while (built < 100) {
    std::vector<PauliString> members;
    for (int k = 0; k < 30 && members.size() < 5; ++k) {
      std::string l;
      for (int q = 0; q < 4; ++q) l += "IXYZ"[letter(rng)];
      const PauliString p(l);
      bool ok = std::find(members.begin(), members.end(), p) == members.end();
      for (const auto& m : members) ok = ok && commutes(m, p);
      if (ok) members.push_back(p);
    }
    const MeasurementGroup g = MeasurementGroup::build(members, GroupingRule::general);
    const Eigen::MatrixXcd u = circuit_unitary(g.basis_change);
    for (std::size_t k = 0; k < members.size(); ++k) {
      const Eigen::MatrixXcd img = u * to_dense(PauliSum::term(members[k])) * u.adjoint();
      const Eigen::MatrixXcd z = to_dense(PauliSum::term(PauliString::from_masks(4, 0, g.z_masks[k])));
      EXPECT_LT(max_abs(img - double(g.signs[k]) * z), 1e-12);
    }
    ++built;
  }
}

TEST(Clifford, GroupsRejectNonCommutingMembers) {
  EXPECT_THROW(MeasurementGroup::build({PauliString("XI"), PauliString("ZI")}, GroupingRule::general),
               ValidationError);
  EXPECT_THROW(
      MeasurementGroup::build({PauliString("XX"), PauliString("YY")}, GroupingRule::qubit_wise),
      ValidationError);
}

TEST(Clifford, GeneralGroupingSamplesTheSameEnergy) {
  const PauliSum h = jordan_wigner(build_hubbard(2, 1.0, 3.0), 4);
  const auto general = measurement_groups(h, GroupingRule::general);
  EXPECT_EQ(general.size(), 2u);
  const Circuit c = build_ansatz(AnsatzParameters{0.4, 0.2, -0.7, 1.0});
  const double exact = exact_expectation(run_circuit(c), h);
  const Estimate e = sampled_expectation(c, h, 200000, 5, general);
  EXPECT_NEAR(e.value, exact, 5 * e.std_error);
}
