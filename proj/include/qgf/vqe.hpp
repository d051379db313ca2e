#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qgf/measurement.hpp"
#include "qgf/pauli.hpp"
#include "qgf/statevector.hpp"

namespace qgf {

struct AnsatzParameters {
  double theta1 = 0.0;
  double phi1 = 0.0;
  double theta2 = 0.0;
  double phi2 = 0.0;

  std::array<double, 4> as_array() const { return {theta1, phi1, theta2, phi2}; }
  static AnsatzParameters from_array(const std::array<double, 4>& v) {
    return {v[0], v[1], v[2], v[3]};
  }
  friend bool operator==(const AnsatzParameters&, const AnsatzParameters&) = default;
};

/// Four-qubit ground-state ansatz: X on 0 and 2, A(theta1, phi1) on (0, 1),
/// A(theta2, phi2) on (2, 3), then CNOT 1->2 and CNOT 1->3.
Circuit build_ansatz(const AnsatzParameters& p);

/// A(theta, phi) on (q0, q1) from CNOTs and single-qubit rotations, with
/// R = Ry(theta + pi/2) Rz(phi + pi):
///   CNOT(q0->q1), R on q0, CNOT(q1->q0), R^dagger on q0, CNOT(q0->q1).
/// Equal to Gate::a(q0, q1, theta, phi) up to a global phase.
Circuit a_gate_decomposition(int n_qubits, int q0, int q1, double theta, double phi);

enum class EnergyMode { exact, sampled };
enum class OptimizerKind { simplex, spsa };

std::string to_string(EnergyMode m);
std::string to_string(OptimizerKind k);
EnergyMode parse_energy_mode(std::string_view s);
OptimizerKind parse_optimizer(std::string_view s);

/// Hamiltonian plus its measurement groups, built once.
class EnergyModel {
 public:
  explicit EnergyModel(PauliSum h, GroupingRule rule = GroupingRule::qubit_wise);

  const PauliSum& hamiltonian() const { return h_; }
  const std::vector<MeasurementGroup>& groups() const { return groups_; }

  double exact(const AnsatzParameters& p) const;
  Estimate sampled(const AnsatzParameters& p, const SamplingOptions& options,
                   std::uint64_t seed) const;

 private:
  PauliSum h_;
  std::vector<MeasurementGroup> groups_;
};

struct VqeOptions {
  EnergyMode mode = EnergyMode::exact;
  OptimizerKind optimizer = OptimizerKind::simplex;
  int max_iter = 500;
  int n_restarts = 10;
  std::uint64_t seed = 0;
  SamplingOptions sampling{};

  double simplex_step = 0.5;         // initial simplex edge, radians
  double simplex_tolerance = 1e-10;  // stop once the simplex size falls below

  double spsa_c = 0.1;
  double spsa_alpha = 0.602;
  double spsa_gamma = 0.101;
  double spsa_first_step = 0.3;  // target magnitude of the first move, radians
  int spsa_calibration_samples = 25;

  /// Exact mode only: closed-form coordinate sweeps after the optimizer,
  /// which pin the angles to machine precision. Zero disables.
  int polish_sweeps = 200;

  void validate() const;
};

struct VqeTraceRow {
  int iteration = 0;
  double energy = 0.0;     // measured (exact in exact mode)
  double std_error = 0.0;  // zero in exact mode
  AnsatzParameters params{};
  double theoretical = 0.0;
  double fidelity = 0.0;  // NaN without a reference state
};

struct VqeRun {
  int restart = 0;
  AnsatzParameters initial{};
  AnsatzParameters params{};
  double energy = 0.0;  // final estimate used for ranking restarts
  double std_error = 0.0;
  double theoretical = 0.0;
  int iterations = 0;
  int polish_sweeps = 0;
  bool converged = false;
  std::vector<VqeTraceRow> trace;
};

struct VqeResult {
  std::vector<VqeRun> runs;
  std::size_t best = 0;

  const VqeRun& best_run() const { return runs.at(best); }
};

/// Best of `n_restarts` independent optimizations, ranked by the final
/// estimated energy. Restart r starts from angles uniform in [-pi, pi) drawn
/// from derive_seed(seed, {r, 0}). When `reference` is given, every trace row
/// carries the fidelity of its parameters against it.
VqeResult minimize(const EnergyModel& model, const VqeOptions& options,
                   const std::optional<StateVector>& reference = std::nullopt);

}  // namespace qgf
