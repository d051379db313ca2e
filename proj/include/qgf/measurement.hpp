#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qgf/pauli.hpp"
#include "qgf/statevector.hpp"

namespace qgf {

/// Shot histogram over computational basis states, indexed like StateVector.
class CountsTable {
 public:
  CountsTable(int n_qubits, std::uint64_t seed);

  int n_qubits() const { return n_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t total_shots() const { return total_; }
  std::uint64_t count(std::uint32_t index) const { return counts_.at(index); }
  std::uint64_t count(std::string_view bits) const;
  const std::vector<std::uint64_t>& counts() const { return counts_; }

  void add(std::uint32_t index, std::uint64_t n = 1);

  /// Empirical frequencies; all zero when no shots are recorded.
  Eigen::VectorXd frequencies() const;

  /// "# qubits=<n> shots=<total> seed=<seed>" then one "<bitstring> <count>"
  /// line per nonzero entry in index order.
  std::string to_string() const;
  static CountsTable parse(std::string_view text);

  friend bool operator==(const CountsTable&, const CountsTable&) = default;

 private:
  int n_;
  std::uint64_t seed_;
  std::uint64_t total_ = 0;
  std::vector<std::uint64_t> counts_;
};

/// Uniform double in [0, 1) from 53 random bits; identical on every platform.
double unit_uniform(std::uint64_t bits);

/// Draws `shots` outcomes from |amplitude|^2 by inverse CDF.
CountsTable sample_counts(const StateVector& s, std::uint64_t shots, std::uint64_t seed);

/// Independent per-bit flips: 0 -> 1 with p01, 1 -> 0 with p10.
struct ReadoutNoise {
  double p01 = 0.0;
  double p10 = 0.0;

  bool active() const { return p01 > 0.0 || p10 > 0.0; }
  void validate() const;
};

CountsTable apply_readout_error(const CountsTable& counts, double p01, double p10,
                                std::uint64_t seed);

/// C[measured][prepared] for independent identical bit flips on every qubit.
Eigen::MatrixXd tensor_calibration(int n_qubits, double p01, double p10);

/// Calibration estimated by preparing each basis state and measuring it
/// through the noisy readout `shots` times.
Eigen::MatrixXd empirical_calibration(int n_qubits, const ReadoutNoise& noise,
                                      std::uint64_t shots, std::uint64_t seed);

/// Solves calibration * p = frequencies by LU. The result is a
/// quasi-probability vector: entries may be slightly negative, the sum is 1.
Eigen::VectorXd mitigate_readout(const CountsTable& counts, const Eigen::MatrixXd& calibration);

/// A set of commuting strings with a basis change that maps each member to a
/// signed Z-string: G P_k G^dagger = sign_k * Z(z_masks[k]).
struct MeasurementGroup {
  std::vector<PauliString> members;
  Circuit basis_change;
  std::vector<int> signs;
  std::vector<std::uint32_t> z_masks;

  static MeasurementGroup build(std::vector<PauliString> members, GroupingRule rule);
  int n_qubits() const { return basis_change.n_qubits(); }
};

/// Image of a signed Pauli string under conjugation by a Clifford gate.
/// Only X, H, S, Sdg and CNOT are accepted.
std::pair<int, PauliString> conjugate_pauli(const Gate& g, int sign, const PauliString& p);

std::vector<MeasurementGroup> measurement_groups(const PauliSum& h,
                                                 GroupingRule rule = GroupingRule::qubit_wise);

struct SamplingOptions {
  std::uint64_t shots = 8192;
  ReadoutNoise noise{};
  /// Mitigation matrix; left empty, raw frequencies are used.
  Eigen::MatrixXd calibration;
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t circuits = 0;  // sampled circuits consumed
};

/// Energy-style estimate of Hermitian h from `c` applied to |0...0>.
/// Each group is sampled once; std_error is the plug-in binomial variance per
/// string, propagated through the coefficients with covariances ignored.
Estimate sampled_expectation(const Circuit& c, const PauliSum& h, std::uint64_t shots,
                             std::uint64_t seed, const std::vector<MeasurementGroup>& groups);
Estimate sampled_expectation(const StateVector& state, const PauliSum& h,
                             const SamplingOptions& options, std::uint64_t seed,
                             const std::vector<MeasurementGroup>& groups);

struct ComplexEstimate {
  Complex value{};
  double std_error_re = 0.0;
  double std_error_im = 0.0;
  double std_error() const { return std::hypot(std_error_re, std_error_im); }
};

/// Measured distributions for a fixed set of groups over repeated
/// realizations. Any operator whose strings lie in the groups can be
/// estimated afterwards without further sampling.
///
/// Within a group the per-shot estimator sum_k c_k s_k (-1)^{b . m_k} is
/// used, so covariances between strings of one group are accounted for.
/// Groups and realizations are independent.
class MeasurementRecord {
 public:
  explicit MeasurementRecord(std::vector<MeasurementGroup> groups);

  const std::vector<MeasurementGroup>& groups() const { return groups_; }
  std::size_t realizations() const { return distributions_.size(); }

  void add_realization(const StateVector& state, const SamplingOptions& options,
                       std::uint64_t seed);

  /// Average over realizations; std_error from sum of variances / R^2.
  ComplexEstimate estimate(const PauliSum& op) const;

 private:
  struct Located {
    std::size_t group;
    std::size_t member;
  };
  std::vector<MeasurementGroup> groups_;
  std::map<PauliString, Located> index_;
  // distributions_[r][g]: (quasi-)probabilities for group g in realization r
  std::vector<std::vector<Eigen::VectorXd>> distributions_;
  std::vector<std::uint64_t> shots_;
};

}  // namespace qgf
