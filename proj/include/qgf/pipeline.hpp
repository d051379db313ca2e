#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qgf/exactdiag.hpp"
#include "qgf/greens.hpp"
#include "qgf/io.hpp"
#include "qgf/qeom.hpp"
#include "qgf/vqe.hpp"

namespace qgf {

/// Stage drivers shared by the command-line tool and the tests. Every stage
/// draws from its own stream: derive_seed(seed, {0}) for VQE, {1} for qEOM,
/// {2, k index} for amplitudes (k = 0 -> 0, k = pi -> 1) and {3} for the
/// readout calibration.
class Pipeline {
 public:
  explicit Pipeline(RunConfig config);

  const RunConfig& config() const { return config_; }
  const FermionOperator& hamiltonian() const { return h_; }
  const GroundState& oracle() const { return oracle_; }
  /// Shots, readout noise and (with mitigation) the calibration matrix.
  const SamplingOptions& sampling() const { return sampling_; }
  std::vector<double> grid() const;

  /// Minimization with fidelity against the oracle on every trace row.
  VqeResult vqe() const;
  GroundRecord ground_record(const VqeResult& r) const;

  /// Oracle state when config().ground is oracle, the ansatz state otherwise.
  StateVector qeom_ground(const GroundRecord* vqe_ground) const;

  QeomSolution qeom(const StateVector& ground, QeomMatrices* matrices = nullptr) const;

  ProbePair probes(const std::string& k) const;
  std::vector<SpectroscopicAmplitude> amplitudes(const StateVector& ground,
                                                 const QeomSolution& solution,
                                                 const std::string& k) const;
  GreensFunctionData exact_gf(const std::string& k) const;

 private:
  RunConfig config_;
  FermionOperator h_;
  GroundState oracle_;
  SamplingOptions sampling_;
};

}  // namespace qgf
