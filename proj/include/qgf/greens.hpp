#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qgf/fermion.hpp"
#include "qgf/lehmann.hpp"
#include "qgf/qeom.hpp"
#include "qgf/statevector.hpp"

namespace qgf {

/// Operators of one Green's function element <<a ; b>>: `a` removes and `b`
/// adds one fermion. For the diagonal element b = a^dagger.
struct ProbePair {
  FermionOperator a;
  FermionOperator b;
  std::string label;
};

/// (c_{k, spins.first}, c+_{k, spins.second}) on the dimer; k must be 0 or pi
/// within 1e-12.
ProbePair k_space_pair(double k, std::pair<Spin, Spin> spins = {Spin::up, Spin::down});

/// Normalized transition elements of one qEOM state, one per probe operator:
///   particle: gamma(p) = <0|O p|0> / sqrt(<0|O O^dagger|0>),  p in {a^dagger, b}
///   hole:     gamma(p) = <0|O^dagger p|0> / sqrt(<0|O^dagger O|0>),  p in {a, b^dagger}
struct SpectroscopicAmplitude {
  std::size_t state = 0;
  Sector sector = Sector::particle;
  double energy = 0.0;  // pole position
  Complex gamma_a{};
  Complex gamma_b{};
  double std_error_a = 0.0;  // zero in exact mode
  double std_error_b = 0.0;

  /// <0|a|n><n|b|0> for particles, <0|b|m><m|a|0> for holes.
  Complex residue() const {
    return sector == Sector::particle ? std::conj(gamma_a) * gamma_b
                                      : gamma_a * std::conj(gamma_b);
  }
};

struct AmplitudeOptions {
  EnergyMode mode = EnergyMode::exact;
  SamplingOptions sampling{};
  int realizations = 13;
  std::uint64_t seed = 0;
  /// Pole at the refined energy when finite, otherwise at the GEP eigenvalue.
  bool refined_energies = true;
};

/// Amplitudes for every non-neutral state of `solution`. Sampled mode
/// measures all numerators and norms from one shared set of realizations.
/// Throws DegenerateStateError when a state's normalization vanishes.
std::vector<SpectroscopicAmplitude> amplitudes(const StateVector& ground,
                                               const QeomSolution& solution,
                                               const ExcitationBasis& basis,
                                               const ProbePair& probes,
                                               const AmplitudeOptions& options = {});

std::vector<LehmannPole> poles(const std::vector<SpectroscopicAmplitude>& amps);

/// Sum of residues; for a diagonal probe this is the total spectral weight.
Complex residue_sum(const std::vector<SpectroscopicAmplitude>& amps);

GreensFunctionData qeom_gf(const std::vector<SpectroscopicAmplitude>& amps,
                           const std::vector<double>& omega, double eta);

}  // namespace qgf
