#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qgf/fermion.hpp"
#include "qgf/lehmann.hpp"
#include "qgf/measurement.hpp"
#include "qgf/statevector.hpp"
#include "qgf/vqe.hpp"

namespace qgf {

/// Elementary excitations E_mu, each a single normal-ordered product that
/// adds one fermion.
struct ExcitationBasis {
  std::vector<FermionOperator> ops;

  int n_modes() const { return ops.empty() ? 0 : ops.front().n_modes(); }
  std::size_t size() const { return ops.size(); }
  void validate() const;
};

/// Four operators on the dimer, all lowering S_z by 1/2 (sites 1 and 2 are
/// modes 0/1 for spin up and 2/3 for spin down):
///   c+_{1dn} c+_{1up} c_{2up},  c+_{2dn} c+_{1dn} c_{2dn},
///   c+_{2dn} c+_{1dn} c+_{2up} c_{1up} c_{2dn},  c+_{2dn}.
ExcitationBasis default_charged_basis();

/// A_{mu nu} = <0|[E_mu^dagger, H, E_nu]|0>, B_{mu nu} = <0|[E_mu^dagger, E_nu]|0>.
/// Standard errors are zero in exact mode.
struct QeomMatrices {
  Eigen::MatrixXcd a;
  Eigen::MatrixXcd b;
  Eigen::MatrixXd a_err;
  Eigen::MatrixXd b_err;
  EnergyMode mode = EnergyMode::exact;
  int realizations = 0;
  std::uint64_t shots = 0;
};

struct QeomOptions {
  EnergyMode mode = EnergyMode::exact;
  SamplingOptions sampling{};
  int realizations = 13;
  std::uint64_t seed = 0;
};

/// The symbolic operators behind each matrix element, mapped to qubits.
struct QeomOperators {
  std::vector<std::vector<PauliSum>> a;
  std::vector<std::vector<PauliSum>> b;
};
QeomOperators qeom_operators(const ExcitationBasis& basis, const FermionOperator& h);

/// Exact mode evaluates each element on `ground`; sampled mode measures the
/// union of all strings in qubit-wise groups over `realizations` independent
/// realizations and Hermitizes the averages.
QeomMatrices build_matrices(const StateVector& ground, const ExcitationBasis& basis,
                            const FermionOperator& h, const QeomOptions& options);

inline constexpr double kExactTruncation = 1e-6;
inline constexpr double kSampledTruncation = 1e-2;

struct QeomState {
  double eigenvalue = 0.0;  // lambda of A X = lambda B X
  Eigen::VectorXcd x;       // scaled so |X^dagger B X| = 1 unless neutral
  double b_norm = 0.0;      // X^dagger B X for the unit-length X
  Sector sector = Sector::neutral;
  double residual = 0.0;    // ||A X - lambda B X||
  double refined = 0.0;     // Rayleigh quotient on the solved matrices
  double refined_std_error = 0.0;

  /// lambda for particles; the physical E^{N-1} - E_0 = -lambda for holes.
  double excitation_energy() const { return sector == Sector::hole ? -eigenvalue : eigenvalue; }
};

struct QeomSolution {
  std::vector<QeomState> states;  // ascending eigenvalue
  double threshold = 0.0;
  int retained_rank = 0;
  double a_norm = 0.0;  // spectral norm of the Hermitized A
};

/// Canonical orthogonalization: B = V w V^dagger, directions with
/// |w| < threshold dropped, T = V |w|^{-1/2}, then S T^dagger A T y = lambda y
/// with S = sign(w) and X = T y. Particle when X^dagger B X > 0, hole when < 0.
///
/// Within an eigenvalue cluster (gap < 1e-9) vectors are B-orthonormalized
/// in order; each X has its largest component (lowest index on ties) real
/// and positive.
QeomSolution solve_gep(const QeomMatrices& m, double threshold);

/// Re(X^dagger A X) / Re(X^dagger B X) on the Hermitized matrices. Throws
/// DegenerateStateError when |X^dagger B X| <= 1e-10 ||X||^2.
double rayleigh_refine(const Eigen::VectorXcd& x, const QeomMatrices& m);

/// O^dagger = sum_mu X_mu E_mu.
FermionOperator excitation_operator(const Eigen::VectorXcd& x, const ExcitationBasis& basis);

/// Squared norm of the state generated from the ground state: ||O^dagger|0>||^2
/// for particles and ||O|0>||^2 for holes.
double excitation_norm2(const Eigen::VectorXcd& x, const ExcitationBasis& basis,
                        const StateVector& ground, Sector sector);

/// O^dagger rescaled so that the generated state above has unit norm.
/// Throws DegenerateStateError when that norm^2 <= 1e-12.
FermionOperator normalized_excitation(const Eigen::VectorXcd& x, const ExcitationBasis& basis,
                                      const StateVector& ground, Sector sector);

/// Excited state |n> = O^dagger|0> (particle) or O|0> (hole), normalized.
Eigen::VectorXcd excited_state(const Eigen::VectorXcd& x, const ExcitationBasis& basis,
                               const StateVector& ground, Sector sector);

/// |<n|m>| for every pair of states in one sector; cross-sector pairs are 0.
Eigen::MatrixXd state_overlaps(const QeomSolution& s, const ExcitationBasis& basis,
                               const StateVector& ground);

/// Direct functional <[O, H, O^dagger]> / <[O, O^dagger]> measured with fresh
/// shots. std_error follows from the linearized ratio
/// (N_op - r D_op) / D, estimated on the same shots.
Estimate measured_refinement(const Eigen::VectorXcd& x, const ExcitationBasis& basis,
                             const FermionOperator& h, const StateVector& ground,
                             const QeomOptions& options);

/// Matrices, solve and per-state refinement in one call. Sampled mode refines
/// each state with measured_refinement on seeds derived from options.seed.
QeomSolution run_qeom(const StateVector& ground, const ExcitationBasis& basis,
                      const FermionOperator& h, const QeomOptions& options, double threshold,
                      QeomMatrices* matrices_out = nullptr);

}  // namespace qgf
