#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qgf/fermion.hpp"
#include "qgf/lehmann.hpp"
#include "qgf/pauli.hpp"
#include "qgf/statevector.hpp"

namespace qgf {

/// Fock-space matrix of `op` built directly from ladder actions on occupation
/// bitstrings (mode j is qubit j, the (n-1-j)th bit of an index). Signs count
/// occupied modes with smaller index, matching jordan_wigner.
Eigen::MatrixXcd dense_matrix(const FermionOperator& op, int n_modes);
Eigen::MatrixXcd dense_matrix(const FermionOperator& op);

/// Sum of coefficient * Pauli matrix.
Eigen::MatrixXcd to_dense(const PauliSum& p);

Eigen::MatrixXcd number_operator(int n_modes);
/// S_z = (1/2) sum_i (n_{i up} - n_{i down}) under the spin-major labeling.
Eigen::MatrixXcd sz_operator(const ModeLabeling& labels);

/// Eigenpairs of one (N, S_z) block. Eigenvector columns live in the full
/// 2^n space and are zero outside the block.
///
/// Within an eigenvalue cluster (gap < 1e-9) the vectors come from
/// Gram-Schmidt on the block's basis states in index order; isolated vectors
/// have their largest component (lowest index on ties) real and positive.
struct SectorSpectrum {
  int n_particles = 0;
  int two_sz = 0;
  std::vector<std::uint32_t> basis;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;

  double sz() const { return 0.5 * two_sz; }
};

/// Every (N, S_z) block sorted by N then S_z, after checking that H commutes
/// with N and S_z within 1e-10.
std::vector<SectorSpectrum> sector_spectra(const FermionOperator& h);

const SectorSpectrum& find_sector(const std::vector<SectorSpectrum>& spectra, int n_particles,
                                  int two_sz);

struct GroundState {
  double energy = 0.0;
  int n_particles = 0;
  int two_sz = 0;
  StateVector state;
};

/// Lowest state of the given block. Throws DegenerateStateError when the
/// lowest level is degenerate within 1e-9.
GroundState exact_ground_state(const FermionOperator& h, int n_particles, int two_sz);
/// Half filling with S_z = 0.
GroundState exact_ground_state(const FermionOperator& h);

/// Exact poles of <<a ; b>> where `a` removes and `b` adds one fermion:
/// particle residues <0|a|n><n|b|0>, hole residues <0|b|m><m|a|0>.
/// Poles with |residue| below 1e-14 are dropped.
std::vector<LehmannPole> exact_poles(const FermionOperator& h, const GroundState& ground,
                                     const FermionOperator& a, const FermionOperator& b);

GreensFunctionData exact_gf(const FermionOperator& h, const FermionOperator& a,
                            const FermionOperator& b, const std::vector<double>& omega,
                            double eta);

}  // namespace qgf
