#include "qgf/exactdiag.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "qgf/errors.hpp"

namespace qgf {

namespace {

constexpr double kSymmetryTolerance = 1e-10;
constexpr double kDegeneracyGap = 1e-9;

// Applies c_j or c+_j to an occupation index. Returns false if the result vanishes.
bool apply_ladder(const LadderOp& f, int n, std::uint32_t& state, int& sign) {
  const std::uint32_t bit = 1u << (n - 1 - f.mode);
  const bool occupied = state & bit;
  if (occupied == f.dagger) return false;
  // Modes below j occupy the bits above `bit`.
  const std::uint32_t lower_modes = ~((bit << 1) - 1) & ((1u << n) - 1);
  if (std::popcount(state & lower_modes) & 1) sign = -sign;
  state ^= bit;
  return true;
}

void fix_phase(Eigen::Ref<Eigen::VectorXcd> v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best]) + 1e-12) best = i;
  }
  v *= std::abs(v[best]) / v[best];
}

}  // namespace

Eigen::MatrixXcd dense_matrix(const FermionOperator& op, int n_modes) {
  if (op.n_modes() > n_modes) throw DimensionError("operator does not fit the Fock space");
  if (n_modes < 1 || n_modes > 14) throw DimensionError("dense Fock space limited to 14 modes");
  const std::uint32_t dim = 1u << n_modes;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [factors, c] : op.terms()) {
    for (std::uint32_t col = 0; col < dim; ++col) {
      std::uint32_t state = col;
      int sign = 1;
      bool alive = true;
      for (auto it = factors.rbegin(); it != factors.rend() && alive; ++it) {
        alive = apply_ladder(*it, n_modes, state, sign);
      }
      if (alive) m(state, col) += static_cast<double>(sign) * c;
    }
  }
  return m;
}

Eigen::MatrixXcd dense_matrix(const FermionOperator& op) {
  return dense_matrix(op, op.n_modes());
}

Eigen::MatrixXcd to_dense(const PauliSum& p) {
  const int n = p.n_qubits();
  if (n < 1 || n > 14) throw DimensionError("dense Pauli matrices limited to 14 qubits");
  static constexpr Complex kYPhase[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const std::uint32_t dim = 1u << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [s, c] : p.terms()) {
    const Complex phase = kYPhase[s.y_count() % 4] * c;
    for (std::uint32_t b = 0; b < dim; ++b) {
      const double sign = (std::popcount(b & s.z_mask()) & 1) ? -1.0 : 1.0;
      m(b ^ s.x_mask(), b) += sign * phase;
    }
  }
  return m;
}

Eigen::MatrixXcd number_operator(int n_modes) {
  FermionOperator n(n_modes);
  for (int j = 0; j < n_modes; ++j) n += FermionOperator::number(n_modes, j);
  return dense_matrix(n, n_modes);
}

Eigen::MatrixXcd sz_operator(const ModeLabeling& labels) {
  const int n = labels.n_modes();
  FermionOperator sz(n);
  for (int i = 0; i < labels.n_sites; ++i) {
    sz += FermionOperator::number(n, labels.mode(i, Spin::up)) * Complex{0.5, 0.0};
    sz -= FermionOperator::number(n, labels.mode(i, Spin::down)) * Complex{0.5, 0.0};
  }
  return dense_matrix(sz, n);
}

std::vector<SectorSpectrum> sector_spectra(const FermionOperator& h) {
  const int n = h.n_modes();
  if (n < 2 || n % 2 != 0) throw DimensionError("spinful model needs an even number of modes");
  const ModeLabeling labels{n / 2};
  const Eigen::MatrixXcd hm = dense_matrix(h, n);
  if ((hm - hm.adjoint()).cwiseAbs().maxCoeff() > kSymmetryTolerance) {
    throw ValidationError("Hamiltonian is not Hermitian");
  }
  const Eigen::MatrixXcd nm = number_operator(n);
  const Eigen::MatrixXcd szm = sz_operator(labels);
  if ((hm * nm - nm * hm).cwiseAbs().maxCoeff() > kSymmetryTolerance) {
    throw ValidationError("Hamiltonian does not conserve particle number");
  }
  if ((hm * szm - szm * hm).cwiseAbs().maxCoeff() > kSymmetryTolerance) {
    throw ValidationError("Hamiltonian does not conserve S_z");
  }

  const std::uint32_t dim = 1u << n;
  std::vector<SectorSpectrum> out;
  for (int np = 0; np <= n; ++np) {
    for (int two_sz = -n / 2; two_sz <= n / 2; ++two_sz) {
      SectorSpectrum s{np, two_sz, {}, {}, {}};
      for (std::uint32_t b = 0; b < dim; ++b) {
        if (std::lround(nm(b, b).real()) == np && std::lround(2.0 * szm(b, b).real()) == two_sz) {
          s.basis.push_back(b);
        }
      }
      if (s.basis.empty()) continue;
      const auto k = static_cast<Eigen::Index>(s.basis.size());
      Eigen::MatrixXcd block(k, k);
      for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) block(i, j) = hm(s.basis[i], s.basis[j]);
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(block);
      if (solver.info() != Eigen::Success) throw NumericalError("sector diagonalization failed");
      s.eigenvalues = solver.eigenvalues();
      Eigen::MatrixXcd vecs = solver.eigenvectors();

      for (Eigen::Index start = 0; start < k;) {
        Eigen::Index end = start + 1;
        while (end < k && s.eigenvalues[end] - s.eigenvalues[end - 1] < kDegeneracyGap) ++end;
        const Eigen::Index size = end - start;
        if (size == 1) {
          fix_phase(vecs.col(start));
        } else {
          const Eigen::MatrixXcd space = vecs.middleCols(start, size);
          Eigen::MatrixXcd chosen(k, size);
          Eigen::Index found = 0;
          for (Eigen::Index e = 0; e < k && found < size; ++e) {
            // Projection of basis state e onto the cluster.
            Eigen::VectorXcd v = space * space.row(e).adjoint();
            for (Eigen::Index c = 0; c < found; ++c) v -= chosen.col(c) * chosen.col(c).dot(v);
            const double norm = v.norm();
            if (norm > 1e-8) chosen.col(found++) = v / norm;
          }
          vecs.middleCols(start, size) = chosen;
        }
        start = end;
      }

      s.eigenvectors = Eigen::MatrixXcd::Zero(dim, k);
      for (Eigen::Index i = 0; i < k; ++i) s.eigenvectors.row(s.basis[i]) = vecs.row(i);
      out.push_back(std::move(s));
    }
  }
  return out;
}

const SectorSpectrum& find_sector(const std::vector<SectorSpectrum>& spectra, int n_particles,
                                  int two_sz) {
  auto it = std::find_if(spectra.begin(), spectra.end(), [&](const SectorSpectrum& s) {
    return s.n_particles == n_particles && s.two_sz == two_sz;
  });
  if (it == spectra.end()) {
    throw ValidationError("no sector with N=" + std::to_string(n_particles) +
                          ", 2S_z=" + std::to_string(two_sz));
  }
  return *it;
}

GroundState exact_ground_state(const FermionOperator& h, int n_particles, int two_sz) {
  const auto spectra = sector_spectra(h);
  const SectorSpectrum& s = find_sector(spectra, n_particles, two_sz);
  if (s.eigenvalues.size() > 1 && s.eigenvalues[1] - s.eigenvalues[0] < kDegeneracyGap) {
    throw DegenerateStateError("ground level of the requested sector is degenerate");
  }
  return GroundState{s.eigenvalues[0], n_particles, two_sz,
                     StateVector(h.n_modes(), s.eigenvectors.col(0))};
}

GroundState exact_ground_state(const FermionOperator& h) {
  return exact_ground_state(h, h.n_modes() / 2, 0);
}

std::vector<LehmannPole> exact_poles(const FermionOperator& h, const GroundState& ground,
                                     const FermionOperator& a, const FermionOperator& b) {
  const int n = h.n_modes();
  const Eigen::MatrixXcd am = dense_matrix(a, n);
  const Eigen::MatrixXcd bm = dense_matrix(b, n);
  const Eigen::VectorXcd& g0 = ground.state.amplitudes();
  const Eigen::VectorXcd a0 = am * g0;  // a|0>
  const Eigen::VectorXcd b0 = bm * g0;  // b|0>
  // <0|a|n> = (a^dagger|0>)^dagger |n>, <0|b|m> likewise.
  const Eigen::VectorXcd ad0 = am.adjoint() * g0;
  const Eigen::VectorXcd bd0 = bm.adjoint() * g0;

  std::vector<LehmannPole> poles;
  for (const auto& s : sector_spectra(h)) {
    for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
      const auto v = s.eigenvectors.col(i);
      const Complex particle = ad0.dot(v) * v.dot(b0);
      const Complex hole = bd0.dot(v) * v.dot(a0);
      if (std::abs(particle) > 1e-14) {
        poles.push_back({s.eigenvalues[i] - ground.energy, particle, Sector::particle});
      }
      if (std::abs(hole) > 1e-14) {
        poles.push_back({ground.energy - s.eigenvalues[i], hole, Sector::hole});
      }
    }
  }
  return poles;
}

GreensFunctionData exact_gf(const FermionOperator& h, const FermionOperator& a,
                            const FermionOperator& b, const std::vector<double>& omega,
                            double eta) {
  if (!(eta > 0.0)) throw ValidationError("broadening eta must be positive");
  return lehmann_gf(exact_poles(h, exact_ground_state(h), a, b), omega, eta);
}

}  // namespace qgf
