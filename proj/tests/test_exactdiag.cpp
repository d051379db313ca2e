#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "qgf/errors.hpp"
#include "qgf/exactdiag.hpp"
#include "test_util.hpp"

using namespace qgf;
using qgf::testing::max_abs;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> sorted(const Eigen::VectorXd& v) {
  std::vector<double> out(v.begin(), v.end());
  std::sort(out.begin(), out.end());
  return out;
}

void expect_values(const SectorSpectrum& s, std::vector<double> expected) {
  std::sort(expected.begin(), expected.end());
  const auto got = sorted(s.eigenvalues);
  ASSERT_EQ(got.size(), expected.size()) << "N=" << s.n_particles << " 2Sz=" << s.two_sz;
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], expected[i], 1e-12);
}

std::vector<double> pole_energies(const std::vector<LehmannPole>& poles, Sector sector) {
  std::vector<double> out;
  for (const auto& p : poles) {
    if (p.sector == sector) out.push_back(p.energy);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Dense, LadderExamples) {
  // One mode: |0> is index 0, |1> is index 1.
  const Eigen::MatrixXcd cd = dense_matrix(FermionOperator::creation(1, 0), 1);
  EXPECT_EQ(cd(1, 0), Complex(1.0, 0.0));
  EXPECT_EQ(cd(0, 1), Complex(0.0, 0.0));
  // c+_1 on |10> picks up the sign of the occupied mode 0.
  const Eigen::MatrixXcd cd1 = dense_matrix(FermionOperator::creation(2, 1), 2);
  EXPECT_EQ(cd1(0b11, 0b10), Complex(-1.0, 0.0));
  EXPECT_EQ(cd1(0b01, 0b00), Complex(1.0, 0.0));
}

TEST(Dense, IsAnAlgebraHomomorphism) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 100; ++i) {
    const FermionOperator a = qgf::testing::random_fermion(rng, 4);
    const FermionOperator b = qgf::testing::random_fermion(rng, 4);
    EXPECT_LT(max_abs(dense_matrix(a * b) - dense_matrix(a) * dense_matrix(b)), 1e-10);
    EXPECT_LT(max_abs(dense_matrix(a.adjoint()) - dense_matrix(a).adjoint()), 1e-14);
  }
}

TEST(Dense, NumberAndSpinOperatorsAreDiagonal) {
  const Eigen::MatrixXcd n = number_operator(4);
  const Eigen::MatrixXcd sz = sz_operator(ModeLabeling{2});
  EXPECT_EQ(n(0b1010, 0b1010), Complex(2.0, 0.0));
  EXPECT_EQ(sz(0b1010, 0b1010), Complex(0.0, 0.0));
  EXPECT_EQ(sz(0b1100, 0b1100), Complex(1.0, 0.0));
  EXPECT_EQ(sz(0b0001, 0b0001), Complex(-0.5, 0.0));
  EXPECT_LT(max_abs(n - Eigen::MatrixXcd(n.diagonal().asDiagonal())), 1e-15);
}

TEST(Sectors, DimerSpectraMatchAnalyticValues) {
  const auto spectra = sector_spectra(build_hubbard(2, 1.0, 3.0));
  ASSERT_EQ(spectra.size(), 9u);
  expect_values(find_sector(spectra, 0, 0), {0.0});
  expect_values(find_sector(spectra, 1, 1), {-1.0, 1.0});
  expect_values(find_sector(spectra, 1, -1), {-1.0, 1.0});
  expect_values(find_sector(spectra, 2, 0), {-1.0, 0.0, 3.0, 4.0});
  expect_values(find_sector(spectra, 2, 2), {0.0});
  expect_values(find_sector(spectra, 2, -2), {0.0});
  expect_values(find_sector(spectra, 3, 1), {2.0, 4.0});
  expect_values(find_sector(spectra, 3, -1), {2.0, 4.0});
  expect_values(find_sector(spectra, 4, 0), {6.0});
  EXPECT_THROW(find_sector(spectra, 2, 1), ValidationError);
  for (std::size_t i = 1; i < spectra.size(); ++i) {
    const auto& a = spectra[i - 1];
    const auto& b = spectra[i];
    EXPECT_TRUE(a.n_particles < b.n_particles ||
                (a.n_particles == b.n_particles && a.two_sz < b.two_sz));
  }
}

TEST(Sectors, UnionEqualsFullSpectrum) {
  for (double u : {0.0, 1.0, 3.0, 7.5}) {
    const FermionOperator h = build_hubbard(2, 1.0, u);
    std::vector<double> blocks;
    for (const auto& s : sector_spectra(h)) {
      blocks.insert(blocks.end(), s.eigenvalues.begin(), s.eigenvalues.end());
    }
    std::sort(blocks.begin(), blocks.end());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> full(dense_matrix(h));
    const auto all = sorted(full.eigenvalues());
    ASSERT_EQ(blocks.size(), all.size());
    for (std::size_t i = 0; i < all.size(); ++i) EXPECT_NEAR(blocks[i], all[i], 1e-10);
  }
}

TEST(Sectors, EigenvectorsAreOrthonormalEigenpairsInsideTheirBlock) {
  const FermionOperator h = build_hubbard(2, 1.0, 3.0);
  const Eigen::MatrixXcd hd = dense_matrix(h);
  const Eigen::MatrixXcd n = number_operator(4);
  for (const auto& s : sector_spectra(h)) {
    const Eigen::MatrixXcd& v = s.eigenvectors;
    ASSERT_EQ(v.rows(), 16);
    ASSERT_EQ(v.cols(), static_cast<Eigen::Index>(s.basis.size()));
    EXPECT_LT(max_abs(v.adjoint() * v - Eigen::MatrixXcd::Identity(v.cols(), v.cols())), 1e-12);
    EXPECT_LT(max_abs(hd * v - v * s.eigenvalues.asDiagonal()), 1e-12);
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
      for (int i = 0; i < 16; ++i) {
        if (std::abs(n(i, i).real() - s.n_particles) > 0.5) {
          EXPECT_EQ(v(i, c), Complex(0.0, 0.0));
        }
      }
    }
  }
}

TEST(Sectors, DegenerateBlockIsDeterministic) {
  // At U = 0 the N = 2, S_z = 0 block has a triply degenerate zero level.
  const FermionOperator h = build_hubbard(2, 1.0, 0.0);
  const auto a = sector_spectra(h);
  const auto b = sector_spectra(h);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].eigenvectors, b[i].eigenvectors);
  }
  expect_values(find_sector(a, 2, 0), {-2.0, 0.0, 0.0, 2.0});
}

TEST(Sectors, RejectsSymmetryBreakingHamiltonian) {
  const FermionOperator h = build_hubbard(2, 1.0, 3.0) + FermionOperator::creation(4, 0) +
                            FermionOperator::annihilation(4, 0);
  EXPECT_THROW(sector_spectra(h), ValidationError);
}

TEST(Ground, DimerGroundState) {
  const FermionOperator h = build_hubbard(2, 1.0, 3.0);
  const GroundState g = exact_ground_state(h);
  EXPECT_NEAR(g.energy, -1.0, 1e-12);
  EXPECT_EQ(g.n_particles, 2);
  EXPECT_EQ(g.two_sz, 0);
  EXPECT_NEAR(g.state.norm(), 1.0, 1e-12);
  EXPECT_NEAR(exact_expectation(g.state, jordan_wigner(h, 4)), -1.0, 1e-12);
}

TEST(Ground, DegenerateLevelThrows) {
  // Without hopping every singly occupied configuration has zero energy.
  EXPECT_THROW(exact_ground_state(build_hubbard(2, 0.0, 3.0), 1, 1), DegenerateStateError);
}

TEST(ExactGf, DiagonalProbePoles) {
  const FermionOperator h = build_hubbard(2, 1.0, 3.0);
  const GroundState g = exact_ground_state(h);
  std::vector<double> particles, holes;
  for (double k : {0.0, kPi}) {
    const FermionOperator c = momentum_mode(k, Spin::down);
    const auto poles = exact_poles(h, g, c, c.adjoint());
    for (double e : pole_energies(poles, Sector::particle)) particles.push_back(e);
    for (double e : pole_energies(poles, Sector::hole)) holes.push_back(e);
    for (const auto& p : poles) {
      EXPECT_GT(p.residue.real(), 0.0);
      EXPECT_NEAR(p.residue.imag(), 0.0, 1e-14);
    }
  }
  std::sort(particles.begin(), particles.end());
  std::sort(holes.begin(), holes.end());
  ASSERT_EQ(particles.size(), 2u);
  ASSERT_EQ(holes.size(), 2u);
  EXPECT_NEAR(particles[0], 3.0, 1e-12);
  EXPECT_NEAR(particles[1], 5.0, 1e-12);
  EXPECT_NEAR(holes[0], -2.0, 1e-12);
  EXPECT_NEAR(holes[1], 0.0, 1e-12);
}

TEST(ExactGf, SumRuleForDiagonalProbes) {
  const FermionOperator h = build_hubbard(2, 1.0, 3.0);
  const GroundState g = exact_ground_state(h);
  for (double k : {0.0, kPi}) {
    for (Spin s : {Spin::up, Spin::down}) {
      const FermionOperator c = momentum_mode(k, s);
      Complex total{};
      double windowed = 0.0;  // Lorentzian weight inside [-50, 50]
      const double eta = 0.5;
      for (const auto& p : exact_poles(h, g, c, c.adjoint())) {
        total += p.residue;
        windowed += p.residue.real() *
                    (std::atan((50.0 - p.energy) / eta) - std::atan((-50.0 - p.energy) / eta)) / kPi;
      }
      EXPECT_NEAR(total.real(), 1.0, 1e-12);
      EXPECT_NEAR(total.imag(), 0.0, 1e-12);

      const auto grid = frequency_grid(-50.0, 50.0, 0.01);
      const GreensFunctionData gf = exact_gf(h, c, c.adjoint(), grid, eta);
      EXPECT_NEAR(trapezoid(gf.omega, spectral_function(gf)), windowed, 1e-6);
      // The tails beyond +-50 hold about 2 eta / (50 pi) of the weight.
      EXPECT_NEAR(windowed, 1.0 - 2.0 * eta / (50.0 * kPi), 1e-4);
    }
  }
}

TEST(ExactGf, OppositeSpinElementVanishes) {
  const FermionOperator h = build_hubbard(2, 1.0, 3.0);
  const GroundState g = exact_ground_state(h);
  for (double k : {0.0, kPi}) {
    EXPECT_TRUE(exact_poles(h, g, momentum_mode(k, Spin::up),
                            momentum_mode(k, Spin::down).adjoint())
                    .empty());
  }
}

TEST(ExactGf, FreeLimitMatchesNonInteractingPropagator) {
  const FermionOperator h = build_hubbard(2, 1.0, 0.0);
  const double eta = 0.3;
  const auto grid = frequency_grid(-4.0, 4.0, 0.05);
  for (double k : {0.0, kPi}) {
    const double eps = k == 0.0 ? -1.0 : 1.0;
    const FermionOperator c = momentum_mode(k, Spin::up);
    const GreensFunctionData gf = exact_gf(h, c, c.adjoint(), grid, eta);
    ASSERT_EQ(gf.g.size(), grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Complex free = 1.0 / Complex(grid[i] - eps, eta);
      EXPECT_LT(std::abs(gf.g[i] - free), 1e-12) << "omega=" << grid[i];
    }
  }
}

TEST(ExactGf, RejectsNonPositiveEta) {
  const FermionOperator h = build_hubbard(2, 1.0, 3.0);
  const FermionOperator c = momentum_mode(0.0, Spin::up);
  EXPECT_THROW(exact_gf(h, c, c.adjoint(), {0.0}, 0.0), ValidationError);
  EXPECT_THROW(exact_gf(h, c, c.adjoint(), {0.0}, -1.0), ValidationError);
}

TEST(Lehmann, GridAndTrapezoid) {
  const auto grid = frequency_grid(-10.0, 10.0, 0.01);
  ASSERT_EQ(grid.size(), 2001u);
  EXPECT_DOUBLE_EQ(grid.front(), -10.0);
  EXPECT_DOUBLE_EQ(grid.back(), 10.0);
  EXPECT_NEAR(grid[1000], 0.0, 1e-12);
  EXPECT_THROW(frequency_grid(0.0, 1.0, 0.3), ValidationError);
  EXPECT_THROW(frequency_grid(1.0, 0.0, 0.1), ValidationError);
  EXPECT_DOUBLE_EQ(trapezoid({0.0, 1.0, 3.0}, {0.0, 2.0, 2.0}), 5.0);
}
