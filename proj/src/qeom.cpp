#include "qgf/qeom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qgf/errors.hpp"
#include "qgf/seed.hpp"

namespace qgf {

namespace {

constexpr double kDegeneracyGap = 1e-9;
constexpr double kNeutralMetric = 1e-10;

Eigen::MatrixXcd hermitize(const Eigen::MatrixXcd& m) { return 0.5 * (m + m.adjoint()); }

// Largest component (lowest index on ties) made real and positive.
void fix_phase(Eigen::VectorXcd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best]) + 1e-12) best = i;
  }
  if (std::abs(v[best]) > 0.0) v *= std::abs(v[best]) / v[best];
}

Eigen::Index largest_index(const Eigen::VectorXcd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best]) + 1e-12) best = i;
  }
  return best;
}

double metric(const Eigen::VectorXcd& x, const Eigen::MatrixXcd& b) {
  return x.dot(b * x).real();
}

Sector classify(double b_norm) {
  if (std::abs(b_norm) < kNeutralMetric) return Sector::neutral;
  return b_norm > 0.0 ? Sector::particle : Sector::hole;
}

// Measurement groups covering every string of `ops`.
std::vector<MeasurementGroup> covering_groups(const std::vector<const PauliSum*>& ops) {
  std::vector<PauliString> strings;
  for (const PauliSum* op : ops) {
    for (const auto& [s, c] : op->terms()) strings.push_back(s);
  }
  std::vector<MeasurementGroup> groups;
  for (auto& members : group_strings(std::move(strings), GroupingRule::qubit_wise)) {
    groups.push_back(MeasurementGroup::build(std::move(members), GroupingRule::qubit_wise));
  }
  return groups;
}

void check_inputs(const StateVector& ground, const ExcitationBasis& basis,
                  const FermionOperator& h) {
  basis.validate();
  if (h.n_modes() != basis.n_modes() || ground.n_qubits() != basis.n_modes()) {
    throw DimensionError("ground state, basis and Hamiltonian must share the register");
  }
  if (!is_hermitian(h)) throw ValidationError("Hamiltonian is not Hermitian");
}

}  // namespace

void ExcitationBasis::validate() const {
  if (ops.empty()) throw ValidationError("excitation basis must not be empty");
  for (const auto& e : ops) {
    if (e.n_modes() != n_modes()) throw DimensionError("basis operators must share n_modes");
    if (e.size() != 1) throw ValidationError("each basis operator must be a single product");
    if (e.particle_number_change() != 1) {
      throw ValidationError("each basis operator must add one fermion");
    }
  }
}

ExcitationBasis default_charged_basis() {
  constexpr int n = 4;
  const ModeLabeling m{2};
  const int up1 = m.mode(0, Spin::up), up2 = m.mode(1, Spin::up);
  const int dn1 = m.mode(0, Spin::down), dn2 = m.mode(1, Spin::down);
  auto cr = [](int j) { return LadderOp{j, true}; };
  auto an = [](int j) { return LadderOp{j, false}; };
  return ExcitationBasis{{
      FermionOperator::product(n, {cr(dn1), cr(up1), an(up2)}),
      FermionOperator::product(n, {cr(dn2), cr(dn1), an(dn2)}),
      FermionOperator::product(n, {cr(dn2), cr(dn1), cr(up2), an(up1), an(dn2)}),
      FermionOperator::product(n, {cr(dn2)}),
  }};
}

QeomOperators qeom_operators(const ExcitationBasis& basis, const FermionOperator& h) {
  basis.validate();
  const int n = basis.n_modes();
  const std::size_t k = basis.size();
  QeomOperators ops{std::vector<std::vector<PauliSum>>(k, std::vector<PauliSum>(k, PauliSum(n))),
                    std::vector<std::vector<PauliSum>>(k, std::vector<PauliSum>(k, PauliSum(n)))};
  for (std::size_t mu = 0; mu < k; ++mu) {
    const FermionOperator left = basis.ops[mu].adjoint();
    for (std::size_t nu = 0; nu < k; ++nu) {
      ops.a[mu][nu] = jordan_wigner(double_commutator(left, h, basis.ops[nu]), n);
      ops.b[mu][nu] = jordan_wigner(commutator(left, basis.ops[nu]), n);
    }
  }
  return ops;
}

QeomMatrices build_matrices(const StateVector& ground, const ExcitationBasis& basis,
                            const FermionOperator& h, const QeomOptions& options) {
  check_inputs(ground, basis, h);
  const QeomOperators ops = qeom_operators(basis, h);
  const auto k = static_cast<Eigen::Index>(basis.size());
  QeomMatrices m{Eigen::MatrixXcd(k, k), Eigen::MatrixXcd(k, k), Eigen::MatrixXd::Zero(k, k),
                 Eigen::MatrixXd::Zero(k, k), options.mode, 0, 0};

  if (options.mode == EnergyMode::exact) {
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) {
        m.a(i, j) = exact_transition(ground, ops.a[i][j]);
        m.b(i, j) = exact_transition(ground, ops.b[i][j]);
      }
    }
    return m;
  }

  if (options.realizations < 1) throw ValidationError("realizations must be at least 1");
  std::vector<const PauliSum*> all;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      all.push_back(&ops.a[i][j]);
      all.push_back(&ops.b[i][j]);
    }
  }
  MeasurementRecord record(covering_groups(all));
  for (int r = 0; r < options.realizations; ++r) {
    record.add_realization(ground, options.sampling,
                           derive_seed(options.seed, {0, static_cast<std::uint64_t>(r)}));
  }
  // The Hermitized element (M_ij + M_ji^*)/2 is estimated as one operator so
  // its error bar accounts for shared shots.
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const ComplexEstimate a = record.estimate((ops.a[i][j] + ops.a[j][i].adjoint()) * 0.5);
      const ComplexEstimate b = record.estimate((ops.b[i][j] + ops.b[j][i].adjoint()) * 0.5);
      m.a(i, j) = a.value;
      m.b(i, j) = b.value;
      m.a_err(i, j) = a.std_error();
      m.b_err(i, j) = b.std_error();
    }
  }
  m.a = hermitize(m.a);
  m.b = hermitize(m.b);
  m.realizations = options.realizations;
  m.shots = options.sampling.shots;
  return m;
}

QeomSolution solve_gep(const QeomMatrices& m, double threshold) {
  if (m.a.rows() != m.a.cols() || m.b.rows() != m.b.cols() || m.a.rows() != m.b.rows() ||
      m.a.rows() == 0) {
    throw DimensionError("A and B must be square matrices of equal size");
  }
  if (!(threshold >= 0.0)) throw ValidationError("truncation threshold must be non-negative");
  const Eigen::MatrixXcd a = hermitize(m.a);
  const Eigen::MatrixXcd b = hermitize(m.b);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> metric_solver(b);
  if (metric_solver.info() != Eigen::Success) throw NumericalError("metric diagonalization failed");
  const Eigen::VectorXd& w = metric_solver.eigenvalues();
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (std::abs(w[i]) >= threshold) kept.push_back(i);
  }
  if (kept.empty()) throw EmptySolutionError("every metric eigenvalue fell below the threshold");

  const auto r = static_cast<Eigen::Index>(kept.size());
  Eigen::MatrixXcd t(a.rows(), r);
  Eigen::VectorXd signature(r);
  for (Eigen::Index c = 0; c < r; ++c) {
    const double wi = w[kept[c]];
    t.col(c) = metric_solver.eigenvectors().col(kept[c]) / std::sqrt(std::abs(wi));
    signature[c] = wi > 0.0 ? 1.0 : -1.0;
  }
  const Eigen::MatrixXcd reduced = signature.asDiagonal() * (t.adjoint() * a * t);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(reduced);
  if (solver.info() != Eigen::Success) throw NumericalError("reduced eigenproblem failed");

  QeomSolution sol;
  sol.threshold = threshold;
  sol.retained_rank = static_cast<int>(r);
  sol.a_norm = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(a, Eigen::EigenvaluesOnly)
                   .eigenvalues()
                   .cwiseAbs()
                   .maxCoeff();

  std::vector<QeomState> states(static_cast<std::size_t>(r));
  for (Eigen::Index c = 0; c < r; ++c) {
    QeomState& s = states[static_cast<std::size_t>(c)];
    s.eigenvalue = solver.eigenvalues()[c].real();
    s.x = t * solver.eigenvectors().col(c);
  }
  std::stable_sort(states.begin(), states.end(),
                   [](const QeomState& l, const QeomState& r) { return l.eigenvalue < r.eigenvalue; });

  // Degenerate clusters: order by largest-coefficient index, then
  // B-orthogonalize in that order.
  for (std::size_t start = 0; start < states.size();) {
    std::size_t end = start + 1;
    while (end < states.size() &&
           states[end].eigenvalue - states[end - 1].eigenvalue < kDegeneracyGap) {
      ++end;
    }
    if (end - start > 1) {
      std::stable_sort(states.begin() + static_cast<std::ptrdiff_t>(start),
                       states.begin() + static_cast<std::ptrdiff_t>(end),
                       [](const QeomState& l, const QeomState& r) {
                         return largest_index(l.x) < largest_index(r.x);
                       });
      for (std::size_t i = start; i < end; ++i) {
        for (std::size_t j = start; j < i; ++j) {
          const double mj = metric(states[j].x, b);
          if (std::abs(mj) < kNeutralMetric * states[j].x.squaredNorm()) continue;
          states[i].x -= states[j].x * (states[j].x.dot(b * states[i].x) / mj);
        }
      }
    }
    start = end;
  }

  for (QeomState& s : states) {
    const double len = s.x.norm();
    if (len == 0.0) throw NumericalError("GEP produced a null eigenvector");
    s.x /= len;
    fix_phase(s.x);
    s.b_norm = metric(s.x, b);
    s.sector = classify(s.b_norm);
    if (s.sector != Sector::neutral) s.x /= std::sqrt(std::abs(s.b_norm));
    s.residual = (a * s.x - s.eigenvalue * (b * s.x)).norm();
    s.refined = s.sector == Sector::neutral ? std::numeric_limits<double>::quiet_NaN()
                                            : metric(s.x, a) / metric(s.x, b);
  }
  sol.states = std::move(states);
  return sol;
}

double rayleigh_refine(const Eigen::VectorXcd& x, const QeomMatrices& m) {
  if (x.size() != m.a.rows()) throw DimensionError("coefficient vector does not match A");
  const double d = metric(x, hermitize(m.b));
  if (!(std::abs(d) > 1e-10 * x.squaredNorm())) {
    throw DegenerateStateError("B-norm of the excitation vanishes");
  }
  return metric(x, hermitize(m.a)) / d;
}

FermionOperator excitation_operator(const Eigen::VectorXcd& x, const ExcitationBasis& basis) {
  if (static_cast<std::size_t>(x.size()) != basis.size()) {
    throw DimensionError("coefficient vector does not match the basis");
  }
  FermionOperator o(basis.n_modes());
  for (std::size_t mu = 0; mu < basis.size(); ++mu) {
    o += basis.ops[mu] * x[static_cast<Eigen::Index>(mu)];
  }
  return o;
}

namespace {

// O^dagger|0> for particles, O|0> for holes, unnormalized.
Eigen::VectorXcd generated_state(const Eigen::VectorXcd& x, const ExcitationBasis& basis,
                                 const StateVector& ground, Sector sector) {
  if (sector == Sector::neutral) throw ValidationError("neutral states generate no excitation");
  const FermionOperator od = excitation_operator(x, basis);
  const FermionOperator& op = sector == Sector::particle ? od : od.adjoint();
  return apply_pauli_sum(jordan_wigner(op, basis.n_modes()), ground);
}

}  // namespace

double excitation_norm2(const Eigen::VectorXcd& x, const ExcitationBasis& basis,
                        const StateVector& ground, Sector sector) {
  return generated_state(x, basis, ground, sector).squaredNorm();
}

FermionOperator normalized_excitation(const Eigen::VectorXcd& x, const ExcitationBasis& basis,
                                      const StateVector& ground, Sector sector) {
  const double n2 = excitation_norm2(x, basis, ground, sector);
  if (!(n2 > 1e-12)) throw DegenerateStateError("excitation annihilates the ground state");
  return excitation_operator(x, basis) * Complex{1.0 / std::sqrt(n2), 0.0};
}

Eigen::VectorXcd excited_state(const Eigen::VectorXcd& x, const ExcitationBasis& basis,
                               const StateVector& ground, Sector sector) {
  Eigen::VectorXcd v = generated_state(x, basis, ground, sector);
  const double n2 = v.squaredNorm();
  if (!(n2 > 1e-12)) throw DegenerateStateError("excitation annihilates the ground state");
  return v / std::sqrt(n2);
}

Eigen::MatrixXd state_overlaps(const QeomSolution& s, const ExcitationBasis& basis,
                               const StateVector& ground) {
  const auto n = static_cast<Eigen::Index>(s.states.size());
  std::vector<Eigen::VectorXcd> vecs(s.states.size());
  for (std::size_t i = 0; i < s.states.size(); ++i) {
    if (s.states[i].sector != Sector::neutral) {
      vecs[i] = excited_state(s.states[i].x, basis, ground, s.states[i].sector);
    }
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& si = s.states[static_cast<std::size_t>(i)];
      const auto& sj = s.states[static_cast<std::size_t>(j)];
      if (si.sector == Sector::neutral || si.sector != sj.sector) continue;
      out(i, j) = std::abs(vecs[static_cast<std::size_t>(i)].dot(vecs[static_cast<std::size_t>(j)]));
    }
  }
  return out;
}

Estimate measured_refinement(const Eigen::VectorXcd& x, const ExcitationBasis& basis,
                             const FermionOperator& h, const StateVector& ground,
                             const QeomOptions& options) {
  check_inputs(ground, basis, h);
  const int n = basis.n_modes();
  const FermionOperator od = excitation_operator(x, basis);
  const FermionOperator o = od.adjoint();
  const PauliSum num = jordan_wigner(double_commutator(o, h, od), n);
  const PauliSum den = jordan_wigner(commutator(o, od), n);

  if (options.mode == EnergyMode::exact) {
    const double d = exact_transition(ground, den).real();
    if (!(std::abs(d) > 1e-10 * x.squaredNorm())) {
      throw DegenerateStateError("B-norm of the excitation vanishes");
    }
    return Estimate{exact_transition(ground, num).real() / d, 0.0, 0};
  }

  if (options.realizations < 1) throw ValidationError("realizations must be at least 1");
  MeasurementRecord record(covering_groups({&num, &den}));
  for (int r = 0; r < options.realizations; ++r) {
    record.add_realization(ground, options.sampling,
                           derive_seed(options.seed, {static_cast<std::uint64_t>(r)}));
  }
  const double nv = record.estimate(num).value.real();
  const double dv = record.estimate(den).value.real();
  if (!(std::abs(dv) > 1e-10 * x.squaredNorm())) {
    throw DegenerateStateError("measured B-norm of the excitation vanishes");
  }
  const double ratio = nv / dv;
  // Linearization of N/D around the measured point.
  const PauliSum lin = (num - den * Complex{ratio, 0.0}) * Complex{1.0 / dv, 0.0};
  return Estimate{ratio, record.estimate(lin).std_error_re,
                  record.groups().size() * static_cast<std::size_t>(options.realizations)};
}

QeomSolution run_qeom(const StateVector& ground, const ExcitationBasis& basis,
                      const FermionOperator& h, const QeomOptions& options, double threshold,
                      QeomMatrices* matrices_out) {
  QeomMatrices m = build_matrices(ground, basis, h, options);
  QeomSolution sol = solve_gep(m, threshold);
  if (options.mode == EnergyMode::sampled) {
    for (std::size_t i = 0; i < sol.states.size(); ++i) {
      QeomState& s = sol.states[i];
      if (s.sector == Sector::neutral) continue;
      QeomOptions sub = options;
      sub.seed = derive_seed(options.seed, {1, static_cast<std::uint64_t>(i)});
      const Estimate e = measured_refinement(s.x, basis, h, ground, sub);
      s.refined = e.value;
      s.refined_std_error = e.std_error;
    }
  }
  if (matrices_out) *matrices_out = std::move(m);
  return sol;
}

}  // namespace qgf
