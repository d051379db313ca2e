#include "qgf/greens.hpp"

#include <cmath>
#include <numbers>

#include "qgf/errors.hpp"
#include "qgf/seed.hpp"

namespace qgf {

namespace {

std::string spin_name(Spin s) { return s == Spin::up ? "up" : "down"; }

// Operators measured for one state: numerators for both probes and the norm.
struct StateOperators {
  PauliSum num_a;
  PauliSum num_b;
  PauliSum norm;
};

StateOperators state_operators(const QeomState& s, const ExcitationBasis& basis,
                               const ProbePair& probes) {
  const int n = basis.n_modes();
  const FermionOperator od = excitation_operator(s.x, basis);
  const FermionOperator o = od.adjoint();
  if (s.sector == Sector::particle) {
    return {jordan_wigner(o * probes.a.adjoint(), n), jordan_wigner(o * probes.b, n),
            jordan_wigner(o * od, n)};
  }
  return {jordan_wigner(od * probes.a, n), jordan_wigner(od * probes.b.adjoint(), n),
          jordan_wigner(od * o, n)};
}

}  // namespace

ProbePair k_space_pair(double k, std::pair<Spin, Spin> spins) {
  if (!(std::abs(k) < 1e-12 || std::abs(k - std::numbers::pi) < 1e-12)) {
    throw ValidationError("k must be 0 or pi on the two-site model");
  }
  const bool zero = std::abs(k) < 1e-12;
  return ProbePair{momentum_mode(k, spins.first), momentum_mode(k, spins.second).adjoint(),
                   std::string(zero ? "k0" : "kpi") + "_" + spin_name(spins.first) + "_" +
                       spin_name(spins.second)};
}

std::vector<SpectroscopicAmplitude> amplitudes(const StateVector& ground,
                                               const QeomSolution& solution,
                                               const ExcitationBasis& basis,
                                               const ProbePair& probes,
                                               const AmplitudeOptions& options) {
  basis.validate();
  const int n = basis.n_modes();
  if (ground.n_qubits() != n || probes.a.n_modes() != n || probes.b.n_modes() != n) {
    throw DimensionError("probes, basis and ground state must share the register");
  }
  if (probes.a.particle_number_change() != -1 || probes.b.particle_number_change() != 1) {
    throw ValidationError("probe a must remove and probe b must add one fermion");
  }

  std::vector<std::size_t> index;
  std::vector<StateOperators> ops;
  for (std::size_t i = 0; i < solution.states.size(); ++i) {
    if (solution.states[i].sector == Sector::neutral) continue;
    index.push_back(i);
    ops.push_back(state_operators(solution.states[i], basis, probes));
  }

  std::vector<SpectroscopicAmplitude> out;
  auto push = [&](std::size_t k, ComplexEstimate na, ComplexEstimate nb, double norm2) {
    const QeomState& s = solution.states[index[k]];
    if (!(norm2 > 1e-12)) throw DegenerateStateError("excitation annihilates the ground state");
    const double scale = 1.0 / std::sqrt(norm2);
    const bool refined = options.refined_energies && std::isfinite(s.refined);
    out.push_back({index[k], s.sector, refined ? s.refined : s.eigenvalue, na.value * scale,
                   nb.value * scale, na.std_error() * scale, nb.std_error() * scale});
  };

  if (options.mode == EnergyMode::exact) {
    for (std::size_t k = 0; k < ops.size(); ++k) {
      push(k, {exact_transition(ground, ops[k].num_a)}, {exact_transition(ground, ops[k].num_b)},
           exact_transition(ground, ops[k].norm).real());
    }
    return out;
  }

  if (options.realizations < 1) throw ValidationError("realizations must be at least 1");
  std::vector<PauliString> strings;
  for (const auto& o : ops) {
    for (const PauliSum* p : {&o.num_a, &o.num_b, &o.norm}) {
      for (const auto& [s, c] : p->terms()) strings.push_back(s);
    }
  }
  std::vector<MeasurementGroup> groups;
  for (auto& members : group_strings(std::move(strings), GroupingRule::qubit_wise)) {
    groups.push_back(MeasurementGroup::build(std::move(members), GroupingRule::qubit_wise));
  }
  MeasurementRecord record(std::move(groups));
  for (int r = 0; r < options.realizations; ++r) {
    record.add_realization(ground, options.sampling,
                           derive_seed(options.seed, {static_cast<std::uint64_t>(r)}));
  }
  for (std::size_t k = 0; k < ops.size(); ++k) {
    push(k, record.estimate(ops[k].num_a), record.estimate(ops[k].num_b),
         record.estimate(ops[k].norm).value.real());
  }
  return out;
}

std::vector<LehmannPole> poles(const std::vector<SpectroscopicAmplitude>& amps) {
  std::vector<LehmannPole> out;
  out.reserve(amps.size());
  for (const auto& a : amps) out.push_back({a.energy, a.residue(), a.sector});
  return out;
}

Complex residue_sum(const std::vector<SpectroscopicAmplitude>& amps) {
  Complex total{};
  for (const auto& a : amps) total += a.residue();
  return total;
}

GreensFunctionData qeom_gf(const std::vector<SpectroscopicAmplitude>& amps,
                           const std::vector<double>& omega, double eta) {
  return lehmann_gf(poles(amps), omega, eta);
}

}  // namespace qgf
