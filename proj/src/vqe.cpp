#include "qgf/vqe.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "qgf/errors.hpp"
#include "qgf/seed.hpp"

namespace qgf {

namespace {

constexpr double kPi = std::numbers::pi;

struct Objective {
  const EnergyModel* model;
  const VqeOptions* options;
  int restart;
  std::uint64_t evaluations = 0;
  double last_std_error = 0.0;

  double operator()(const AnsatzParameters& p) {
    const std::uint64_t k = evaluations++;
    if (options->mode == EnergyMode::exact) return model->exact(p);
    const Estimate e = model->sampled(
        p, options->sampling,
        derive_seed(options->seed, {static_cast<std::uint64_t>(restart), 2, k}));
    last_std_error = e.std_error;
    return e.value;
  }
};

double gsl_objective(const gsl_vector* x, void* params) {
  auto* obj = static_cast<Objective*>(params);
  return (*obj)(AnsatzParameters{gsl_vector_get(x, 0), gsl_vector_get(x, 1),
                                 gsl_vector_get(x, 2), gsl_vector_get(x, 3)});
}

VqeTraceRow make_row(const EnergyModel& model, int iteration, double energy, double std_error,
                     const AnsatzParameters& p, const std::optional<StateVector>& reference) {
  VqeTraceRow row{iteration, energy, std_error, p, model.exact(p),
                  std::numeric_limits<double>::quiet_NaN()};
  if (reference) row.fidelity = fidelity(run_circuit(build_ansatz(p)), *reference);
  return row;
}

// Scratch gsl handles released on every exit path.
struct SimplexHandles {
  gsl_vector* x = nullptr;
  gsl_vector* step = nullptr;
  gsl_multimin_fminimizer* s = nullptr;
  ~SimplexHandles() {
    if (s) gsl_multimin_fminimizer_free(s);
    if (step) gsl_vector_free(step);
    if (x) gsl_vector_free(x);
  }
};

void run_simplex(const EnergyModel& model, const VqeOptions& options, VqeRun& run,
                 const std::optional<StateVector>& reference) {
  Objective obj{&model, &options, run.restart};
  gsl_set_error_handler_off();  // failures surface through return codes
  SimplexHandles h;
  h.x = gsl_vector_alloc(4);
  h.step = gsl_vector_alloc(4);
  const auto init = run.initial.as_array();
  for (std::size_t i = 0; i < 4; ++i) {
    gsl_vector_set(h.x, i, init[i]);
    gsl_vector_set(h.step, i, options.simplex_step);
  }
  gsl_multimin_function f{&gsl_objective, 4, &obj};
  h.s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 4);
  if (gsl_multimin_fminimizer_set(h.s, &f, h.x, h.step) != GSL_SUCCESS) {
    throw NumericalError("simplex initialization failed");
  }

  auto current = [&h]() {
    const gsl_vector* x = gsl_multimin_fminimizer_x(h.s);
    return AnsatzParameters{gsl_vector_get(x, 0), gsl_vector_get(x, 1), gsl_vector_get(x, 2),
                            gsl_vector_get(x, 3)};
  };
  for (int it = 1; it <= options.max_iter; ++it) {
    const int status = gsl_multimin_fminimizer_iterate(h.s);
    run.iterations = it;
    run.trace.push_back(make_row(model, it, gsl_multimin_fminimizer_minimum(h.s),
                                 options.mode == EnergyMode::sampled ? obj.last_std_error : 0.0,
                                 current(), reference));
    if (status != GSL_SUCCESS) break;  // no further progress possible
    if (gsl_multimin_fminimizer_size(h.s) < options.simplex_tolerance) {
      run.converged = true;
      break;
    }
  }
  run.params = current();
}

void run_spsa(const EnergyModel& model, const VqeOptions& options, VqeRun& run,
              const std::optional<StateVector>& reference) {
  Objective obj{&model, &options, run.restart};
  std::mt19937_64 rng(derive_seed(options.seed, {static_cast<std::uint64_t>(run.restart), 1}));
  auto perturbation = [&rng]() {
    std::array<double, 4> d{};
    for (auto& v : d) v = (rng() >> 63) ? 1.0 : -1.0;
    return d;
  };
  auto shifted = [](const std::array<double, 4>& x, const std::array<double, 4>& d, double s) {
    std::array<double, 4> y{};
    for (std::size_t i = 0; i < 4; ++i) y[i] = x[i] + s * d[i];
    return AnsatzParameters::from_array(y);
  };

  std::array<double, 4> theta = run.initial.as_array();
  const double big_a = 0.1 * options.max_iter;

  // Gain a is set so that the first step moves about spsa_first_step radians.
  double slope = 0.0;
  for (int i = 0; i < options.spsa_calibration_samples; ++i) {
    const auto d = perturbation();
    slope += std::abs(obj(shifted(theta, d, options.spsa_c)) -
                      obj(shifted(theta, d, -options.spsa_c))) /
             (2.0 * options.spsa_c);
  }
  slope /= options.spsa_calibration_samples;
  const double a = slope > 0.0
                       ? options.spsa_first_step * std::pow(big_a + 1.0, options.spsa_alpha) / slope
                       : options.spsa_first_step;

  for (int k = 0; k < options.max_iter; ++k) {
    const double ak = a / std::pow(k + 1.0 + big_a, options.spsa_alpha);
    const double ck = options.spsa_c / std::pow(k + 1.0, options.spsa_gamma);
    const auto d = perturbation();
    const double f_plus = obj(shifted(theta, d, ck));
    const double se_plus = obj.last_std_error;
    const double f_minus = obj(shifted(theta, d, -ck));
    const double se_minus = obj.last_std_error;
    run.trace.push_back(make_row(model, k + 1, 0.5 * (f_plus + f_minus),
                                 0.5 * std::hypot(se_plus, se_minus),
                                 AnsatzParameters::from_array(theta), reference));
    const double g = (f_plus - f_minus) / (2.0 * ck);
    for (std::size_t i = 0; i < 4; ++i) theta[i] -= ak * g * d[i];
    run.iterations = k + 1;
  }
  run.params = AnsatzParameters::from_array(theta);
  run.converged = true;
}

// Each angle enters the ansatz state through one sinusoid: both A blocks act
// on |10>, so amplitudes are linear in (cos t, sin t) and in (1, e^{-i phi}).
// The energy along one coordinate is therefore a + b cos(w x) + c sin(w x)
// with w = 2 for theta and w = 1 for phi, and is minimized exactly from three
// evaluations.
int polish(const EnergyModel& model, VqeRun& run, int max_sweeps) {
  std::array<double, 4> x = run.params.as_array();
  constexpr std::array<double, 4> kFrequency{2.0, 1.0, 2.0, 1.0};
  auto energy = [&model](const std::array<double, 4>& v) {
    return model.exact(AnsatzParameters::from_array(v));
  };
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double moved = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      const double w = kFrequency[i];
      const double shift = kPi / (2.0 * w);
      const double e0 = energy(x);
      auto y = x;
      y[i] = x[i] + shift;
      const double ep = energy(y);
      y[i] = x[i] - shift;
      const double em = energy(y);
      const double a = 0.5 * (ep + em);
      const double c = 0.5 * (ep - em);
      const double b = e0 - a;
      if (std::hypot(b, c) == 0.0) continue;  // flat coordinate
      const double step = std::atan2(-c, -b) / w;
      x[i] += step;
      moved = std::max(moved, std::abs(step));
    }
    if (moved < 1e-15) {
      run.params = AnsatzParameters::from_array(x);
      return sweep;
    }
  }
  run.params = AnsatzParameters::from_array(x);
  return max_sweeps;
}

}  // namespace

Circuit build_ansatz(const AnsatzParameters& p) {
  Circuit c(4);
  c.add(Gate::x(0))
      .add(Gate::x(2))
      .add(Gate::a(0, 1, p.theta1, p.phi1))
      .add(Gate::a(2, 3, p.theta2, p.phi2))
      .add(Gate::cnot(1, 2))
      .add(Gate::cnot(1, 3));
  return c;
}

Circuit a_gate_decomposition(int n_qubits, int q0, int q1, double theta, double phi) {
  Circuit c(n_qubits);
  c.add(Gate::cnot(q0, q1));
  // R = Ry(theta + pi/2) Rz(phi + pi): Rz acts first.
  c.add(Gate::rz(q0, phi + kPi)).add(Gate::ry(q0, theta + kPi / 2));
  c.add(Gate::cnot(q1, q0));
  c.add(Gate::ry(q0, -(theta + kPi / 2))).add(Gate::rz(q0, -(phi + kPi)));
  c.add(Gate::cnot(q0, q1));
  return c;
}

std::string to_string(EnergyMode m) { return m == EnergyMode::exact ? "exact" : "sampled"; }
std::string to_string(OptimizerKind k) { return k == OptimizerKind::simplex ? "simplex" : "spsa"; }

EnergyMode parse_energy_mode(std::string_view s) {
  if (s == "exact") return EnergyMode::exact;
  if (s == "sampled") return EnergyMode::sampled;
  throw ValidationError("mode must be 'exact' or 'sampled'");
}

OptimizerKind parse_optimizer(std::string_view s) {
  if (s == "simplex") return OptimizerKind::simplex;
  if (s == "spsa") return OptimizerKind::spsa;
  throw ValidationError("optimizer must be 'simplex' or 'spsa'");
}

EnergyModel::EnergyModel(PauliSum h, GroupingRule rule)
    : h_(std::move(h)), groups_(measurement_groups(h_, rule)) {
  if (h_.n_qubits() != 4) throw DimensionError("the ansatz acts on four qubits");
  if (!h_.is_hermitian()) throw ValidationError("Hamiltonian is not Hermitian");
}

double EnergyModel::exact(const AnsatzParameters& p) const {
  return exact_expectation(run_circuit(build_ansatz(p)), h_);
}

Estimate EnergyModel::sampled(const AnsatzParameters& p, const SamplingOptions& options,
                              std::uint64_t seed) const {
  return sampled_expectation(run_circuit(build_ansatz(p)), h_, options, seed, groups_);
}

void VqeOptions::validate() const {
  if (max_iter < 1) throw ValidationError("max_iter must be at least 1");
  if (n_restarts < 1) throw ValidationError("n_restarts must be at least 1");
  if (mode == EnergyMode::sampled && sampling.shots < 1) {
    throw ValidationError("shots must be at least 1");
  }
  if (!(simplex_step > 0.0) || !(simplex_tolerance > 0.0)) {
    throw ValidationError("simplex step and tolerance must be positive");
  }
  if (polish_sweeps < 0) throw ValidationError("polish_sweeps must be non-negative");
  if (!(spsa_c > 0.0) || !(spsa_first_step > 0.0) || spsa_calibration_samples < 1) {
    throw ValidationError("SPSA gains must be positive");
  }
  sampling.noise.validate();
}

VqeResult minimize(const EnergyModel& model, const VqeOptions& options,
                   const std::optional<StateVector>& reference) {
  options.validate();
  VqeResult result;
  for (int r = 0; r < options.n_restarts; ++r) {
    VqeRun run;
    run.restart = r;
    std::mt19937_64 init_rng(derive_seed(options.seed, {static_cast<std::uint64_t>(r), 0}));
    std::array<double, 4> x{};
    for (auto& v : x) v = -kPi + 2.0 * kPi * unit_uniform(init_rng());
    run.initial = AnsatzParameters::from_array(x);

    if (options.optimizer == OptimizerKind::simplex) {
      run_simplex(model, options, run, reference);
    } else {
      run_spsa(model, options, run, reference);
    }

    if (options.mode == EnergyMode::exact && options.polish_sweeps > 0) {
      run.polish_sweeps = polish(model, run, options.polish_sweeps);
    }
    run.theoretical = model.exact(run.params);
    if (options.mode == EnergyMode::exact) {
      run.energy = run.theoretical;
    } else {
      const Estimate e = model.sampled(
          run.params, options.sampling, derive_seed(options.seed, {static_cast<std::uint64_t>(r), 3}));
      run.energy = e.value;
      run.std_error = e.std_error;
    }
    result.runs.push_back(std::move(run));
  }
  for (std::size_t i = 1; i < result.runs.size(); ++i) {
    if (result.runs[i].energy < result.runs[result.best].energy) result.best = i;
  }
  return result;
}

}  // namespace qgf
