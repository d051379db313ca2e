#include "qgf/pipeline.hpp"

#include "qgf/errors.hpp"
#include "qgf/seed.hpp"

namespace qgf {

namespace {

std::uint64_t k_index(const std::string& k) { return parse_k(k) == 0.0 ? 0 : 1; }

}  // namespace

Pipeline::Pipeline(RunConfig config)
    : config_((config.validate(), std::move(config))),
      h_(build_hubbard(2, config_.t, config_.U)),
      oracle_(exact_ground_state(h_)) {
  sampling_.shots = config_.shots;
  if (config_.readout_noise) sampling_.noise = *config_.readout_noise;
  if (config_.mitigation && sampling_.noise.active()) {
    sampling_.calibration = empirical_calibration(4, sampling_.noise, config_.shots,
                                                  derive_seed(config_.seed, {3}));
  }
}

std::vector<double> Pipeline::grid() const {
  return frequency_grid(config_.omega_min, config_.omega_max, config_.omega_step);
}

VqeResult Pipeline::vqe() const {
  VqeOptions o;
  o.mode = config_.mode;
  o.optimizer = config_.effective_optimizer();
  o.max_iter = config_.max_iter;
  o.n_restarts = config_.n_restarts;
  o.seed = derive_seed(config_.seed, {0});
  o.sampling = sampling_;
  const EnergyModel model(jordan_wigner(h_, 4));
  return minimize(model, o, oracle_.state);
}

GroundRecord Pipeline::ground_record(const VqeResult& r) const {
  const VqeRun& best = r.best_run();
  return GroundRecord{best.params, best.energy, best.std_error, best.theoretical,
                      fidelity(run_circuit(build_ansatz(best.params)), oracle_.state)};
}

StateVector Pipeline::qeom_ground(const GroundRecord* vqe_ground) const {
  if (config_.ground == GroundSource::oracle) return oracle_.state;
  if (!vqe_ground) throw ValidationError("ground parameters are required unless ground=oracle");
  return run_circuit(build_ansatz(vqe_ground->params));
}

QeomSolution Pipeline::qeom(const StateVector& ground, QeomMatrices* matrices) const {
  QeomOptions o;
  o.mode = config_.mode;
  o.sampling = sampling_;
  o.realizations = config_.n_realizations;
  o.seed = derive_seed(config_.seed, {1});
  return run_qeom(ground, default_charged_basis(), h_, o, config_.effective_truncation(),
                  matrices);
}

ProbePair Pipeline::probes(const std::string& k) const {
  return k_space_pair(parse_k(k), config_.spins);
}

std::vector<SpectroscopicAmplitude> Pipeline::amplitudes(const StateVector& ground,
                                                         const QeomSolution& solution,
                                                         const std::string& k) const {
  AmplitudeOptions o;
  o.mode = config_.mode;
  o.sampling = sampling_;
  o.realizations = config_.n_realizations;
  o.seed = derive_seed(config_.seed, {2, k_index(k)});
  return qgf::amplitudes(ground, solution, default_charged_basis(), probes(k), o);
}

GreensFunctionData Pipeline::exact_gf(const std::string& k) const {
  const ProbePair p = probes(k);
  return lehmann_gf(exact_poles(h_, oracle_, p.a, p.b), grid(), config_.eta);
}

}  // namespace qgf
