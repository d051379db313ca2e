// Command-line driver: vqe, qeom, greens, exact and run.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qgf/errors.hpp"
#include "qgf/io.hpp"
#include "qgf/pipeline.hpp"

#ifndef QGF_VERSION
#define QGF_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qgf;

namespace {

constexpr int kUsageError = 2;
constexpr int kNumericalError = 3;

struct Overrides {
  std::string config_path;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> shots;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> k;
  std::optional<double> eta;
  bool with_exact = false;
  std::string out_dir = "out";
  std::optional<std::string> spins;
  std::optional<std::string> ground;
  std::optional<std::string> optimizer;
  std::optional<int> restarts;
  std::optional<int> max_iter;
  std::optional<int> realizations;
  std::optional<double> p01;
  std::optional<double> p10;
  bool mitigate = false;
  std::optional<double> truncation;
  std::string params_path;
  std::string solution_path;
  std::optional<std::string> gate_noise;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON run configuration");
  cmd->add_option("--mode", o.mode, "exact or sampled");
  cmd->add_option("--shots", o.shots, "shots per measured circuit");
  cmd->add_option("--seed", o.seed, "base seed");
  cmd->add_option("--k", o.k, "momenta to evaluate: 0 and/or pi")->delimiter(',');
  cmd->add_option("--eta", o.eta, "Lorentzian broadening");
  cmd->add_flag("--with-exact", o.with_exact, "add oracle columns to GF files");
  cmd->add_option("--out-dir", o.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--spins", o.spins, "spin pair of the GF element, e.g. up,down");
  cmd->add_option("--ground", o.ground, "qEOM reference state: vqe or oracle");
  cmd->add_option("--optimizer", o.optimizer, "simplex or spsa");
  cmd->add_option("--restarts", o.restarts, "VQE restarts");
  cmd->add_option("--max-iter", o.max_iter, "VQE iterations per restart");
  cmd->add_option("--realizations", o.realizations, "qEOM realizations in sampled mode");
  cmd->add_option("--readout-p01", o.p01, "readout flip probability 0->1");
  cmd->add_option("--readout-p10", o.p10, "readout flip probability 1->0");
  cmd->add_flag("--mitigate", o.mitigate, "invert a measured readout calibration");
  cmd->add_option("--truncation", o.truncation, "metric truncation threshold");
  cmd->add_option("--gate-noise", o.gate_noise, "not supported")->group("");
}

RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : config_from_json(read_text(o.config_path));
  if (o.mode) c.mode = parse_energy_mode(*o.mode);
  if (o.shots) c.shots = *o.shots;
  if (o.seed) c.seed = *o.seed;
  if (!o.k.empty()) c.k_values = o.k;
  if (o.eta) c.eta = *o.eta;
  if (o.spins) {
    const auto comma = o.spins->find(',');
    if (comma == std::string::npos) throw ValidationError("--spins expects two comma-separated spins");
    c.spins = {parse_spin(o.spins->substr(0, comma)), parse_spin(o.spins->substr(comma + 1))};
  }
  if (o.ground) c.ground = parse_ground_source(*o.ground);
  if (o.optimizer) c.optimizer = parse_optimizer(*o.optimizer);
  if (o.restarts) c.n_restarts = *o.restarts;
  if (o.max_iter) c.max_iter = *o.max_iter;
  if (o.realizations) c.n_realizations = *o.realizations;
  if (o.p01 || o.p10) c.readout_noise = ReadoutNoise{o.p01.value_or(0.0), o.p10.value_or(0.0)};
  if (o.mitigate) c.mitigation = true;
  if (o.truncation) c.truncation = *o.truncation;
  c.validate();
  return c;
}

// Writes one artifact and records its name, relative to the output
// directory, in the summary.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }
  fs::path path(const std::string& name) const { return dir_ / name; }
  void csv(const std::string& name, const CsvTable& t) {
    write_text(path(name), to_csv(t));
    files_.push_back(name);
  }
  void summary(const std::string& name, json j, double seconds) {
    files_.push_back(name);
    j["files"] = files_;
    j["wall_time_s"] = seconds;
    write_text(path(name), j.dump(2) + "\n");
  }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

json base_summary(const std::string& stage, const Pipeline& p) {
  return json{{"stage", stage},
              {"version", QGF_VERSION},
              {"config", json::parse(config_to_json(p.config()))},
              {"oracle", {{"ground_energy", p.oracle().energy}}}};
}

std::string measured_theoretical(double measured, double theoretical) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f (%.4f)", measured, theoretical);
  return buf;
}

json vqe_json(const VqeResult& r, const GroundRecord& g) {
  json restarts = json::array();
  for (const auto& run : r.runs) {
    restarts.push_back({{"restart", run.restart},
                        {"energy", run.energy},
                        {"std_error", run.std_error},
                        {"theoretical", run.theoretical},
                        {"iterations", run.iterations},
                        {"converged", run.converged}});
  }
  return json{{"energy", g.energy},
              {"std_error", g.std_error},
              {"theoretical", g.theoretical},
              {"fidelity", g.fidelity},
              {"measured_theoretical", measured_theoretical(g.energy, g.theoretical)},
              {"params",
               {{"theta1", g.params.theta1},
                {"phi1", g.params.phi1},
                {"theta2", g.params.theta2},
                {"phi2", g.params.phi2}}},
              {"best_restart", r.best},
              {"restarts", restarts}};
}

json qeom_json(const QeomSolution& s, const Eigen::MatrixXd& overlaps) {
  json states = json::array();
  for (const auto& st : s.states) {
    states.push_back({{"sector", to_string(st.sector)},
                      {"eigenvalue", st.eigenvalue},
                      {"excitation_energy", st.excitation_energy()},
                      {"refined", st.refined},
                      {"refined_std_error", st.refined_std_error},
                      {"b_norm", st.b_norm},
                      {"residual", st.residual}});
  }
  double worst = 0.0;
  for (Eigen::Index i = 0; i < overlaps.rows(); ++i) {
    for (Eigen::Index j = 0; j < overlaps.cols(); ++j) {
      if (i != j) worst = std::max(worst, overlaps(i, j));
    }
  }
  json out{{"retained_rank", s.retained_rank}, {"states", states}, {"max_overlap", worst}};
  if (s.threshold > 0.0) out["threshold"] = s.threshold;
  if (s.a_norm > 0.0) out["a_norm"] = s.a_norm;
  return out;
}

std::string k_tag(const std::string& k) { return k == "0" ? "k0" : "kpi"; }

json greens_stage(const Pipeline& p, const StateVector& ground, const QeomSolution& sol,
                  bool with_exact, Outputs& out) {
  json per_k = json::array();
  for (const auto& k : p.config().k_values) {
    const auto amps = p.amplitudes(ground, sol, k);
    const GreensFunctionData g = qeom_gf(amps, p.grid(), p.config().eta);
    std::optional<GreensFunctionData> ex;
    if (with_exact) ex = p.exact_gf(k);
    out.csv("gf_" + k_tag(k) + ".csv", gf_table(g, ex ? &*ex : nullptr));
    out.csv("amplitudes_" + k_tag(k) + ".csv", amplitudes_table(amps));
    json a = json::array();
    for (const auto& amp : amps) {
      const Complex r = amp.residue();
      a.push_back({{"state", amp.state},
                   {"sector", to_string(amp.sector)},
                   {"energy", amp.energy},
                   {"gamma_a", {amp.gamma_a.real(), amp.gamma_a.imag()}},
                   {"gamma_b", {amp.gamma_b.real(), amp.gamma_b.imag()}},
                   {"residue", {r.real(), r.imag()}}});
    }
    const Complex total = residue_sum(amps);
    per_k.push_back({{"k", k},
                     {"probes", p.probes(k).label},
                     {"residue_sum", {total.real(), total.imag()}},
                     {"amplitudes", a}});
  }
  return per_k;
}

GroundRecord load_ground(const Overrides& o) {
  const fs::path path =
      o.params_path.empty() ? fs::path(o.out_dir) / "ground_params.csv" : fs::path(o.params_path);
  return parse_ground_params(parse_csv(read_text(path)));
}

int cmd_vqe(const Overrides& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const Pipeline p(resolve(o));
  Outputs out(o.out_dir);
  const VqeResult r = p.vqe();
  const GroundRecord g = p.ground_record(r);
  out.csv("vqe_trace.csv", vqe_trace_table(r));
  out.csv("ground_params.csv", ground_params_table(g));
  json s = base_summary("vqe", p);
  s["vqe"] = vqe_json(r, g);
  out.summary("summary_vqe.json", s,
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  std::cout << "VQE energy " << format_double(g.energy) << ", theoretical "
            << format_double(g.theoretical) << ", fidelity " << format_double(g.fidelity) << "\n";
  return 0;
}

void write_qeom(const StateVector& ground, const QeomSolution& sol,
                const QeomMatrices& m, Outputs& out, json& s) {
  const Eigen::MatrixXd ov = state_overlaps(sol, default_charged_basis(), ground);
  out.csv("qeom_matrices.csv", qeom_matrices_table(m));
  out.csv("qeom_solution.csv", qeom_solution_table(sol));
  out.csv("qeom_overlaps.csv", overlaps_table(ov));
  s["qeom"] = qeom_json(sol, ov);
  s["qeom"]["mode"] = to_string(m.mode);
  s["qeom"]["realizations"] = m.realizations;
  s["qeom"]["shots"] = m.shots;
}

int cmd_qeom(const Overrides& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const Pipeline p(resolve(o));
  std::optional<GroundRecord> g;
  if (p.config().ground == GroundSource::vqe) g = load_ground(o);
  const StateVector ground = p.qeom_ground(g ? &*g : nullptr);
  Outputs out(o.out_dir);
  QeomMatrices m;
  const QeomSolution sol = p.qeom(ground, &m);
  json s = base_summary("qeom", p);
  write_qeom(ground, sol, m, out, s);
  out.summary("summary_qeom.json", s,
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  for (const auto& st : sol.states) {
    std::cout << to_string(st.sector) << " " << format_double(st.eigenvalue) << " refined "
              << format_double(st.refined) << "\n";
  }
  return 0;
}

int cmd_greens(const Overrides& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const Pipeline p(resolve(o));
  std::optional<GroundRecord> g;
  if (p.config().ground == GroundSource::vqe) g = load_ground(o);
  const StateVector ground = p.qeom_ground(g ? &*g : nullptr);
  const fs::path sol_path = o.solution_path.empty() ? fs::path(o.out_dir) / "qeom_solution.csv"
                                                    : fs::path(o.solution_path);
  const QeomSolution sol = parse_qeom_solution(parse_csv(read_text(sol_path)));
  Outputs out(o.out_dir);
  json s = base_summary("greens", p);
  s["greens"] = greens_stage(p, ground, sol, o.with_exact, out);
  out.summary("summary_greens.json", s,
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return 0;
}

int cmd_exact(const Overrides& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const Pipeline p(resolve(o));
  Outputs out(o.out_dir);
  out.csv("exact_sectors.csv", sectors_table(sector_spectra(p.hamiltonian())));
  for (const auto& k : p.config().k_values) {
    out.csv("exact_gf_" + k_tag(k) + ".csv", gf_table(p.exact_gf(k)));
  }
  json s = base_summary("exact", p);
  out.summary("summary_exact.json", s,
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  std::cout << "ground energy " << format_double(p.oracle().energy) << "\n";
  return 0;
}

int cmd_run(const Overrides& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const Pipeline p(resolve(o));
  Outputs out(o.out_dir);
  json s = base_summary("run", p);

  const VqeResult r = p.vqe();
  const GroundRecord g = p.ground_record(r);
  out.csv("vqe_trace.csv", vqe_trace_table(r));
  out.csv("ground_params.csv", ground_params_table(g));
  s["vqe"] = vqe_json(r, g);

  const StateVector ground = p.qeom_ground(&g);
  QeomMatrices m;
  const QeomSolution sol = p.qeom(ground, &m);
  write_qeom(ground, sol, m, out, s);

  s["greens"] = greens_stage(p, ground, sol, o.with_exact, out);
  out.summary("summary.json", s,
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  std::cout << "VQE " << s["vqe"]["measured_theoretical"].get<std::string>() << "\n";
  for (const auto& st : sol.states) {
    std::cout << to_string(st.sector) << " " << format_double(st.eigenvalue) << " refined "
              << format_double(st.refined) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Green's functions of the Hubbard dimer from VQE and qEOM"};
  app.set_version_flag("--version", QGF_VERSION);
  app.require_subcommand(1);
  Overrides o;
  struct Entry {
    const char* name;
    const char* help;
    int (*fn)(const Overrides&);
  };
  const Entry entries[] = {
      {"vqe", "prepare the ground state", cmd_vqe},
      {"qeom", "solve the charged-excitation problem", cmd_qeom},
      {"greens", "assemble Green's functions from a qEOM solution", cmd_greens},
      {"exact", "exact-diagonalization reference", cmd_exact},
      {"run", "vqe, qeom and greens in one go", cmd_run},
  };
  std::vector<std::pair<CLI::App*, const Entry*>> cmds;
  for (const auto& e : entries) {
    CLI::App* c = app.add_subcommand(e.name, e.help);
    add_common(c, o);
    if (std::string(e.name) == "qeom" || std::string(e.name) == "greens") {
      c->add_option("--params", o.params_path, "ground parameter file from the vqe stage");
    }
    if (std::string(e.name) == "greens") {
      c->add_option("--solution", o.solution_path, "solution file from the qeom stage");
    }
    cmds.emplace_back(c, &e);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }
  if (o.gate_noise) {
    std::cerr << "error: gate-level noise is not modeled; only readout bit flips "
                 "(--readout-p01, --readout-p10) are supported\n";
    return kUsageError;
  }

  try {
    for (const auto& [c, e] : cmds) {
      if (c->parsed()) return e->fn(o);
    }
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}
