#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qgf/exactdiag.hpp"
#include "qgf/greens.hpp"
#include "qgf/qeom.hpp"
#include "qgf/vqe.hpp"

namespace qgf {

/// Shortest decimal that parses back to the same double ("nan", "inf" included).
std::string format_double(double v);
double parse_double(std::string_view s);

/// Comma-separated table with exactly one header row. Cells never contain
/// commas, quotes or newlines.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a named column; throws ValidationError if absent.
  std::size_t column(std::string_view name) const;
  friend bool operator==(const CsvTable&, const CsvTable&) = default;
};

std::string to_csv(const CsvTable& t);
CsvTable parse_csv(std::string_view text);
void write_text(const std::filesystem::path& path, const std::string& text);
/// Throws ValidationError when the file cannot be read.
std::string read_text(const std::filesystem::path& path);

// Typed tables. Each `*_table` function is the writer; the matching `parse_*`
// reads it back exactly.

/// restart,iteration,energy,std_error,theta1,phi1,theta2,phi2,theoretical,fidelity
CsvTable vqe_trace_table(const VqeResult& r);
struct TraceEntry {
  int restart = 0;
  VqeTraceRow row;
};
std::vector<TraceEntry> parse_vqe_trace(const CsvTable& t);

/// theta1,phi1,theta2,phi2,energy,std_error,theoretical,fidelity
struct GroundRecord {
  AnsatzParameters params;
  double energy = 0.0;
  double std_error = 0.0;
  double theoretical = 0.0;
  double fidelity = 0.0;
  friend bool operator==(const GroundRecord&, const GroundRecord&) = default;
};
CsvTable ground_params_table(const GroundRecord& g);
GroundRecord parse_ground_params(const CsvTable& t);

/// row,col,re_a,im_a,err_a,re_b,im_b,err_b. Mode, realizations and shots
/// live in the run summary, not in this file.
CsvTable qeom_matrices_table(const QeomMatrices& m);
QeomMatrices parse_qeom_matrices(const CsvTable& t);

/// state,sector,eigenvalue,excitation_energy,refined,refined_std_error,
/// b_norm,residual, then re_x<mu>,im_x<mu> per basis operator.
CsvTable qeom_solution_table(const QeomSolution& s);
QeomSolution parse_qeom_solution(const CsvTable& t);

/// state_i,state_j,overlap
CsvTable overlaps_table(const Eigen::MatrixXd& overlaps);

/// state,sector,energy,re_gamma_a,im_gamma_a,err_gamma_a,re_gamma_b,im_gamma_b,
/// err_gamma_b,re_residue,im_residue
CsvTable amplitudes_table(const std::vector<SpectroscopicAmplitude>& amps);

/// omega,re_g,im_g,spectral, plus re_g_exact,im_g_exact,spectral_exact when
/// `exact` is given (same grid required).
CsvTable gf_table(const GreensFunctionData& g, const GreensFunctionData* exact = nullptr);
struct GfRows {
  GreensFunctionData g;
  std::optional<GreensFunctionData> exact;
};
/// eta is not stored in the file and is left at zero.
GfRows parse_gf(const CsvTable& t);

/// n_particles,sz,level,eigenvalue
CsvTable sectors_table(const std::vector<SectorSpectrum>& spectra);

enum class GroundSource { vqe, oracle };
std::string to_string(GroundSource g);
GroundSource parse_ground_source(std::string_view s);

/// Everything a run depends on. Defaults reproduce the exact-mode dimer study.
struct RunConfig {
  double U = 3.0;
  double t = 1.0;
  double eta = 0.5;
  double omega_min = -10.0;
  double omega_max = 10.0;
  double omega_step = 0.01;
  EnergyMode mode = EnergyMode::exact;
  std::uint64_t shots = 8192;
  int n_realizations = 13;
  std::optional<OptimizerKind> optimizer;  // simplex in exact mode, spsa when sampled
  int n_restarts = 10;
  int max_iter = 500;
  std::uint64_t seed = 0;
  std::vector<std::string> k_values{"0", "pi"};
  std::pair<Spin, Spin> spins{Spin::down, Spin::down};
  std::optional<ReadoutNoise> readout_noise;
  bool mitigation = false;
  std::optional<double> truncation;  // default depends on mode
  GroundSource ground = GroundSource::vqe;

  OptimizerKind effective_optimizer() const;
  double effective_truncation() const;
  /// Throws ValidationError on any violated invariant.
  void validate() const;
};

/// "0" -> 0, "pi" -> pi; anything else throws ValidationError.
double parse_k(std::string_view s);
std::string spin_to_string(Spin s);
Spin parse_spin(std::string_view s);

/// JSON text of the config; every field is written.
std::string config_to_json(const RunConfig& c);
/// Reads a JSON object; absent keys keep their defaults, unknown keys throw.
RunConfig config_from_json(std::string_view text);

}  // namespace qgf
