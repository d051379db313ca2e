#include "qgf/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "qgf/errors.hpp"

namespace qgf {

namespace {

using nlohmann::json;

std::string fmt_int(long long v) { return std::to_string(v); }

long long parse_int(std::string_view s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ValidationError("malformed integer '" + std::string(s) + "'");
  }
  return v;
}

struct RowReader {
  const CsvTable& table;
  const std::vector<std::string>& row;
  double num(std::string_view name) const { return parse_double(row[table.column(name)]); }
  long long integer(std::string_view name) const { return parse_int(row[table.column(name)]); }
  const std::string& text(std::string_view name) const { return row[table.column(name)]; }
};

void require_header(const CsvTable& t, const std::vector<std::string>& expected) {
  if (t.header.size() < expected.size() ||
      !std::equal(expected.begin(), expected.end(), t.header.begin())) {
    throw ValidationError("unexpected CSV header");
  }
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw NumericalError("double formatting failed");
  return std::string(buf, ptr);
}

double parse_double(std::string_view s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ValidationError("malformed number '" + std::string(s) + "'");
  }
  return v;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ValidationError("missing CSV column '" + std::string(name) + "'");
}

std::string to_csv(const CsvTable& t) {
  auto line = [](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) s += ',';
      s += cells[i];
    }
    return s + '\n';
  };
  std::string out = line(t.header);
  for (const auto& r : t.rows) {
    if (r.size() != t.header.size()) throw ValidationError("CSV row width differs from header");
    out += line(r);
  }
  return out;
}

CsvTable parse_csv(std::string_view text) {
  auto split = [](std::string_view l) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = l.find(',', start);
      cells.emplace_back(l.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return cells;
  };
  CsvTable t;
  bool first = true;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view l = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    if (l.empty()) continue;
    if (first) {
      t.header = split(l);
      first = false;
    } else {
      t.rows.push_back(split(l));
      if (t.rows.back().size() != t.header.size()) {
        throw ValidationError("CSV row width differs from header");
      }
    }
  }
  if (first) throw ValidationError("CSV text has no header");
  return t;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + path.string());
  f << text;
  if (!f) throw ValidationError("cannot write " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

CsvTable vqe_trace_table(const VqeResult& r) {
  CsvTable t{{"restart", "iteration", "energy", "std_error", "theta1", "phi1", "theta2", "phi2",
              "theoretical", "fidelity"},
             {}};
  for (const auto& run : r.runs) {
    for (const auto& row : run.trace) {
      t.rows.push_back({fmt_int(run.restart), fmt_int(row.iteration), format_double(row.energy),
                        format_double(row.std_error), format_double(row.params.theta1),
                        format_double(row.params.phi1), format_double(row.params.theta2),
                        format_double(row.params.phi2), format_double(row.theoretical),
                        format_double(row.fidelity)});
    }
  }
  return t;
}

std::vector<TraceEntry> parse_vqe_trace(const CsvTable& t) {
  std::vector<TraceEntry> out;
  for (const auto& row : t.rows) {
    const RowReader r{t, row};
    out.push_back({static_cast<int>(r.integer("restart")),
                   VqeTraceRow{static_cast<int>(r.integer("iteration")), r.num("energy"),
                               r.num("std_error"),
                               AnsatzParameters{r.num("theta1"), r.num("phi1"), r.num("theta2"),
                                                r.num("phi2")},
                               r.num("theoretical"), r.num("fidelity")}});
  }
  return out;
}

CsvTable ground_params_table(const GroundRecord& g) {
  return CsvTable{{"theta1", "phi1", "theta2", "phi2", "energy", "std_error", "theoretical",
                   "fidelity"},
                  {{format_double(g.params.theta1), format_double(g.params.phi1),
                    format_double(g.params.theta2), format_double(g.params.phi2),
                    format_double(g.energy), format_double(g.std_error),
                    format_double(g.theoretical), format_double(g.fidelity)}}};
}

GroundRecord parse_ground_params(const CsvTable& t) {
  if (t.rows.size() != 1) throw ValidationError("ground parameter file must have one data row");
  const RowReader r{t, t.rows.front()};
  return GroundRecord{AnsatzParameters{r.num("theta1"), r.num("phi1"), r.num("theta2"),
                                       r.num("phi2")},
                      r.num("energy"), r.num("std_error"), r.num("theoretical"),
                      r.num("fidelity")};
}

CsvTable qeom_matrices_table(const QeomMatrices& m) {
  CsvTable t{{"row", "col", "re_a", "im_a", "err_a", "re_b", "im_b", "err_b"}, {}};
  for (Eigen::Index i = 0; i < m.a.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.a.cols(); ++j) {
      t.rows.push_back({fmt_int(i), fmt_int(j), format_double(m.a(i, j).real()),
                        format_double(m.a(i, j).imag()), format_double(m.a_err(i, j)),
                        format_double(m.b(i, j).real()), format_double(m.b(i, j).imag()),
                        format_double(m.b_err(i, j))});
    }
  }
  return t;
}

QeomMatrices parse_qeom_matrices(const CsvTable& t) {
  require_header(t, {"row", "col", "re_a", "im_a", "err_a", "re_b", "im_b", "err_b"});
  const auto k = static_cast<Eigen::Index>(std::llround(std::sqrt(double(t.rows.size()))));
  if (k == 0 || static_cast<std::size_t>(k * k) != t.rows.size()) {
    throw ValidationError("matrix file must hold k*k entries");
  }
  QeomMatrices m{Eigen::MatrixXcd::Zero(k, k), Eigen::MatrixXcd::Zero(k, k),
                 Eigen::MatrixXd::Zero(k, k), Eigen::MatrixXd::Zero(k, k)};
  for (const auto& row : t.rows) {
    const RowReader r{t, row};
    const auto i = r.integer("row");
    const auto j = r.integer("col");
    if (i < 0 || j < 0 || i >= k || j >= k) throw ValidationError("matrix index out of range");
    m.a(i, j) = {r.num("re_a"), r.num("im_a")};
    m.b(i, j) = {r.num("re_b"), r.num("im_b")};
    m.a_err(i, j) = r.num("err_a");
    m.b_err(i, j) = r.num("err_b");
  }
  return m;
}

CsvTable qeom_solution_table(const QeomSolution& s) {
  CsvTable t{{"state", "sector", "eigenvalue", "excitation_energy", "refined",
              "refined_std_error", "b_norm", "residual"},
             {}};
  const Eigen::Index k = s.states.empty() ? 0 : s.states.front().x.size();
  for (Eigen::Index mu = 0; mu < k; ++mu) {
    t.header.push_back("re_x" + std::to_string(mu));
    t.header.push_back("im_x" + std::to_string(mu));
  }
  for (std::size_t i = 0; i < s.states.size(); ++i) {
    const QeomState& st = s.states[i];
    std::vector<std::string> row{fmt_int(static_cast<long long>(i)), to_string(st.sector),
                                 format_double(st.eigenvalue), format_double(st.excitation_energy()),
                                 format_double(st.refined), format_double(st.refined_std_error),
                                 format_double(st.b_norm), format_double(st.residual)};
    for (Eigen::Index mu = 0; mu < k; ++mu) {
      row.push_back(format_double(st.x[mu].real()));
      row.push_back(format_double(st.x[mu].imag()));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

QeomSolution parse_qeom_solution(const CsvTable& t) {
  require_header(t, {"state", "sector", "eigenvalue", "excitation_energy", "refined",
                     "refined_std_error", "b_norm", "residual"});
  const std::size_t extra = t.header.size() - 8;
  if (extra % 2 != 0) throw ValidationError("coefficient columns must come in re/im pairs");
  const auto k = static_cast<Eigen::Index>(extra / 2);
  QeomSolution s;
  for (const auto& row : t.rows) {
    const RowReader r{t, row};
    if (r.integer("state") != static_cast<long long>(s.states.size())) {
      throw ValidationError("solution states must be numbered 0, 1, ...");
    }
    QeomState st;
    st.sector = parse_sector(r.text("sector"));
    st.eigenvalue = r.num("eigenvalue");
    st.refined = r.num("refined");
    st.refined_std_error = r.num("refined_std_error");
    st.b_norm = r.num("b_norm");
    st.residual = r.num("residual");
    st.x.resize(k);
    for (Eigen::Index mu = 0; mu < k; ++mu) {
      st.x[mu] = {r.num("re_x" + std::to_string(mu)), r.num("im_x" + std::to_string(mu))};
    }
    s.states.push_back(std::move(st));
  }
  s.retained_rank = static_cast<int>(s.states.size());
  return s;
}

CsvTable overlaps_table(const Eigen::MatrixXd& overlaps) {
  CsvTable t{{"state_i", "state_j", "overlap"}, {}};
  for (Eigen::Index i = 0; i < overlaps.rows(); ++i) {
    for (Eigen::Index j = 0; j < overlaps.cols(); ++j) {
      t.rows.push_back({fmt_int(i), fmt_int(j), format_double(overlaps(i, j))});
    }
  }
  return t;
}

CsvTable amplitudes_table(const std::vector<SpectroscopicAmplitude>& amps) {
  CsvTable t{{"state", "sector", "energy", "re_gamma_a", "im_gamma_a", "err_gamma_a",
              "re_gamma_b", "im_gamma_b", "err_gamma_b", "re_residue", "im_residue"},
             {}};
  for (const auto& a : amps) {
    const Complex res = a.residue();
    t.rows.push_back({fmt_int(static_cast<long long>(a.state)), to_string(a.sector),
                      format_double(a.energy), format_double(a.gamma_a.real()),
                      format_double(a.gamma_a.imag()), format_double(a.std_error_a),
                      format_double(a.gamma_b.real()), format_double(a.gamma_b.imag()),
                      format_double(a.std_error_b), format_double(res.real()),
                      format_double(res.imag())});
  }
  return t;
}

CsvTable gf_table(const GreensFunctionData& g, const GreensFunctionData* exact) {
  if (exact && exact->omega != g.omega) throw ValidationError("exact curve uses another grid");
  CsvTable t{{"omega", "re_g", "im_g", "spectral"}, {}};
  if (exact) {
    for (const char* h : {"re_g_exact", "im_g_exact", "spectral_exact"}) t.header.push_back(h);
  }
  const auto a = spectral_function(g);
  const auto ae = exact ? spectral_function(*exact) : std::vector<double>{};
  for (std::size_t i = 0; i < g.omega.size(); ++i) {
    std::vector<std::string> row{format_double(g.omega[i]), format_double(g.g[i].real()),
                                 format_double(g.g[i].imag()), format_double(a[i])};
    if (exact) {
      row.push_back(format_double(exact->g[i].real()));
      row.push_back(format_double(exact->g[i].imag()));
      row.push_back(format_double(ae[i]));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

GfRows parse_gf(const CsvTable& t) {
  require_header(t, {"omega", "re_g", "im_g", "spectral"});
  const bool has_exact = t.header.size() == 7;
  if (!has_exact && t.header.size() != 4) throw ValidationError("unexpected GF columns");
  GfRows out;
  if (has_exact) out.exact.emplace();
  for (const auto& row : t.rows) {
    const RowReader r{t, row};
    out.g.omega.push_back(r.num("omega"));
    out.g.g.emplace_back(r.num("re_g"), r.num("im_g"));
    if (has_exact) {
      out.exact->omega.push_back(r.num("omega"));
      out.exact->g.emplace_back(r.num("re_g_exact"), r.num("im_g_exact"));
    }
  }
  return out;
}

CsvTable sectors_table(const std::vector<SectorSpectrum>& spectra) {
  CsvTable t{{"n_particles", "sz", "level", "eigenvalue"}, {}};
  for (const auto& s : spectra) {
    for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
      t.rows.push_back({fmt_int(s.n_particles), format_double(s.sz()), fmt_int(i),
                        format_double(s.eigenvalues[i])});
    }
  }
  return t;
}

std::string to_string(GroundSource g) { return g == GroundSource::vqe ? "vqe" : "oracle"; }

GroundSource parse_ground_source(std::string_view s) {
  if (s == "vqe") return GroundSource::vqe;
  if (s == "oracle") return GroundSource::oracle;
  throw ValidationError("ground must be 'vqe' or 'oracle'");
}

double parse_k(std::string_view s) {
  if (s == "0") return 0.0;
  if (s == "pi") return std::numbers::pi;
  throw ValidationError("k must be '0' or 'pi'");
}

std::string spin_to_string(Spin s) { return s == Spin::up ? "up" : "down"; }

Spin parse_spin(std::string_view s) {
  if (s == "up") return Spin::up;
  if (s == "down") return Spin::down;
  throw ValidationError("spin must be 'up' or 'down'");
}

OptimizerKind RunConfig::effective_optimizer() const {
  if (optimizer) return *optimizer;
  return mode == EnergyMode::exact ? OptimizerKind::simplex : OptimizerKind::spsa;
}

double RunConfig::effective_truncation() const {
  if (truncation) return *truncation;
  return mode == EnergyMode::exact ? kExactTruncation : kSampledTruncation;
}

void RunConfig::validate() const {
  if (!std::isfinite(U) || !std::isfinite(t)) throw ValidationError("U and t must be finite");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ValidationError("eta must be positive");
  if (!(omega_min < omega_max)) throw ValidationError("omega_min must be below omega_max");
  if (!(omega_step > 0.0)) throw ValidationError("omega_step must be positive");
  if (shots < 1) throw ValidationError("shots must be at least 1");
  if (n_realizations < 1) throw ValidationError("n_realizations must be at least 1");
  if (n_restarts < 1) throw ValidationError("n_restarts must be at least 1");
  if (max_iter < 1) throw ValidationError("max_iter must be at least 1");
  if (k_values.empty()) throw ValidationError("at least one k value is required");
  for (const auto& k : k_values) parse_k(k);
  if (readout_noise) readout_noise->validate();
  if (truncation && !(*truncation >= 0.0)) {
    throw ValidationError("truncation threshold must be non-negative");
  }
  frequency_grid(omega_min, omega_max, omega_step);
}

std::string config_to_json(const RunConfig& c) {
  json j{{"U", c.U},
         {"t", c.t},
         {"eta", c.eta},
         {"omega_min", c.omega_min},
         {"omega_max", c.omega_max},
         {"omega_step", c.omega_step},
         {"mode", to_string(c.mode)},
         {"shots", c.shots},
         {"n_realizations", c.n_realizations},
         {"optimizer", to_string(c.effective_optimizer())},
         {"n_restarts", c.n_restarts},
         {"max_iter", c.max_iter},
         {"seed", c.seed},
         {"k_values", c.k_values},
         {"spins", {spin_to_string(c.spins.first), spin_to_string(c.spins.second)}},
         {"readout_noise", c.readout_noise
                               ? json{{"p01", c.readout_noise->p01}, {"p10", c.readout_noise->p10}}
                               : json(nullptr)},
         {"mitigation", c.mitigation},
         {"truncation", c.effective_truncation()},
         {"ground", to_string(c.ground)}};
  return j.dump(2) + "\n";
}

RunConfig config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  RunConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "U") c.U = v.get<double>();
      else if (key == "t") c.t = v.get<double>();
      else if (key == "eta") c.eta = v.get<double>();
      else if (key == "omega_min") c.omega_min = v.get<double>();
      else if (key == "omega_max") c.omega_max = v.get<double>();
      else if (key == "omega_step") c.omega_step = v.get<double>();
      else if (key == "mode") c.mode = parse_energy_mode(v.get<std::string>());
      else if (key == "shots") c.shots = v.get<std::uint64_t>();
      else if (key == "n_realizations") c.n_realizations = v.get<int>();
      else if (key == "optimizer") c.optimizer = parse_optimizer(v.get<std::string>());
      else if (key == "n_restarts") c.n_restarts = v.get<int>();
      else if (key == "max_iter") c.max_iter = v.get<int>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "k_values") c.k_values = v.get<std::vector<std::string>>();
      else if (key == "spins") {
        const auto s = v.get<std::vector<std::string>>();
        if (s.size() != 2) throw ValidationError("spins must list two entries");
        c.spins = {parse_spin(s[0]), parse_spin(s[1])};
      } else if (key == "readout_noise") {
        if (v.is_null()) {
          c.readout_noise.reset();
        } else {
          c.readout_noise = ReadoutNoise{v.at("p01").get<double>(), v.at("p10").get<double>()};
        }
      } else if (key == "mitigation") c.mitigation = v.get<bool>();
      else if (key == "truncation") c.truncation = v.get<double>();
      else if (key == "ground") c.ground = parse_ground_source(v.get<std::string>());
      else throw ValidationError("unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config value has the wrong type: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace qgf
