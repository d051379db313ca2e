#include "qgf/measurement.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <random>
#include <sstream>

#include "qgf/errors.hpp"
#include "qgf/seed.hpp"

namespace qgf {

namespace {

int parity(std::uint32_t v) { return std::popcount(v) & 1; }

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ValidationError(std::string(name) + " must lie in [0, 1]");
  }
}

std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ValidationError("malformed integer '" + std::string(s) + "'");
  }
  return v;
}

// Value of key=<value> inside a header line.
std::string_view header_field(std::string_view line, std::string_view key) {
  const std::string tag = std::string(key) + "=";
  const auto pos = line.find(tag);
  if (pos == std::string_view::npos) throw ValidationError("counts header lacks " + tag);
  auto rest = line.substr(pos + tag.size());
  return rest.substr(0, rest.find(' '));
}

Eigen::VectorXd group_distribution(const StateVector& state, const MeasurementGroup& g,
                                   const SamplingOptions& options, std::uint64_t seed) {
  const StateVector rotated = run_circuit(g.basis_change, state);
  CountsTable counts = sample_counts(rotated, options.shots, derive_seed(seed, {0}));
  if (options.noise.active()) {
    counts = apply_readout_error(counts, options.noise.p01, options.noise.p10,
                                 derive_seed(seed, {1}));
  }
  if (options.calibration.size() > 0) return mitigate_readout(counts, options.calibration);
  return counts.frequencies();
}

}  // namespace

CountsTable::CountsTable(int n_qubits, std::uint64_t seed) : n_(n_qubits), seed_(seed) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) throw DimensionError("unsupported register size");
  counts_.assign(std::size_t{1} << n_qubits, 0);
}

std::uint64_t CountsTable::count(std::string_view bits) const {
  if (static_cast<int>(bits.size()) != n_) throw DimensionError("bitstring length mismatch");
  return counts_[bitstring_to_index(bits)];
}

void CountsTable::add(std::uint32_t index, std::uint64_t n) {
  if (index >= counts_.size()) throw DimensionError("basis index out of range");
  counts_[index] += n;
  total_ += n;
}

Eigen::VectorXd CountsTable::frequencies() const {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(counts_.size()));
  if (total_ == 0) return f;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    f[static_cast<Eigen::Index>(i)] =
        static_cast<double>(counts_[i]) / static_cast<double>(total_);
  }
  return f;
}

std::string CountsTable::to_string() const {
  std::ostringstream os;
  os << "# qubits=" << n_ << " shots=" << total_ << " seed=" << seed_ << "\n";
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (counts_[i] == 0) continue;
    os << index_to_bitstring(static_cast<std::uint32_t>(i), n_) << " " << counts_[i] << "\n";
  }
  return os.str();
}

CountsTable CountsTable::parse(std::string_view text) {
  auto next_line = [&text]() {
    const auto end = text.find('\n');
    std::string_view line = text.substr(0, end);
    text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
    return line;
  };
  const std::string_view header = next_line();
  if (!header.starts_with("#")) throw ValidationError("counts text must start with a header");
  const int n = static_cast<int>(parse_u64(header_field(header, "qubits")));
  const std::uint64_t shots = parse_u64(header_field(header, "shots"));
  CountsTable table(n, parse_u64(header_field(header, "seed")));
  while (!text.empty()) {
    const std::string_view line = next_line();
    if (line.empty()) continue;
    const auto sp = line.find(' ');
    if (sp == std::string_view::npos) throw ValidationError("malformed counts line");
    const auto bits = line.substr(0, sp);
    if (static_cast<int>(bits.size()) != n) throw DimensionError("bitstring length mismatch");
    table.add(bitstring_to_index(bits), parse_u64(line.substr(sp + 1)));
  }
  if (table.total_shots() != shots) throw ValidationError("counts do not sum to the shot total");
  return table;
}

double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

CountsTable sample_counts(const StateVector& s, std::uint64_t shots, std::uint64_t seed) {
  if (shots < 1) throw ValidationError("shots must be at least 1");
  const auto& a = s.amplitudes();
  std::vector<double> cdf(static_cast<std::size_t>(a.size()));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    acc += std::norm(a[i]);
    cdf[static_cast<std::size_t>(i)] = acc;
  }
  std::mt19937_64 rng(seed);
  const std::size_t last = cdf.size() - 1;
  std::vector<std::uint64_t> hist(cdf.size(), 0);
  for (std::uint64_t k = 0; k < shots; ++k) {
    const double u = unit_uniform(rng()) * acc;
    // Outcome = number of CDF entries <= u. Small registers use a branchless count.
    std::size_t idx = 0;
    if (cdf.size() == 16) {
      for (std::size_t i = 0; i < 16; ++i) idx += cdf[i] <= u;
    } else if (cdf.size() <= 64) {
      for (double c : cdf) idx += c <= u;
    } else {
      idx = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    }
    ++hist[std::min(idx, last)];
  }
  CountsTable table(s.n_qubits(), seed);
  for (std::size_t i = 0; i < hist.size(); ++i) {
    if (hist[i] > 0) table.add(static_cast<std::uint32_t>(i), hist[i]);
  }
  return table;
}

void ReadoutNoise::validate() const {
  check_probability(p01, "p01");
  check_probability(p10, "p10");
}

CountsTable apply_readout_error(const CountsTable& counts, double p01, double p10,
                                std::uint64_t seed) {
  check_probability(p01, "p01");
  check_probability(p10, "p10");
  const int n = counts.n_qubits();
  std::mt19937_64 rng(seed);
  CountsTable out(n, seed);
  for (std::uint32_t b = 0; b < counts.counts().size(); ++b) {
    for (std::uint64_t k = 0; k < counts.count(b); ++k) {
      std::uint32_t flipped = b;
      for (int q = 0; q < n; ++q) {
        const std::uint32_t bit = 1u << (n - 1 - q);
        const double p = (b & bit) ? p10 : p01;
        if (unit_uniform(rng()) < p) flipped ^= bit;
      }
      out.add(flipped);
    }
  }
  return out;
}

Eigen::MatrixXd tensor_calibration(int n_qubits, double p01, double p10) {
  check_probability(p01, "p01");
  check_probability(p10, "p10");
  Eigen::Matrix2d single;
  single << 1.0 - p01, p10, p01, 1.0 - p10;
  Eigen::MatrixXd c = Eigen::MatrixXd::Ones(1, 1);
  for (int q = 0; q < n_qubits; ++q) {
    Eigen::MatrixXd next(c.rows() * 2, c.cols() * 2);
    // Qubit 0 is the most significant bit, so earlier factors sit on the left.
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      for (Eigen::Index j = 0; j < c.cols(); ++j) {
        next.block<2, 2>(2 * i, 2 * j) = c(i, j) * single;
      }
    }
    c = std::move(next);
  }
  return c;
}

Eigen::MatrixXd empirical_calibration(int n_qubits, const ReadoutNoise& noise,
                                      std::uint64_t shots, std::uint64_t seed) {
  noise.validate();
  const std::uint32_t dim = 1u << n_qubits;
  Eigen::MatrixXd c(dim, dim);
  for (std::uint32_t prepared = 0; prepared < dim; ++prepared) {
    CountsTable ideal(n_qubits, seed);
    ideal.add(prepared, shots);
    const CountsTable noisy =
        apply_readout_error(ideal, noise.p01, noise.p10, derive_seed(seed, {prepared}));
    c.col(prepared) = noisy.frequencies();
  }
  return c;
}

Eigen::VectorXd mitigate_readout(const CountsTable& counts, const Eigen::MatrixXd& calibration) {
  const auto dim = static_cast<Eigen::Index>(counts.counts().size());
  if (calibration.rows() != dim || calibration.cols() != dim) {
    throw DimensionError("calibration matrix does not match the register");
  }
  const Eigen::VectorXd sums = calibration.colwise().sum();
  if ((sums.array() - 1.0).abs().maxCoeff() > 1e-9) {
    throw ValidationError("calibration columns must sum to 1");
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(calibration);
  if (!lu.isInvertible()) throw NumericalError("calibration matrix is singular");
  return lu.solve(counts.frequencies());
}

std::pair<int, PauliString> conjugate_pauli(const Gate& g, int sign, const PauliString& p) {
  const int n = p.n_qubits();
  std::uint32_t x = p.x_mask();
  std::uint32_t z = p.z_mask();
  bool negative = sign < 0;
  const auto bit = [n](int q) { return 1u << (n - 1 - q); };
  const std::uint32_t a = bit(g.qubits[0]);
  switch (g.kind) {
    case GateKind::x:
      negative ^= static_cast<bool>(z & a);
      break;
    case GateKind::h: {
      negative ^= static_cast<bool>(x & z & a);
      const std::uint32_t xa = x & a;
      x = (x & ~a) | (z & a);
      z = (z & ~a) | xa;
      break;
    }
    case GateKind::s:
      negative ^= static_cast<bool>(x & z & a);
      z ^= x & a;
      break;
    case GateKind::sdg:
      negative ^= static_cast<bool>(x & ~z & a);
      z ^= x & a;
      break;
    case GateKind::cnot: {
      const std::uint32_t t = bit(g.qubits[1]);
      const bool xc = x & a, zc = z & a, xt = x & t, zt = z & t;
      negative ^= xc && zt && !(xt ^ zc);
      if (xc) x ^= t;
      if (zt) z ^= a;
      break;
    }
    default:
      throw ValidationError("conjugation is defined only for Clifford gates");
  }
  return {negative ? -1 : 1, PauliString::from_masks(n, x, z)};
}

MeasurementGroup MeasurementGroup::build(std::vector<PauliString> members, GroupingRule rule) {
  if (members.empty()) throw ValidationError("measurement group must not be empty");
  const int n = members.front().n_qubits();
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      const bool ok = rule == GroupingRule::qubit_wise ? qubit_wise_commutes(members[i], members[j])
                                                       : commutes(members[i], members[j]);
      if (!ok) {
        throw ValidationError(members[i].to_string() + " and " + members[j].to_string() +
                              " cannot be measured together");
      }
    }
  }

  Circuit circuit(n);
  auto rotate_to_z = [&circuit](int q, char letter) {
    if (letter == 'X') {
      circuit.add(Gate::h(q));
    } else if (letter == 'Y') {
      circuit.add(Gate::sdg(q));
      circuit.add(Gate::h(q));
    }
  };
  auto image = [&circuit](const PauliString& p) {
    std::pair<int, PauliString> cur{1, p};
    for (const auto& g : circuit.gates()) cur = conjugate_pauli(g, cur.first, cur.second);
    return cur;
  };

  if (rule == GroupingRule::qubit_wise) {
    for (int q = 0; q < n; ++q) {
      for (const auto& m : members) {
        if (m.letter(q) != 'I') {
          rotate_to_z(q, m.letter(q));
          break;
        }
      }
    }
  } else {
    // Each independent member is mapped to Z on a fresh pivot qubit. Later
    // members commute with those images, so they carry no X or Y on pivots
    // and the gates below never touch an earlier pivot.
    std::vector<int> pivots;
    for (const auto& m : members) {
      PauliString cur = image(m).second;
      for (int p : pivots) {
        if (cur.letter(p) == 'Z') cur.set(p, 'I');
      }
      if (cur.is_identity()) continue;
      std::vector<int> support;
      for (int q = 0; q < n; ++q) {
        if (cur.letter(q) != 'I') support.push_back(q);
      }
      const int pivot = support.front();
      for (int q : support) rotate_to_z(q, cur.letter(q));
      for (int q : support) {
        if (q != pivot) circuit.add(Gate::cnot(q, pivot));
      }
      pivots.push_back(pivot);
    }
  }

  std::vector<std::pair<int, PauliString>> images;
  for (const auto& m : members) images.push_back(image(m));
  MeasurementGroup g{std::move(members), std::move(circuit), {}, {}};
  for (std::size_t k = 0; k < g.members.size(); ++k) {
    const auto& [sign, img] = images[k];
    const auto& m = g.members[k];
    if (img.x_mask() != 0) throw NumericalError("basis change left " + m.to_string() + " off-diagonal");
    g.signs.push_back(sign);
    g.z_masks.push_back(img.z_mask());
  }
  return g;
}

std::vector<MeasurementGroup> measurement_groups(const PauliSum& h, GroupingRule rule) {
  std::vector<MeasurementGroup> out;
  for (auto& members : group_commuting(h, rule)) {
    out.push_back(MeasurementGroup::build(std::move(members), rule));
  }
  return out;
}

Estimate sampled_expectation(const Circuit& c, const PauliSum& h, std::uint64_t shots,
                             std::uint64_t seed, const std::vector<MeasurementGroup>& groups) {
  SamplingOptions options;
  options.shots = shots;
  return sampled_expectation(run_circuit(c), h, options, seed, groups);
}

Estimate sampled_expectation(const StateVector& state, const PauliSum& h,
                             const SamplingOptions& options, std::uint64_t seed,
                             const std::vector<MeasurementGroup>& groups) {
  if (groups.empty()) throw ValidationError("no measurement groups supplied");
  if (options.shots < 1) throw ValidationError("shots must be at least 1");
  if (!h.is_hermitian()) throw ValidationError("observable is not Hermitian");
  if (h.n_qubits() != state.n_qubits()) throw DimensionError("observable does not match state");

  std::map<PauliString, std::pair<std::size_t, std::size_t>> where;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    for (std::size_t k = 0; k < groups[gi].members.size(); ++k) {
      where.try_emplace(groups[gi].members[k], gi, k);
    }
  }
  for (const auto& [p, c] : h.terms()) {
    if (!p.is_identity() && !where.contains(p)) {
      throw ValidationError(p.to_string() + " is not covered by any measurement group");
    }
  }

  Estimate est;
  std::vector<Eigen::VectorXd> dist(groups.size());
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    dist[gi] = group_distribution(state, groups[gi], options, derive_seed(seed, {gi}));
    ++est.circuits;
  }
  double variance = 0.0;
  const double shots = static_cast<double>(options.shots);
  for (const auto& [p, c] : h.terms()) {
    if (p.is_identity()) {
      est.value += c.real();
      continue;
    }
    const auto [gi, k] = where.at(p);
    const auto& g = groups[gi];
    double e = 0.0;
    for (Eigen::Index b = 0; b < dist[gi].size(); ++b) {
      e += parity(static_cast<std::uint32_t>(b) & g.z_masks[k]) ? -dist[gi][b] : dist[gi][b];
    }
    e *= g.signs[k];
    est.value += c.real() * e;
    variance += c.real() * c.real() * std::max(0.0, 1.0 - e * e) / shots;
  }
  est.std_error = std::sqrt(variance);
  return est;
}

MeasurementRecord::MeasurementRecord(std::vector<MeasurementGroup> groups)
    : groups_(std::move(groups)) {
  if (groups_.empty()) throw ValidationError("no measurement groups supplied");
  for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
    for (std::size_t k = 0; k < groups_[gi].members.size(); ++k) {
      index_.try_emplace(groups_[gi].members[k], Located{gi, k});
    }
  }
}

void MeasurementRecord::add_realization(const StateVector& state, const SamplingOptions& options,
                                        std::uint64_t seed) {
  if (options.shots < 1) throw ValidationError("shots must be at least 1");
  std::vector<Eigen::VectorXd> dist;
  dist.reserve(groups_.size());
  for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
    dist.push_back(group_distribution(state, groups_[gi], options, derive_seed(seed, {gi})));
  }
  distributions_.push_back(std::move(dist));
  shots_.push_back(options.shots);
}

ComplexEstimate MeasurementRecord::estimate(const PauliSum& op) const {
  if (distributions_.empty()) throw ValidationError("no realizations recorded");
  Complex shift = 0.0;
  std::vector<std::vector<std::pair<std::size_t, Complex>>> per_group(groups_.size());
  for (const auto& [p, c] : op.terms()) {
    if (p.is_identity()) {
      shift += c;
      continue;
    }
    auto it = index_.find(p);
    if (it == index_.end()) {
      throw ValidationError(p.to_string() + " is not covered by any measurement group");
    }
    per_group[it->second.group].emplace_back(it->second.member, c);
  }

  ComplexEstimate out;
  double var_re = 0.0;
  double var_im = 0.0;
  for (std::size_t r = 0; r < distributions_.size(); ++r) {
    out.value += shift;
    const double shots = static_cast<double>(shots_[r]);
    for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
      if (per_group[gi].empty()) continue;
      const auto& g = groups_[gi];
      const auto& p = distributions_[r][gi];
      std::vector<Complex> v(static_cast<std::size_t>(p.size()), 0.0);
      for (const auto& [k, c] : per_group[gi]) {
        for (std::size_t b = 0; b < v.size(); ++b) {
          const bool odd = parity(static_cast<std::uint32_t>(b) & g.z_masks[k]);
          v[b] += (odd ? -1.0 : 1.0) * g.signs[k] * c;
        }
      }
      Complex mean = 0.0;
      for (std::size_t b = 0; b < v.size(); ++b) mean += p[static_cast<Eigen::Index>(b)] * v[b];
      double s_re = 0.0;
      double s_im = 0.0;
      for (std::size_t b = 0; b < v.size(); ++b) {
        const double w = std::max(0.0, p[static_cast<Eigen::Index>(b)]);
        s_re += w * std::pow(v[b].real() - mean.real(), 2);
        s_im += w * std::pow(v[b].imag() - mean.imag(), 2);
      }
      out.value += mean;
      var_re += s_re / shots;
      var_im += s_im / shots;
    }
  }
  const double n = static_cast<double>(distributions_.size());
  out.value /= n;
  out.std_error_re = std::sqrt(var_re) / n;
  out.std_error_im = std::sqrt(var_im) / n;
  return out;
}

}  // namespace qgf
