#include "qgf/statevector.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "qgf/errors.hpp"

namespace qgf {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kNormTolerance = 1e-10;

std::uint32_t qubit_bit(int n, int q) { return 1u << (n - 1 - q); }

void apply_single(Eigen::VectorXcd& amps, int n, int q, const Eigen::Matrix2cd& m) {
  const std::uint32_t b = qubit_bit(n, q);
  const std::uint32_t dim = static_cast<std::uint32_t>(amps.size());
  for (std::uint32_t i = 0; i < dim; ++i) {
    if (i & b) continue;
    const Complex a0 = amps[i];
    const Complex a1 = amps[i | b];
    amps[i] = m(0, 0) * a0 + m(0, 1) * a1;
    amps[i | b] = m(1, 0) * a0 + m(1, 1) * a1;
  }
}

void apply_pair(Eigen::VectorXcd& amps, int n, int q0, int q1, const Eigen::Matrix4cd& m) {
  const std::uint32_t b0 = qubit_bit(n, q0);
  const std::uint32_t b1 = qubit_bit(n, q1);
  const std::uint32_t dim = static_cast<std::uint32_t>(amps.size());
  for (std::uint32_t i = 0; i < dim; ++i) {
    if (i & (b0 | b1)) continue;
    const std::array<std::uint32_t, 4> idx{i, i | b1, i | b0, i | b0 | b1};
    Eigen::Vector4cd v;
    for (int k = 0; k < 4; ++k) v[k] = amps[idx[k]];
    const Eigen::Vector4cd w = m * v;
    for (int k = 0; k < 4; ++k) amps[idx[k]] = w[k];
  }
}

}  // namespace

StateVector::StateVector(int n_qubits) : n_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) throw DimensionError("unsupported register size");
  amps_ = Eigen::VectorXcd::Zero(Eigen::Index{1} << n_qubits);
  amps_[0] = 1.0;
}

StateVector::StateVector(int n_qubits, Eigen::VectorXcd amplitudes)
    : n_(n_qubits), amps_(std::move(amplitudes)) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) throw DimensionError("unsupported register size");
  if (amps_.size() != (Eigen::Index{1} << n_qubits)) {
    throw DimensionError("amplitude vector does not match 2^" + std::to_string(n_qubits));
  }
  if (std::abs(amps_.norm() - 1.0) > kNormTolerance) {
    throw ValidationError("state vector is not normalized");
  }
}

StateVector StateVector::basis_state(int n_qubits, std::uint32_t index) {
  StateVector s(n_qubits);
  if (index >= s.dimension()) throw DimensionError("basis index out of range");
  s.amps_[0] = 0.0;
  s.amps_[index] = 1.0;
  return s;
}

StateVector StateVector::from_bitstring(std::string_view bits) {
  return basis_state(static_cast<int>(bits.size()), bitstring_to_index(bits));
}

std::string index_to_bitstring(std::uint32_t index, int n_qubits) {
  std::string s(n_qubits, '0');
  for (int q = 0; q < n_qubits; ++q) {
    if (index & qubit_bit(n_qubits, q)) s[q] = '1';
  }
  return s;
}

std::uint32_t bitstring_to_index(std::string_view bits) {
  const int n = static_cast<int>(bits.size());
  if (n > kMaxQubits) throw DimensionError("bitstring too long");
  std::uint32_t index = 0;
  for (int q = 0; q < n; ++q) {
    if (bits[q] == '1') {
      index |= qubit_bit(n, q);
    } else if (bits[q] != '0') {
      throw ValidationError("bitstring may contain only '0' and '1'");
    }
  }
  return index;
}

Eigen::MatrixXcd Gate::matrix() const {
  const double r = 1.0 / std::numbers::sqrt2;
  switch (kind) {
    case GateKind::x: {
      Eigen::Matrix2cd m;
      m << 0, 1, 1, 0;
      return m;
    }
    case GateKind::h: {
      Eigen::Matrix2cd m;
      m << r, r, r, -r;
      return m;
    }
    case GateKind::s: {
      Eigen::Matrix2cd m;
      m << 1, 0, 0, kI;
      return m;
    }
    case GateKind::sdg: {
      Eigen::Matrix2cd m;
      m << 1, 0, 0, -kI;
      return m;
    }
    case GateKind::ry: {
      const double c = std::cos(theta / 2), s = std::sin(theta / 2);
      Eigen::Matrix2cd m;
      m << c, -s, s, c;
      return m;
    }
    case GateKind::rz: {
      Eigen::Matrix2cd m;
      m << std::polar(1.0, -phi / 2), 0, 0, std::polar(1.0, phi / 2);
      return m;
    }
    case GateKind::cnot: {
      Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
      m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
      return m;
    }
    case GateKind::a: {
      const double c = std::cos(theta), s = std::sin(theta);
      Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
      m(0, 0) = 1.0;
      m(1, 1) = c;
      m(1, 2) = std::polar(s, phi);
      m(2, 1) = std::polar(s, -phi);
      m(2, 2) = -c;
      m(3, 3) = 1.0;
      return m;
    }
  }
  throw ValidationError("unknown gate kind");
}

Circuit::Circuit(int n_qubits) : n_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) throw DimensionError("unsupported register size");
}

Circuit& Circuit::add(const Gate& g) {
  auto check = [this](int q) {
    if (q < 0 || q >= n_) {
      throw DimensionError("gate qubit " + std::to_string(q) + " outside register of " +
                           std::to_string(n_));
    }
  };
  check(g.qubits[0]);
  if (g.two_qubit()) {
    check(g.qubits[1]);
    if (g.qubits[0] == g.qubits[1]) throw ValidationError("two-qubit gate on a single qubit");
  }
  if (!std::isfinite(g.theta) || !std::isfinite(g.phi)) {
    throw ValidationError("gate angles must be finite");
  }
  gates_.push_back(g);
  return *this;
}

Circuit& Circuit::append(const Circuit& other) {
  if (other.n_ != n_) throw DimensionError("cannot append circuits on different registers");
  for (const auto& g : other.gates_) add(g);
  return *this;
}

Circuit Circuit::inverse() const {
  Circuit inv(n_);
  for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) {
    Gate g = *it;
    switch (g.kind) {
      case GateKind::s: g.kind = GateKind::sdg; break;
      case GateKind::sdg: g.kind = GateKind::s; break;
      case GateKind::ry: g.theta = -g.theta; break;
      case GateKind::rz: g.phi = -g.phi; break;
      default: break;  // X, H, CNOT and A are involutions
    }
    inv.add(g);
  }
  return inv;
}

std::size_t Circuit::count(GateKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(gates_.begin(), gates_.end(), [kind](const Gate& g) { return g.kind == kind; }));
}

void apply_gate(StateVector& state, const Gate& g) {
  const int n = state.n_qubits();
  auto& amps = state.mutable_amplitudes();
  if (g.qubits[0] < 0 || g.qubits[0] >= n || (g.two_qubit() && (g.qubits[1] < 0 || g.qubits[1] >= n))) {
    throw DimensionError("gate does not fit the state register");
  }
  switch (g.kind) {
    case GateKind::x: {
      const std::uint32_t b = qubit_bit(n, g.qubits[0]);
      for (std::uint32_t i = 0; i < amps.size(); ++i) {
        if (!(i & b)) std::swap(amps[i], amps[i | b]);
      }
      return;
    }
    case GateKind::cnot: {
      const std::uint32_t c = qubit_bit(n, g.qubits[0]);
      const std::uint32_t t = qubit_bit(n, g.qubits[1]);
      for (std::uint32_t i = 0; i < amps.size(); ++i) {
        if ((i & c) && !(i & t)) std::swap(amps[i], amps[i | t]);
      }
      return;
    }
    case GateKind::a:
      apply_pair(amps, n, g.qubits[0], g.qubits[1], g.matrix());
      return;
    default:
      apply_single(amps, n, g.qubits[0], g.matrix());
      return;
  }
}

StateVector run_circuit(const Circuit& c, const StateVector& initial) {
  if (c.n_qubits() != initial.n_qubits()) {
    throw DimensionError("circuit and initial state have different registers");
  }
  StateVector s = initial;
  for (const auto& g : c.gates()) apply_gate(s, g);
  return s;
}

StateVector run_circuit(const Circuit& c) { return run_circuit(c, StateVector(c.n_qubits())); }

Complex pauli_expectation(const StateVector& s, const PauliString& p) {
  if (p.n_qubits() != s.n_qubits()) throw DimensionError("Pauli string does not match state");
  // P|b> = i^{#Y} (-1)^{|b & z|} |b ^ x>
  static constexpr std::array<Complex, 4> kYPhase{Complex{1, 0}, kI, Complex{-1, 0}, -kI};
  const std::uint32_t x = p.x_mask();
  const std::uint32_t z = p.z_mask();
  const auto& a = s.amplitudes();
  Complex acc = 0.0;
  for (std::uint32_t b = 0; b < a.size(); ++b) {
    const Complex term = std::conj(a[b ^ x]) * a[b];
    acc += (std::popcount(b & z) & 1) ? -term : term;
  }
  return kYPhase[p.y_count() % 4] * acc;
}

Eigen::VectorXcd apply_pauli_sum(const PauliSum& op, const StateVector& s) {
  if (op.n_qubits() != s.n_qubits()) throw DimensionError("operator does not match state");
  static constexpr std::array<Complex, 4> kYPhase{Complex{1, 0}, kI, Complex{-1, 0}, -kI};
  const auto& a = s.amplitudes();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(a.size());
  for (const auto& [p, c] : op.terms()) {
    const Complex phase = kYPhase[p.y_count() % 4] * c;
    for (std::uint32_t b = 0; b < a.size(); ++b) {
      const Complex v = phase * a[b];
      out[b ^ p.x_mask()] += (std::popcount(b & p.z_mask()) & 1) ? -v : v;
    }
  }
  return out;
}

Complex exact_transition(const StateVector& s, const PauliSum& op) {
  if (op.n_qubits() != s.n_qubits()) throw DimensionError("operator does not match state");
  Complex acc = 0.0;
  for (const auto& [p, c] : op.terms()) acc += c * pauli_expectation(s, p);
  return acc;
}

double exact_expectation(const StateVector& s, const PauliSum& h) {
  if (!h.is_hermitian(1e-10)) throw ValidationError("observable is not Hermitian");
  return exact_transition(s, h).real();
}

double fidelity(const StateVector& a, const StateVector& b) {
  if (a.dimension() != b.dimension()) throw DimensionError("states have different dimension");
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

}  // namespace qgf
