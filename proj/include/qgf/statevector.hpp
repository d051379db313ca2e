#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qgf/pauli.hpp"

namespace qgf {

/// Normalized amplitudes over 2^n computational basis states.
///
/// Basis index bits follow the string convention of PauliString: qubit 0 is
/// the most significant bit, so index 0b1000 on four qubits is "1000".
class StateVector {
 public:
  explicit StateVector(int n_qubits);  // |0...0>
  /// Takes ownership of `amplitudes`; throws unless the norm is 1 within 1e-10.
  StateVector(int n_qubits, Eigen::VectorXcd amplitudes);

  static StateVector basis_state(int n_qubits, std::uint32_t index);
  static StateVector from_bitstring(std::string_view bits);

  int n_qubits() const { return n_; }
  std::size_t dimension() const { return static_cast<std::size_t>(amps_.size()); }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  Complex amplitude(std::uint32_t index) const { return amps_[index]; }
  double norm() const { return amps_.norm(); }

  /// Raw mutable access for gate kernels. Callers keep the norm invariant.
  Eigen::VectorXcd& mutable_amplitudes() { return amps_; }

 private:
  int n_;
  Eigen::VectorXcd amps_;
};

/// Bitstring of a basis index, qubit 0 leftmost.
std::string index_to_bitstring(std::uint32_t index, int n_qubits);
std::uint32_t bitstring_to_index(std::string_view bits);

enum class GateKind { x, h, s, sdg, ry, rz, cnot, a };

/// A gate with its qubits and angles (radians).
///
/// A(theta, phi) on the ordered pair (q0, q1) acts, in the basis
/// |q0 q1> = |00>, |01>, |10>, |11>, as
///   [[1, 0, 0, 0],
///    [0, cos t, e^{i phi} sin t, 0],
///    [0, e^{-i phi} sin t, -cos t, 0],
///    [0, 0, 0, 1]].
struct Gate {
  GateKind kind = GateKind::x;
  std::array<int, 2> qubits{0, -1};
  double theta = 0.0;
  double phi = 0.0;

  static Gate x(int q) { return {GateKind::x, {q, -1}}; }
  static Gate h(int q) { return {GateKind::h, {q, -1}}; }
  static Gate s(int q) { return {GateKind::s, {q, -1}}; }
  static Gate sdg(int q) { return {GateKind::sdg, {q, -1}}; }
  static Gate ry(int q, double theta) { return {GateKind::ry, {q, -1}, theta}; }
  static Gate rz(int q, double phi) { return {GateKind::rz, {q, -1}, 0.0, phi}; }
  static Gate cnot(int control, int target) { return {GateKind::cnot, {control, target}}; }
  static Gate a(int q0, int q1, double theta, double phi) {
    return {GateKind::a, {q0, q1}, theta, phi};
  }

  bool two_qubit() const { return kind == GateKind::cnot || kind == GateKind::a; }
  /// 2x2 matrix for single-qubit kinds, 4x4 for two-qubit kinds.
  Eigen::MatrixXcd matrix() const;
};

class Circuit {
 public:
  explicit Circuit(int n_qubits);

  int n_qubits() const { return n_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }

  /// Appends after checking qubit range and distinctness.
  Circuit& add(const Gate& g);
  Circuit& append(const Circuit& other);
  /// Inverse circuit (reversed order, each gate inverted).
  Circuit inverse() const;
  std::size_t count(GateKind kind) const;

 private:
  int n_;
  std::vector<Gate> gates_;
};

void apply_gate(StateVector& state, const Gate& g);
StateVector run_circuit(const Circuit& c, const StateVector& initial);
StateVector run_circuit(const Circuit& c);

/// op|s> as a raw amplitude vector (not normalized).
Eigen::VectorXcd apply_pauli_sum(const PauliSum& op, const StateVector& s);

/// <s|P|s> for a single Pauli string.
Complex pauli_expectation(const StateVector& s, const PauliString& p);
/// <s|h|s> for Hermitian h. Throws ValidationError if h has complex coefficients.
double exact_expectation(const StateVector& s, const PauliSum& h);
/// <s|op|s> for arbitrary op.
Complex exact_transition(const StateVector& s, const PauliSum& op);
/// |<a|b>|^2.
double fidelity(const StateVector& a, const StateVector& b);

}  // namespace qgf
