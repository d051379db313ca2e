#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qgf/fermion.hpp"

namespace qgf {

/// Maximum register size supported by the bitmask representation.
inline constexpr int kMaxQubits = 30;

/// Tensor product of single-qubit Paulis over an n-qubit register.
///
/// Qubit 0 is the leftmost letter and the most significant bit of a basis
/// index, so the masks below can be applied directly to amplitude indices.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(int n_qubits);  // identity
  /// Parses letters over {I,X,Y,Z}, qubit 0 first.
  explicit PauliString(std::string_view letters);

  static PauliString single(int n_qubits, int qubit, char letter);
  /// Builds from amplitude-index masks; bits above 2^n must be clear.
  static PauliString from_masks(int n_qubits, std::uint32_t x, std::uint32_t z);

  int n_qubits() const { return n_; }
  char letter(int qubit) const;
  void set(int qubit, char letter);
  bool is_identity() const { return (x_ | z_) == 0; }
  /// Number of non-identity positions.
  int weight() const;

  /// Bit-flip and phase-flip masks over basis indices. Y sets both.
  std::uint32_t x_mask() const { return x_; }
  std::uint32_t z_mask() const { return z_; }
  int y_count() const;

  std::string to_string() const;

  /// Lexicographic on letters with I < X < Y < Z.
  friend std::strong_ordering operator<=>(const PauliString& a, const PauliString& b);
  friend bool operator==(const PauliString& a, const PauliString& b) = default;

 private:
  std::uint32_t bit(int qubit) const { return 1u << (n_ - 1 - qubit); }
  void check_qubit(int qubit) const;

  int n_ = 0;
  std::uint32_t x_ = 0;
  std::uint32_t z_ = 0;
};

/// Letter-wise product a*b; the phase is one of {1, i, -1, -i}.
std::pair<Complex, PauliString> multiply_pauli(const PauliString& a, const PauliString& b);

/// True iff a and b commute as operators (even number of anticommuting sites).
bool commutes(const PauliString& a, const PauliString& b);

/// True iff every site carries equal letters or at least one identity.
bool qubit_wise_commutes(const PauliString& a, const PauliString& b);

/// Linear combination of Pauli strings on a fixed register.
class PauliSum {
 public:
  using TermMap = std::map<PauliString, Complex>;

  explicit PauliSum(int n_qubits);
  static PauliSum identity(int n_qubits, Complex coefficient = 1.0);
  static PauliSum term(const PauliString& p, Complex coefficient = 1.0);

  int n_qubits() const { return n_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  Complex coefficient(const PauliString& p) const;
  std::vector<PauliString> strings() const;

  void add(const PauliString& p, Complex coefficient);

  PauliSum adjoint() const;
  /// All coefficients real within tol (Pauli strings are Hermitian).
  bool is_hermitian(double tol = 1e-10) const;
  bool approx_equal(const PauliSum& other, double tol = 1e-10) const;

  /// Renders one term per line as "(-0.5) ZXII".
  std::string to_string() const;

  PauliSum& operator+=(const PauliSum& rhs);
  PauliSum& operator-=(const PauliSum& rhs);
  PauliSum& operator*=(Complex s);

  friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
  friend PauliSum operator-(PauliSum a, const PauliSum& b) { return a -= b; }
  friend PauliSum operator*(PauliSum a, Complex s) { return a *= s; }
  friend PauliSum operator*(Complex s, PauliSum a) { return a *= s; }
  friend PauliSum operator*(const PauliSum& a, const PauliSum& b);

 private:
  void prune();
  int n_;
  TermMap terms_;
};

/// Jordan-Wigner image: c+_j -> (X_j - i Y_j)/2 with Z on every qubit < j.
PauliSum jordan_wigner(const FermionOperator& op, int n_modes);

enum class GroupingRule {
  qubit_wise,  // tensor-product basis change, single-qubit rotations only
  general,     // full commutativity, Clifford basis change
};

/// Greedy sequential colouring: strings sorted by descending |coefficient|
/// (ties broken by letters) are placed in the first group whose members they
/// all commute with under `rule`. Every input string, identity included,
/// appears in exactly one group.
std::vector<std::vector<PauliString>> group_commuting(
    const PauliSum& h, GroupingRule rule = GroupingRule::qubit_wise);

/// Same colouring for a bare list of strings, visited in letter order.
/// Duplicates are merged.
std::vector<std::vector<PauliString>> group_strings(std::vector<PauliString> strings,
                                                    GroupingRule rule);

}  // namespace qgf
