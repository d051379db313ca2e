#pragma once

#include <complex>
#include <compare>
#include <map>
#include <string>
#include <vector>

namespace qgf {

using Complex = std::complex<double>;

/// Coefficients with magnitude below this are dropped after simplification.
inline constexpr double kCoefficientTolerance = 1e-12;

/// A single creation (dagger) or annihilation operator on one mode.
struct LadderOp {
  int mode = 0;
  bool dagger = false;

  friend auto operator<=>(const LadderOp&, const LadderOp&) = default;
};

using LadderProduct = std::vector<LadderOp>;

struct LadderTerm {
  Complex coefficient{1.0, 0.0};
  LadderProduct factors;
};

/// Sum of products of fermionic ladder operators on a fixed number of modes.
///
/// The stored form is always canonical: each product is normal ordered
/// (creators left of annihilators, each block in ascending mode order), the
/// sign from every transposition is folded into the coefficient, identical
/// products are merged and near-zero coefficients are dropped. Two operators
/// representing the same element of the algebra therefore compare equal
/// term by term.
class FermionOperator {
 public:
  using TermMap = std::map<LadderProduct, Complex>;

  explicit FermionOperator(int n_modes);

  static FermionOperator identity(int n_modes, Complex coefficient = 1.0);
  static FermionOperator creation(int n_modes, int mode);
  static FermionOperator annihilation(int n_modes, int mode);
  static FermionOperator number(int n_modes, int mode);
  /// Product factors[0] * factors[1] * ... scaled by coefficient.
  static FermionOperator product(int n_modes, const LadderProduct& factors,
                                 Complex coefficient = 1.0);

  int n_modes() const { return n_modes_; }
  const TermMap& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Coefficient of a canonical product (zero if absent).
  Complex coefficient(const LadderProduct& factors) const;

  FermionOperator adjoint() const;

  /// Net change of particle number if every term agrees, otherwise throws.
  int particle_number_change() const;

  /// Renders as e.g. "(-1) c+_0 c_1 + (3) c+_0 c+_2 c_0 c_2".
  std::string to_string() const;

  bool approx_equal(const FermionOperator& other, double tol = 1e-10) const;

  FermionOperator& operator+=(const FermionOperator& rhs);
  FermionOperator& operator-=(const FermionOperator& rhs);
  FermionOperator& operator*=(Complex scalar);

  friend FermionOperator operator+(FermionOperator a, const FermionOperator& b) {
    return a += b;
  }
  friend FermionOperator operator-(FermionOperator a, const FermionOperator& b) {
    return a -= b;
  }
  friend FermionOperator operator*(FermionOperator a, Complex s) { return a *= s; }
  friend FermionOperator operator*(Complex s, FermionOperator a) { return a *= s; }
  friend FermionOperator operator*(const FermionOperator& a, const FermionOperator& b);
  friend bool operator==(const FermionOperator& a, const FermionOperator& b) {
    return a.n_modes_ == b.n_modes_ && a.terms_ == b.terms_;
  }

 private:
  void add_normal_ordered(LadderProduct factors, Complex coefficient);
  void prune();

  int n_modes_;
  TermMap terms_;
};

FermionOperator multiply(const FermionOperator& a, const FermionOperator& b);
FermionOperator commutator(const FermionOperator& a, const FermionOperator& b);
FermionOperator anticommutator(const FermionOperator& a, const FermionOperator& b);
/// (1/2)([[a,h],b] + [a,[h,b]]).
FermionOperator double_commutator(const FermionOperator& a, const FermionOperator& h,
                                  const FermionOperator& b);

bool is_hermitian(const FermionOperator& op, double tol = 1e-10);

enum class Spin { up, down };

/// Spin-major mode ordering: all spin-up sites, then all spin-down sites.
/// For two sites this is {|0,up>, |1,up>, |0,down>, |1,down>} -> {0,1,2,3}.
/// Sites are zero based.
struct ModeLabeling {
  int n_sites = 2;

  int n_modes() const { return 2 * n_sites; }
  int mode(int site, Spin spin) const;
  int site_of(int mode) const;
  Spin spin_of(int mode) const;
};

/// Open-chain Fermi-Hubbard model:
///   -t sum_{<ij>,s} (c+_{is} c_{js} + h.c.) + U sum_i n_{i,up} n_{i,down}.
FermionOperator build_hubbard(int n_sites, double t, double U);

/// Bloch annihilator (c_{0,s} + e^{ik} c_{1,s}) / sqrt(2) on the two-site model.
FermionOperator momentum_mode(double k, Spin spin);

}  // namespace qgf
