#include "qgf/fermion.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "qgf/errors.hpp"

namespace qgf {

namespace {

// Creators sort before annihilators; within each block, ascending mode.
constexpr std::pair<int, int> order_key(const LadderOp& op) {
  return {op.dagger ? 0 : 1, op.mode};
}

void require_same_modes(const FermionOperator& a, const FermionOperator& b) {
  if (a.n_modes() != b.n_modes()) {
    throw DimensionError("fermion operators act on " + std::to_string(a.n_modes()) +
                         " and " + std::to_string(b.n_modes()) + " modes");
  }
}

std::string format_coefficient(Complex c) {
  std::ostringstream os;
  os.precision(12);
  if (std::abs(c.imag()) < kCoefficientTolerance) {
    os << c.real();
  } else if (std::abs(c.real()) < kCoefficientTolerance) {
    os << c.imag() << "i";
  } else {
    os << c.real() << (c.imag() < 0 ? "" : "+") << c.imag() << "i";
  }
  return os.str();
}

}  // namespace

FermionOperator::FermionOperator(int n_modes) : n_modes_(n_modes) {
  if (n_modes < 0) throw DimensionError("negative mode count");
}

FermionOperator FermionOperator::identity(int n_modes, Complex coefficient) {
  return product(n_modes, {}, coefficient);
}

FermionOperator FermionOperator::creation(int n_modes, int mode) {
  return product(n_modes, {{mode, true}});
}

FermionOperator FermionOperator::annihilation(int n_modes, int mode) {
  return product(n_modes, {{mode, false}});
}

FermionOperator FermionOperator::number(int n_modes, int mode) {
  return product(n_modes, {{mode, true}, {mode, false}});
}

FermionOperator FermionOperator::product(int n_modes, const LadderProduct& factors,
                                         Complex coefficient) {
  FermionOperator op(n_modes);
  for (const auto& f : factors) {
    if (f.mode < 0 || f.mode >= n_modes) {
      throw DimensionError("mode " + std::to_string(f.mode) + " outside [0, " +
                           std::to_string(n_modes) + ")");
    }
  }
  op.add_normal_ordered(factors, coefficient);
  op.prune();
  return op;
}

void FermionOperator::add_normal_ordered(LadderProduct factors, Complex coefficient) {
  // Bubble toward canonical order; each swap of distinct operators costs a sign,
  // and c_i c+_i = 1 - c+_i c_i spawns the contracted term.
  for (std::size_t i = 0; i + 1 < factors.size(); ++i) {
    const LadderOp a = factors[i];
    const LadderOp b = factors[i + 1];
    const auto ka = order_key(a);
    const auto kb = order_key(b);
    if (ka < kb) continue;
    if (ka == kb) return;  // c_i c_i = c+_i c+_i = 0
    if (!a.dagger && b.dagger && a.mode == b.mode) {
      LadderProduct contracted;
      contracted.reserve(factors.size() - 2);
      contracted.insert(contracted.end(), factors.begin(), factors.begin() + i);
      contracted.insert(contracted.end(), factors.begin() + i + 2, factors.end());
      add_normal_ordered(std::move(contracted), coefficient);
    }
    std::swap(factors[i], factors[i + 1]);
    add_normal_ordered(std::move(factors), -coefficient);
    return;
  }
  terms_[factors] += coefficient;
}

void FermionOperator::prune() {
  std::erase_if(terms_, [](const auto& kv) {
    return std::abs(kv.second) < kCoefficientTolerance;
  });
}

Complex FermionOperator::coefficient(const LadderProduct& factors) const {
  auto it = terms_.find(factors);
  return it == terms_.end() ? Complex{} : it->second;
}

FermionOperator FermionOperator::adjoint() const {
  FermionOperator out(n_modes_);
  for (const auto& [factors, c] : terms_) {
    LadderProduct reversed(factors.rbegin(), factors.rend());
    for (auto& f : reversed) f.dagger = !f.dagger;
    out.add_normal_ordered(std::move(reversed), std::conj(c));
  }
  out.prune();
  return out;
}

int FermionOperator::particle_number_change() const {
  if (terms_.empty()) throw ValidationError("empty operator has no particle-number change");
  bool first = true;
  int change = 0;
  for (const auto& [factors, c] : terms_) {
    int d = 0;
    for (const auto& f : factors) d += f.dagger ? 1 : -1;
    if (first) {
      change = d;
      first = false;
    } else if (d != change) {
      throw ValidationError("operator mixes terms with different particle-number change");
    }
  }
  return change;
}

std::string FermionOperator::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [factors, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << format_coefficient(c) << ")";
    if (factors.empty()) os << " 1";
    for (const auto& f : factors) os << (f.dagger ? " c+_" : " c_") << f.mode;
  }
  return os.str();
}

bool FermionOperator::approx_equal(const FermionOperator& other, double tol) const {
  if (n_modes_ != other.n_modes_) return false;
  FermionOperator diff = *this - other;
  for (const auto& [factors, c] : diff.terms_) {
    if (std::abs(c) > tol) return false;
  }
  return true;
}

FermionOperator& FermionOperator::operator+=(const FermionOperator& rhs) {
  require_same_modes(*this, rhs);
  for (const auto& [factors, c] : rhs.terms_) terms_[factors] += c;
  prune();
  return *this;
}

FermionOperator& FermionOperator::operator-=(const FermionOperator& rhs) {
  require_same_modes(*this, rhs);
  for (const auto& [factors, c] : rhs.terms_) terms_[factors] -= c;
  prune();
  return *this;
}

FermionOperator& FermionOperator::operator*=(Complex scalar) {
  for (auto& [factors, c] : terms_) c *= scalar;
  prune();
  return *this;
}

FermionOperator operator*(const FermionOperator& a, const FermionOperator& b) {
  require_same_modes(a, b);
  FermionOperator out(a.n_modes());
  for (const auto& [fa, ca] : a.terms_) {
    for (const auto& [fb, cb] : b.terms_) {
      LadderProduct joined;
      joined.reserve(fa.size() + fb.size());
      joined.insert(joined.end(), fa.begin(), fa.end());
      joined.insert(joined.end(), fb.begin(), fb.end());
      out.add_normal_ordered(std::move(joined), ca * cb);
    }
  }
  out.prune();
  return out;
}

FermionOperator multiply(const FermionOperator& a, const FermionOperator& b) { return a * b; }

FermionOperator commutator(const FermionOperator& a, const FermionOperator& b) {
  return a * b - b * a;
}

FermionOperator anticommutator(const FermionOperator& a, const FermionOperator& b) {
  return a * b + b * a;
}

FermionOperator double_commutator(const FermionOperator& a, const FermionOperator& h,
                                  const FermionOperator& b) {
  FermionOperator sum = commutator(commutator(a, h), b) + commutator(a, commutator(h, b));
  return sum * Complex{0.5, 0.0};
}

bool is_hermitian(const FermionOperator& op, double tol) {
  return op.approx_equal(op.adjoint(), tol);
}

int ModeLabeling::mode(int site, Spin spin) const {
  if (site < 0 || site >= n_sites) {
    throw DimensionError("site " + std::to_string(site) + " outside [0, " +
                         std::to_string(n_sites) + ")");
  }
  return spin == Spin::up ? site : n_sites + site;
}

int ModeLabeling::site_of(int mode) const {
  if (mode < 0 || mode >= n_modes()) throw DimensionError("mode out of range");
  return mode % n_sites;
}

Spin ModeLabeling::spin_of(int mode) const {
  if (mode < 0 || mode >= n_modes()) throw DimensionError("mode out of range");
  return mode < n_sites ? Spin::up : Spin::down;
}

FermionOperator build_hubbard(int n_sites, double t, double U) {
  if (!std::isfinite(t) || !std::isfinite(U)) {
    throw ValidationError("Hubbard parameters must be finite");
  }
  if (n_sites < 2) throw ValidationError("Hubbard chain needs at least two sites");
  const ModeLabeling labels{n_sites};
  const int n = labels.n_modes();
  FermionOperator h(n);
  for (Spin s : {Spin::up, Spin::down}) {
    for (int i = 0; i + 1 < n_sites; ++i) {
      const int a = labels.mode(i, s);
      const int b = labels.mode(i + 1, s);
      h += FermionOperator::product(n, {{a, true}, {b, false}}, -t);
      h += FermionOperator::product(n, {{b, true}, {a, false}}, -t);
    }
  }
  for (int i = 0; i < n_sites; ++i) {
    h += FermionOperator::number(n, labels.mode(i, Spin::up)) *
         FermionOperator::number(n, labels.mode(i, Spin::down)) * Complex{U, 0.0};
  }
  return h;
}

FermionOperator momentum_mode(double k, Spin spin) {
  if (!std::isfinite(k)) throw ValidationError("momentum must be finite");
  const ModeLabeling labels{2};
  const int n = labels.n_modes();
  const double norm = 1.0 / std::numbers::sqrt2;
  FermionOperator c0 = FermionOperator::annihilation(n, labels.mode(0, spin));
  FermionOperator c1 = FermionOperator::annihilation(n, labels.mode(1, spin));
  return c0 * Complex{norm, 0.0} + c1 * (std::polar(1.0, k) * norm);
}

}  // namespace qgf
