#include "qgf/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "qgf/errors.hpp"

namespace qgf {

namespace {

constexpr Complex kI{0.0, 1.0};

// I=0, X=1, Y=2, Z=3.
int letter_code(bool x, bool z) { return x ? (z ? 2 : 1) : (z ? 3 : 0); }

constexpr char kLetters[] = {'I', 'X', 'Y', 'Z'};

// Phase and letter of the single-qubit product a*b.
std::pair<Complex, int> multiply_letters(int a, int b) {
  if (a == 0) return {1.0, b};
  if (b == 0) return {1.0, a};
  if (a == b) return {1.0, 0};
  const int c = 6 - a - b;  // the remaining letter
  // Cyclic order X -> Y -> Z -> X gives +i.
  const bool cyclic = (b - a + 3) % 3 == 1;
  return {cyclic ? kI : -kI, c};
}

void require_same_length(const PauliString& a, const PauliString& b) {
  if (a.n_qubits() != b.n_qubits()) {
    throw DimensionError("Pauli strings of length " + std::to_string(a.n_qubits()) +
                         " and " + std::to_string(b.n_qubits()));
  }
}

}  // namespace

PauliString::PauliString(int n_qubits) : n_(n_qubits) {
  if (n_qubits < 0 || n_qubits > kMaxQubits) throw DimensionError("unsupported register size");
}

PauliString::PauliString(std::string_view letters)
    : PauliString(static_cast<int>(letters.size())) {
  for (int q = 0; q < n_; ++q) set(q, letters[q]);
}

PauliString PauliString::single(int n_qubits, int qubit, char letter) {
  PauliString p(n_qubits);
  p.set(qubit, letter);
  return p;
}

PauliString PauliString::from_masks(int n_qubits, std::uint32_t x, std::uint32_t z) {
  PauliString p(n_qubits);
  const std::uint32_t full = (1u << n_qubits) - 1;
  if ((x | z) & ~full) throw DimensionError("mask exceeds register of " + std::to_string(n_qubits));
  p.x_ = x;
  p.z_ = z;
  return p;
}

void PauliString::check_qubit(int qubit) const {
  if (qubit < 0 || qubit >= n_) {
    throw DimensionError("qubit " + std::to_string(qubit) + " outside register of " +
                         std::to_string(n_));
  }
}

char PauliString::letter(int qubit) const {
  check_qubit(qubit);
  return kLetters[letter_code(x_ & bit(qubit), z_ & bit(qubit))];
}

void PauliString::set(int qubit, char letter) {
  check_qubit(qubit);
  const std::uint32_t b = bit(qubit);
  x_ &= ~b;
  z_ &= ~b;
  switch (letter) {
    case 'I': break;
    case 'X': x_ |= b; break;
    case 'Y': x_ |= b; z_ |= b; break;
    case 'Z': z_ |= b; break;
    default:
      throw ValidationError(std::string("invalid Pauli letter '") + letter + "'");
  }
}

int PauliString::weight() const { return std::popcount(x_ | z_); }

int PauliString::y_count() const { return std::popcount(x_ & z_); }

std::string PauliString::to_string() const {
  std::string s(n_, 'I');
  for (int q = 0; q < n_; ++q) s[q] = letter(q);
  return s;
}

std::strong_ordering operator<=>(const PauliString& a, const PauliString& b) {
  if (auto c = a.n_ <=> b.n_; c != 0) return c;
  for (int q = 0; q < a.n_; ++q) {
    const std::uint32_t m = a.bit(q);
    const int la = letter_code(a.x_ & m, a.z_ & m);
    const int lb = letter_code(b.x_ & m, b.z_ & m);
    if (la != lb) return la <=> lb;
  }
  return std::strong_ordering::equal;
}

std::pair<Complex, PauliString> multiply_pauli(const PauliString& a, const PauliString& b) {
  require_same_length(a, b);
  Complex phase = 1.0;
  PauliString out(a.n_qubits());
  for (int q = 0; q < a.n_qubits(); ++q) {
    const auto code = [q](const PauliString& p) {
      const std::uint32_t m = 1u << (p.n_qubits() - 1 - q);
      return letter_code(p.x_mask() & m, p.z_mask() & m);
    };
    auto [ph, letter] = multiply_letters(code(a), code(b));
    phase *= ph;
    out.set(q, kLetters[letter]);
  }
  return {phase, out};
}

bool commutes(const PauliString& a, const PauliString& b) {
  require_same_length(a, b);
  const std::uint32_t anti = (a.x_mask() & b.z_mask()) ^ (a.z_mask() & b.x_mask());
  return std::popcount(anti) % 2 == 0;
}

bool qubit_wise_commutes(const PauliString& a, const PauliString& b) {
  require_same_length(a, b);
  const std::uint32_t both = (a.x_mask() | a.z_mask()) & (b.x_mask() | b.z_mask());
  return ((a.x_mask() ^ b.x_mask()) & both) == 0 && ((a.z_mask() ^ b.z_mask()) & both) == 0;
}

PauliSum::PauliSum(int n_qubits) : n_(n_qubits) {
  if (n_qubits < 0 || n_qubits > kMaxQubits) throw DimensionError("unsupported register size");
}

PauliSum PauliSum::identity(int n_qubits, Complex coefficient) {
  PauliSum s(n_qubits);
  s.add(PauliString(n_qubits), coefficient);
  return s;
}

PauliSum PauliSum::term(const PauliString& p, Complex coefficient) {
  PauliSum s(p.n_qubits());
  s.add(p, coefficient);
  return s;
}

Complex PauliSum::coefficient(const PauliString& p) const {
  auto it = terms_.find(p);
  return it == terms_.end() ? Complex{} : it->second;
}

std::vector<PauliString> PauliSum::strings() const {
  std::vector<PauliString> out;
  out.reserve(terms_.size());
  for (const auto& [p, c] : terms_) out.push_back(p);
  return out;
}

void PauliSum::add(const PauliString& p, Complex coefficient) {
  if (p.n_qubits() != n_) throw DimensionError("Pauli string length differs from sum");
  auto [it, inserted] = terms_.try_emplace(p, coefficient);
  if (!inserted) it->second += coefficient;
  if (std::abs(it->second) < kCoefficientTolerance) terms_.erase(it);
}

void PauliSum::prune() {
  std::erase_if(terms_, [](const auto& kv) {
    return std::abs(kv.second) < kCoefficientTolerance;
  });
}

PauliSum PauliSum::adjoint() const {
  PauliSum out(n_);
  for (const auto& [p, c] : terms_) out.terms_.emplace(p, std::conj(c));
  return out;
}

bool PauliSum::is_hermitian(double tol) const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [tol](const auto& kv) { return std::abs(kv.second.imag()) <= tol; });
}

bool PauliSum::approx_equal(const PauliSum& other, double tol) const {
  if (n_ != other.n_) return false;
  PauliSum diff = *this - other;
  return std::all_of(diff.terms_.begin(), diff.terms_.end(),
                     [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
}

std::string PauliSum::to_string() const {
  std::ostringstream os;
  os.precision(12);
  for (const auto& [p, c] : terms_) {
    os << "(";
    if (std::abs(c.imag()) < kCoefficientTolerance) {
      os << c.real();
    } else {
      os << c.real() << (c.imag() < 0 ? "" : "+") << c.imag() << "i";
    }
    os << ") " << p.to_string() << "\n";
  }
  return os.str();
}

PauliSum& PauliSum::operator+=(const PauliSum& rhs) {
  if (rhs.n_ != n_) throw DimensionError("Pauli sums on different registers");
  for (const auto& [p, c] : rhs.terms_) terms_[p] += c;
  prune();
  return *this;
}

PauliSum& PauliSum::operator-=(const PauliSum& rhs) {
  if (rhs.n_ != n_) throw DimensionError("Pauli sums on different registers");
  for (const auto& [p, c] : rhs.terms_) terms_[p] -= c;
  prune();
  return *this;
}

PauliSum& PauliSum::operator*=(Complex s) {
  for (auto& [p, c] : terms_) c *= s;
  prune();
  return *this;
}

PauliSum operator*(const PauliSum& a, const PauliSum& b) {
  if (a.n_ != b.n_) throw DimensionError("Pauli sums on different registers");
  PauliSum out(a.n_);
  for (const auto& [pa, ca] : a.terms_) {
    for (const auto& [pb, cb] : b.terms_) {
      auto [phase, p] = multiply_pauli(pa, pb);
      out.terms_[p] += phase * ca * cb;
    }
  }
  out.prune();
  return out;
}

PauliSum jordan_wigner(const FermionOperator& op, int n_modes) {
  if (op.n_modes() > n_modes) {
    throw DimensionError("operator on " + std::to_string(op.n_modes()) +
                         " modes does not fit " + std::to_string(n_modes) + " qubits");
  }
  std::vector<PauliSum> creators;
  std::vector<PauliSum> annihilators;
  for (int j = 0; j < n_modes; ++j) {
    PauliString x(n_modes);
    for (int q = 0; q < j; ++q) x.set(q, 'Z');
    PauliString y = x;
    x.set(j, 'X');
    y.set(j, 'Y');
    PauliSum cre = PauliSum::term(x, 0.5) + PauliSum::term(y, -0.5 * kI);
    PauliSum ann = PauliSum::term(x, 0.5) + PauliSum::term(y, 0.5 * kI);
    creators.push_back(std::move(cre));
    annihilators.push_back(std::move(ann));
  }
  PauliSum out(n_modes);
  for (const auto& [factors, c] : op.terms()) {
    PauliSum term = PauliSum::identity(n_modes, c);
    for (const auto& f : factors) {
      term = term * (f.dagger ? creators[f.mode] : annihilators[f.mode]);
    }
    out += term;
  }
  return out;
}

namespace {

std::vector<std::vector<PauliString>> colour(const std::vector<PauliString>& ordered,
                                             GroupingRule rule) {
  std::vector<std::vector<PauliString>> groups;
  for (const auto& p : ordered) {
    auto fits = [&](const std::vector<PauliString>& g) {
      return std::all_of(g.begin(), g.end(), [&](const PauliString& q) {
        return rule == GroupingRule::qubit_wise ? qubit_wise_commutes(p, q) : commutes(p, q);
      });
    };
    auto it = std::find_if(groups.begin(), groups.end(), fits);
    if (it == groups.end()) {
      groups.push_back({p});
    } else {
      it->push_back(p);
    }
  }
  return groups;
}

}  // namespace

std::vector<std::vector<PauliString>> group_commuting(const PauliSum& h, GroupingRule rule) {
  // Magnitudes are quantized so that values equal up to round-off tie.
  std::vector<std::pair<PauliString, double>> items;
  for (const auto& [p, c] : h.terms()) items.emplace_back(p, std::round(std::abs(c) * 1e10));
  std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<PauliString> ordered;
  ordered.reserve(items.size());
  for (auto& [p, mag] : items) ordered.push_back(p);
  return colour(ordered, rule);
}

std::vector<std::vector<PauliString>> group_strings(std::vector<PauliString> strings,
                                                    GroupingRule rule) {
  std::sort(strings.begin(), strings.end());
  strings.erase(std::unique(strings.begin(), strings.end()), strings.end());
  return colour(strings, rule);
}

}  // namespace qgf
