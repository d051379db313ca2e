#include "qgf/lehmann.hpp"

#include <cmath>
#include <numbers>

#include "qgf/errors.hpp"

namespace qgf {

std::string to_string(Sector s) {
  switch (s) {
    case Sector::particle: return "particle";
    case Sector::hole: return "hole";
    case Sector::neutral: return "neutral";
  }
  return "neutral";
}

Sector parse_sector(std::string_view text) {
  if (text == "particle") return Sector::particle;
  if (text == "hole") return Sector::hole;
  if (text == "neutral") return Sector::neutral;
  throw ValidationError("unknown sector '" + std::string(text) + "'");
}

std::vector<double> frequency_grid(double lo, double hi, double step) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !std::isfinite(step)) {
    throw ValidationError("frequency grid bounds must be finite");
  }
  if (!(lo < hi)) throw ValidationError("frequency grid needs omega_min < omega_max");
  if (!(step > 0.0)) throw ValidationError("frequency step must be positive");
  const double intervals = (hi - lo) / step;
  const double rounded = std::round(intervals);
  if (std::abs(intervals - rounded) > 1e-9 * std::max(1.0, intervals)) {
    throw ValidationError("frequency span is not a whole number of steps");
  }
  const auto n = static_cast<std::size_t>(rounded) + 1;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = lo + static_cast<double>(i) * step;
  grid.back() = hi;
  return grid;
}

GreensFunctionData lehmann_gf(const std::vector<LehmannPole>& poles,
                              const std::vector<double>& omega, double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ValidationError("broadening eta must be positive");
  GreensFunctionData out{omega, eta, std::vector<Complex>(omega.size())};
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const Complex z{omega[i], eta};
    Complex acc = 0.0;
    for (const auto& p : poles) acc += p.residue / (z - p.energy);
    out.g[i] = acc;
  }
  return out;
}

std::vector<double> spectral_function(const GreensFunctionData& g) {
  std::vector<double> a(g.g.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = -g.g[i].imag() / std::numbers::pi;
  return a;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionError("trapezoid needs equally long abscissae and values");
  double acc = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) acc += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return acc;
}

}  // namespace qgf
