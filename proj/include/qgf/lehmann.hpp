#pragma once

#include <string>
#include <vector>

#include "qgf/fermion.hpp"

namespace qgf {

/// Charged-excitation sector of a pole or qEOM state.
enum class Sector { particle, hole, neutral };

std::string to_string(Sector s);
Sector parse_sector(std::string_view text);

/// One term residue / (omega + i eta - energy) of a retarded Green's function.
///
/// Particle poles sit at E_n^{N+1} - E_0 and hole poles at E_0 - E_n^{N-1}.
struct LehmannPole {
  double energy = 0.0;
  Complex residue{};
  Sector sector = Sector::particle;
};

/// Inclusive grid lo, lo + step, ..., hi. The span must be a whole number of
/// steps within 1e-9 relative.
std::vector<double> frequency_grid(double lo, double hi, double step);

struct GreensFunctionData {
  std::vector<double> omega;
  double eta = 0.0;
  std::vector<Complex> g;
};

/// Pointwise sum of the poles; throws ValidationError unless eta > 0.
GreensFunctionData lehmann_gf(const std::vector<LehmannPole>& poles,
                              const std::vector<double>& omega, double eta);

/// A(omega) = -Im G(omega) / pi.
std::vector<double> spectral_function(const GreensFunctionData& g);

/// Trapezoid rule on a (possibly non-uniform) ascending grid.
double trapezoid(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qgf
