#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "qgf/fermion.hpp"
#include "qgf/pauli.hpp"
#include "qgf/statevector.hpp"

namespace qgf::testing {

/// Random operator with up to `max_terms` products of up to `max_len` ladder factors.
inline FermionOperator random_fermion(std::mt19937_64& rng, int n_modes, int max_terms = 3,
                                      int max_len = 3) {
  std::uniform_int_distribution<int> terms(1, max_terms);
  std::uniform_int_distribution<int> len(0, max_len);
  std::uniform_int_distribution<int> mode(0, n_modes - 1);
  std::bernoulli_distribution dagger(0.5);
  std::normal_distribution<double> coef(0.0, 1.0);
  FermionOperator op(n_modes);
  const int k = terms(rng);
  for (int i = 0; i < k; ++i) {
    LadderProduct f;
    const int l = len(rng);
    for (int j = 0; j < l; ++j) f.push_back({mode(rng), dagger(rng)});
    op += FermionOperator::product(n_modes, f, {coef(rng), coef(rng)});
  }
  return op;
}

inline Eigen::VectorXcd random_state_vector(std::mt19937_64& rng, int n_qubits) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXcd v(1 << n_qubits);
  for (auto& a : v) a = {g(rng), g(rng)};
  return v.normalized();
}

inline StateVector random_state(std::mt19937_64& rng, int n_qubits) {
  return StateVector(n_qubits, random_state_vector(rng, n_qubits));
}

inline double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace qgf::testing
