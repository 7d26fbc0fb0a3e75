#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "unplab/types.hpp"

namespace unplab {

inline constexpr std::size_t max_statevector_qubits = 22;

// Pure state on qubits; qubit 0 is the most significant bit of the basis index.
class StateVector {
 public:
  explicit StateVector(std::size_t qubits);  // |0...0>
  StateVector(Vector amplitudes, std::size_t qubits);

  std::size_t qubits() const { return qubits_; }
  const Vector& amplitudes() const { return amps_; }
  Vector& amplitudes() { return amps_; }

  void apply_1q(std::size_t q, const Matrix& gate);
  void apply_h(std::size_t q);
  void apply_x(std::size_t q);
  void apply_cnot(std::size_t control, std::size_t target);

  // Applies blocks[c] to `targets` whenever the control qubits read c
  // (controls listed most significant first). Blocks act on the targets in
  // the listed order.
  void apply_multiplexed(const Indices& controls, const Indices& targets, const std::vector<Matrix>& blocks,
                         bool adjoint = false);

  // Probability that `qubits` (most significant first) read `value`.
  double probability(const Indices& qubits, std::uint64_t value) const;
  double norm() const { return amps_.norm(); }

 private:
  std::size_t bit(std::size_t q) const { return qubits_ - 1 - q; }
  std::size_t qubits_;
  Vector amps_;
};

}  // namespace unplab
