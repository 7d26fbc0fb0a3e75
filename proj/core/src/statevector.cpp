#include "unplab/statevector.hpp"

#include <cmath>

namespace unplab {

namespace {

void check_qubits(std::size_t q) {
  if (q == 0) throw ValidationError("statevector needs at least one qubit");
  if (q > max_statevector_qubits) throw CapacityError("statevector limited to 22 qubits");
}

std::uint64_t read(std::uint64_t index, const Indices& qubits, std::size_t total) {
  std::uint64_t v = 0;
  for (auto q : qubits) v = (v << 1) | ((index >> (total - 1 - q)) & 1U);
  return v;
}

}  // namespace

StateVector::StateVector(std::size_t qubits) : qubits_(qubits) {
  check_qubits(qubits);
  amps_ = Vector::Zero(static_cast<Eigen::Index>(std::uint64_t{1} << qubits));
  amps_(0) = 1.0;
}

StateVector::StateVector(Vector amplitudes, std::size_t qubits) : qubits_(qubits), amps_(std::move(amplitudes)) {
  check_qubits(qubits);
  if (static_cast<std::uint64_t>(amps_.size()) != (std::uint64_t{1} << qubits)) {
    throw DimensionError("statevector length differs from 2^qubits");
  }
}

void StateVector::apply_1q(std::size_t q, const Matrix& g) {
  if (q >= qubits_) throw DimensionError("qubit index out of range");
  if (g.rows() != 2 || g.cols() != 2) throw DimensionError("single-qubit gate must be 2x2");
  const std::uint64_t mask = std::uint64_t{1} << bit(q);
  const auto size = static_cast<std::uint64_t>(amps_.size());
  for (std::uint64_t i = 0; i < size; ++i) {
    if (i & mask) continue;
    const Complex a0 = amps_(static_cast<Eigen::Index>(i));
    const Complex a1 = amps_(static_cast<Eigen::Index>(i | mask));
    amps_(static_cast<Eigen::Index>(i)) = g(0, 0) * a0 + g(0, 1) * a1;
    amps_(static_cast<Eigen::Index>(i | mask)) = g(1, 0) * a0 + g(1, 1) * a1;
  }
}

void StateVector::apply_h(std::size_t q) {
  Matrix h(2, 2);
  const double r = 1.0 / std::sqrt(2.0);
  h << r, r, r, -r;
  apply_1q(q, h);
}

void StateVector::apply_x(std::size_t q) {
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  apply_1q(q, x);
}

void StateVector::apply_cnot(std::size_t control, std::size_t target) {
  if (control >= qubits_ || target >= qubits_ || control == target) throw DimensionError("cnot: bad qubits");
  const std::uint64_t cmask = std::uint64_t{1} << bit(control);
  const std::uint64_t tmask = std::uint64_t{1} << bit(target);
  const auto size = static_cast<std::uint64_t>(amps_.size());
  for (std::uint64_t i = 0; i < size; ++i) {
    if ((i & cmask) && !(i & tmask)) std::swap(amps_(static_cast<Eigen::Index>(i)), amps_(static_cast<Eigen::Index>(i | tmask)));
  }
}

void StateVector::apply_multiplexed(const Indices& controls, const Indices& targets, const std::vector<Matrix>& blocks,
                                    bool adjoint) {
  for (auto q : controls) {
    if (q >= qubits_) throw DimensionError("control qubit out of range");
  }
  std::uint64_t tmask = 0;
  for (auto q : targets) {
    if (q >= qubits_) throw DimensionError("target qubit out of range");
    tmask |= std::uint64_t{1} << bit(q);
  }
  if (blocks.size() != (std::size_t{1} << controls.size())) throw DimensionError("one block per control value expected");
  const auto tdim = static_cast<Eigen::Index>(std::uint64_t{1} << targets.size());
  for (const auto& b : blocks) {
    if (b.rows() != tdim || b.cols() != tdim) throw DimensionError("block does not match target count");
  }
  // Offsets of each target value within a group.
  std::vector<std::uint64_t> offsets(static_cast<std::size_t>(tdim), 0);
  for (std::uint64_t v = 0; v < static_cast<std::uint64_t>(tdim); ++v) {
    std::uint64_t off = 0;
    for (std::size_t k = 0; k < targets.size(); ++k) {
      if ((v >> (targets.size() - 1 - k)) & 1U) off |= std::uint64_t{1} << bit(targets[k]);
    }
    offsets[v] = off;
  }
  Vector local(tdim);
  const auto size = static_cast<std::uint64_t>(amps_.size());
  for (std::uint64_t base = 0; base < size; ++base) {
    if (base & tmask) continue;
    const auto c = read(base, controls, qubits_);
    for (Eigen::Index v = 0; v < tdim; ++v) local(v) = amps_(static_cast<Eigen::Index>(base | offsets[static_cast<std::size_t>(v)]));
    const Vector out = adjoint ? Vector(blocks[c].adjoint() * local) : Vector(blocks[c] * local);
    for (Eigen::Index v = 0; v < tdim; ++v) amps_(static_cast<Eigen::Index>(base | offsets[static_cast<std::size_t>(v)])) = out(v);
  }
}

double StateVector::probability(const Indices& qubits, std::uint64_t value) const {
  for (auto q : qubits) {
    if (q >= qubits_) throw DimensionError("qubit index out of range");
  }
  double p = 0.0;
  const auto size = static_cast<std::uint64_t>(amps_.size());
  for (std::uint64_t i = 0; i < size; ++i) {
    if (read(i, qubits, qubits_) == value) p += std::norm(amps_(static_cast<Eigen::Index>(i)));
  }
  return p;
}

}  // namespace unplab
