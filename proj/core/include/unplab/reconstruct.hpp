#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "unplab/qcore.hpp"
#include "unplab/statevector.hpp"

namespace unplab {

// Inner-product predictor acting on (output qubit, side register, seed
// register, ancillas). It is stored as one unitary on (output, ancillas) per
// pair (side basis value e, seed y), indexed e * 2^n + y.
struct PredictorOracle {
  std::size_t n = 0;            // seed and source length
  std::size_t side_qubits = 0;
  std::size_t anc_qubits = 0;
  int declared_gate_cost = 0;
  std::optional<double> bias;   // epsilon of a synthetic biased oracle
  std::string name;
  std::vector<Matrix> blocks;

  const Matrix& block(std::uint64_t side_value, std::uint64_t seed) const {
    return blocks.at(static_cast<std::size_t>((side_value << n) | seed));
  }
  // Dense matrix on output (x) side (x) seed (x) ancillas, for small sizes.
  Matrix dense_unitary() const;
  // max over blocks of |U^dag U - I|.
  double unitarity_error() const;
};

inline constexpr std::size_t max_reconstruct_source_bits = 10;

// XORs IP(e, y) into the output qubit; e is a basis copy of x.
PredictorOracle make_ideal_ip_predictor(std::size_t n);
// Output agrees with IP(e, y) with probability 1/2 + epsilon for every y, using
// one ancilla.
PredictorOracle make_biased_predictor(std::size_t n, double epsilon);

enum class StageKind { prepare, hadamard, predictor, cnot, inverse_predictor, measure };
std::string to_string(StageKind kind);

struct Stage {
  StageKind kind;
  std::string description;
  int gates = 0;
};

// Register layout of the simulated circuit, most significant qubit first:
// [phase][seed: n][output][side][ancillas].
struct ReconstructionCircuit {
  PredictorOracle oracle;
  std::vector<Stage> stages;
  int gate_count = 0;

  std::size_t total_qubits() const { return 2 + oracle.n + oracle.side_qubits + oracle.anc_qubits; }
  std::size_t phase_qubit() const { return 0; }
  Indices seed_qubits() const;
  std::size_t output_qubit() const { return 1 + oracle.n; }
  Indices side_qubits() const;
  Indices anc_qubits() const;
};

ReconstructionCircuit build_reconstructor(const PredictorOracle& oracle);

// State after the final Hadamard layer, before measurement.
StateVector reconstruction_final_state(const ReconstructionCircuit& circuit, const Vector& side_state);
// Dense unitary of everything before measurement (small sizes only).
Matrix reconstruction_unitary(const ReconstructionCircuit& circuit);

// Probability of reading (1, x) on the phase and seed registers.
double run_reconstruction(const ReconstructionCircuit& circuit, std::uint64_t x, const PureVector& side_info);
// Basis-encoded side information |x> on n qubits.
PureVector basis_side_info(std::size_t n, std::uint64_t x);

// Average over uniform seeds of Pr[output = IP(x, y)] on input
// |0>|side>|y>|0>.
double predictor_bias(const PredictorOracle& oracle, std::uint64_t x, const Vector& side_state);

}  // namespace unplab
