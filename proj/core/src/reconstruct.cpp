#include "unplab/reconstruct.hpp"

#include <cmath>

#include "unplab/extractors.hpp"

namespace unplab {

namespace {

constexpr std::size_t max_dense_qubits = 12;

Matrix pauli_x() {
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

void check_source_bits(std::size_t n) {
  if (n == 0) throw ValidationError("reconstruction needs n >= 1");
  if (n > max_reconstruct_source_bits) throw CapacityError("reconstruction supports n <= 10");
}

}  // namespace

std::string to_string(StageKind kind) {
  switch (kind) {
    case StageKind::prepare: return "prepare";
    case StageKind::hadamard: return "hadamard";
    case StageKind::predictor: return "predictor";
    case StageKind::cnot: return "cnot";
    case StageKind::inverse_predictor: return "inverse_predictor";
    case StageKind::measure: return "measure";
  }
  return "unknown";
}

Matrix PredictorOracle::dense_unitary() const {
  const std::size_t qubits = 1 + side_qubits + n + anc_qubits;
  if (qubits > max_dense_qubits) throw CapacityError("dense oracle limited to 12 qubits");
  const auto dim = static_cast<Eigen::Index>(std::uint64_t{1} << qubits);
  const std::uint64_t anc_dim = std::uint64_t{1} << anc_qubits;
  const std::uint64_t seed_dim = std::uint64_t{1} << n;
  const std::uint64_t side_dim = std::uint64_t{1} << side_qubits;
  Matrix u = Matrix::Zero(dim, dim);
  auto index = [&](std::uint64_t o, std::uint64_t e, std::uint64_t y, std::uint64_t a) {
    return static_cast<Eigen::Index>((((o * side_dim + e) * seed_dim + y) * anc_dim) + a);
  };
  for (std::uint64_t e = 0; e < side_dim; ++e) {
    for (std::uint64_t y = 0; y < seed_dim; ++y) {
      const Matrix& b = block(e, y);
      for (std::uint64_t ci = 0; ci < 2 * anc_dim; ++ci) {
        for (std::uint64_t ri = 0; ri < 2 * anc_dim; ++ri) {
          u(index(ri / anc_dim, e, y, ri % anc_dim), index(ci / anc_dim, e, y, ci % anc_dim)) =
              b(static_cast<Eigen::Index>(ri), static_cast<Eigen::Index>(ci));
        }
      }
    }
  }
  return u;
}

double PredictorOracle::unitarity_error() const {
  double worst = 0.0;
  for (const auto& b : blocks) {
    worst = std::max(worst, (b.adjoint() * b - Matrix::Identity(b.rows(), b.cols())).cwiseAbs().maxCoeff());
  }
  return worst;
}

PredictorOracle make_ideal_ip_predictor(std::size_t n) {
  check_source_bits(n);
  PredictorOracle o;
  o.n = n;
  o.side_qubits = n;
  o.anc_qubits = 0;
  o.declared_gate_cost = static_cast<int>(n);
  o.name = "ideal-ip";
  const std::uint64_t count = std::uint64_t{1} << n;
  o.blocks.reserve(static_cast<std::size_t>(count * count));
  for (std::uint64_t e = 0; e < count; ++e) {
    for (std::uint64_t y = 0; y < count; ++y) {
      o.blocks.push_back(ip_word(e, y) != 0 ? pauli_x() : Matrix::Identity(2, 2));
    }
  }
  return o;
}

PredictorOracle make_biased_predictor(std::size_t n, double epsilon) {
  check_source_bits(n);
  if (!(epsilon >= 0.0 && epsilon <= 0.5)) throw ValidationError("bias epsilon must lie in [0, 1/2]");
  PredictorOracle o;
  o.n = n;
  o.side_qubits = n;
  o.anc_qubits = 1;
  o.declared_gate_cost = static_cast<int>(n) + 3;
  o.bias = epsilon;
  o.name = "biased-ip";

  // Ancilla rotation leaves amplitude sqrt(1/2 - eps) on |1>, which the
  // CNOT turns into a wrong output bit.
  const double theta = std::asin(std::sqrt(0.5 - epsilon));
  Matrix rot(2, 2);
  rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  Matrix z = Matrix::Identity(2, 2);
  z(1, 1) = -1.0;
  Matrix cnot_anc_to_out = Matrix::Zero(4, 4);  // index = out * 2 + anc
  cnot_anc_to_out(0, 0) = 1.0;
  cnot_anc_to_out(3, 1) = 1.0;
  cnot_anc_to_out(2, 2) = 1.0;
  cnot_anc_to_out(1, 3) = 1.0;
  const Matrix id2 = Matrix::Identity(2, 2);
  Matrix x_out = Matrix::Zero(4, 4);
  x_out(2, 0) = x_out(3, 1) = x_out(0, 2) = x_out(1, 3) = 1.0;

  auto kron2 = [](const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
    return out;
  };
  const Matrix prep0 = cnot_anc_to_out * kron2(id2, rot);
  const Matrix prep1 = cnot_anc_to_out * kron2(id2, z) * kron2(id2, rot);

  const std::uint64_t count = std::uint64_t{1} << n;
  o.blocks.reserve(static_cast<std::size_t>(count * count));
  for (std::uint64_t e = 0; e < count; ++e) {
    for (std::uint64_t y = 0; y < count; ++y) {
      const Matrix& prep = (y & 1U) ? prep1 : prep0;
      o.blocks.push_back(ip_word(e, y) != 0 ? Matrix(x_out * prep) : prep);
    }
  }
  return o;
}

Indices ReconstructionCircuit::seed_qubits() const {
  Indices q;
  for (std::size_t i = 0; i < oracle.n; ++i) q.push_back(1 + i);
  return q;
}

Indices ReconstructionCircuit::side_qubits() const {
  Indices q;
  for (std::size_t i = 0; i < oracle.side_qubits; ++i) q.push_back(2 + oracle.n + i);
  return q;
}

Indices ReconstructionCircuit::anc_qubits() const {
  Indices q;
  for (std::size_t i = 0; i < oracle.anc_qubits; ++i) q.push_back(2 + oracle.n + oracle.side_qubits + i);
  return q;
}

ReconstructionCircuit build_reconstructor(const PredictorOracle& oracle) {
  check_source_bits(oracle.n);
  const std::uint64_t expected = (std::uint64_t{1} << oracle.side_qubits) << oracle.n;
  if (oracle.blocks.size() != expected) throw DimensionError("oracle block count does not match its registers");
  if (oracle.unitarity_error() > tol::state) throw ValidationError("oracle is not unitary");
  ReconstructionCircuit c;
  c.oracle = oracle;
  if (c.total_qubits() > max_statevector_qubits) throw CapacityError("reconstruction circuit exceeds 22 qubits");
  const int n = static_cast<int>(oracle.n);
  const int s = oracle.declared_gate_cost;
  c.stages = {
      {StageKind::prepare, "X on phase qubit, seed register |0^n>", 1},
      {StageKind::hadamard, "H on phase and seed qubits", n + 1},
      {StageKind::predictor, "oracle on output, side, seed, ancillas", s},
      {StageKind::cnot, "CNOT from output qubit onto phase qubit", 1},
      {StageKind::inverse_predictor, "inverse oracle", s},
      {StageKind::hadamard, "H on phase and seed qubits", n + 1},
      {StageKind::measure, "computational basis on phase and seed", 0},
  };
  c.gate_count = 0;
  for (const auto& st : c.stages) c.gate_count += st.gates;
  return c;
}

namespace {

void run_stages(const ReconstructionCircuit& c, StateVector& sv) {
  Indices controls = c.side_qubits();
  const auto seeds = c.seed_qubits();
  controls.insert(controls.end(), seeds.begin(), seeds.end());
  Indices targets{c.output_qubit()};
  const auto anc = c.anc_qubits();
  targets.insert(targets.end(), anc.begin(), anc.end());

  auto hadamards = [&] {
    sv.apply_h(c.phase_qubit());
    for (auto q : seeds) sv.apply_h(q);
  };
  sv.apply_x(c.phase_qubit());
  hadamards();
  sv.apply_multiplexed(controls, targets, c.oracle.blocks);
  sv.apply_cnot(c.output_qubit(), c.phase_qubit());
  sv.apply_multiplexed(controls, targets, c.oracle.blocks, true);
  hadamards();
}

StateVector initial_state(const ReconstructionCircuit& c, const Vector& side_state) {
  const std::uint64_t side_dim = std::uint64_t{1} << c.oracle.side_qubits;
  if (static_cast<std::uint64_t>(side_state.size()) != side_dim) throw DimensionError("side information has the wrong size");
  const std::size_t total = c.total_qubits();
  Vector amps = Vector::Zero(static_cast<Eigen::Index>(std::uint64_t{1} << total));
  for (std::uint64_t e = 0; e < side_dim; ++e) {
    amps(static_cast<Eigen::Index>(e << c.oracle.anc_qubits)) = side_state(static_cast<Eigen::Index>(e));
  }
  return StateVector(std::move(amps), total);
}

}  // namespace

StateVector reconstruction_final_state(const ReconstructionCircuit& circuit, const Vector& side_state) {
  auto sv = initial_state(circuit, side_state);
  run_stages(circuit, sv);
  return sv;
}

Matrix reconstruction_unitary(const ReconstructionCircuit& circuit) {
  const std::size_t total = circuit.total_qubits();
  if (total > max_dense_qubits) throw CapacityError("dense circuit unitary limited to 12 qubits");
  const auto dim = static_cast<Eigen::Index>(std::uint64_t{1} << total);
  Matrix u(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    Vector basis = Vector::Zero(dim);
    basis(col) = 1.0;
    StateVector sv(std::move(basis), total);
    run_stages(circuit, sv);
    u.col(col) = sv.amplitudes();
  }
  return u;
}

PureVector basis_side_info(std::size_t n, std::uint64_t x) {
  const auto dim = static_cast<Eigen::Index>(std::uint64_t{1} << n);
  if (static_cast<Eigen::Index>(x) >= dim) throw DimensionError("basis value out of range");
  Vector v = Vector::Zero(dim);
  v(static_cast<Eigen::Index>(x)) = 1.0;
  return PureVector(std::move(v), Dims(n, 2));
}

double run_reconstruction(const ReconstructionCircuit& circuit, std::uint64_t x, const PureVector& side_info) {
  const std::uint64_t n = circuit.oracle.n;
  if (x >= (std::uint64_t{1} << n)) throw DimensionError("x out of range");
  const auto sv = reconstruction_final_state(circuit, side_info.amplitudes());
  Indices read{circuit.phase_qubit()};
  const auto seeds = circuit.seed_qubits();
  read.insert(read.end(), seeds.begin(), seeds.end());
  return sv.probability(read, (std::uint64_t{1} << n) | x);
}

double predictor_bias(const PredictorOracle& oracle, std::uint64_t x, const Vector& side_state) {
  const std::uint64_t side_dim = std::uint64_t{1} << oracle.side_qubits;
  if (static_cast<std::uint64_t>(side_state.size()) != side_dim) throw DimensionError("side information has the wrong size");
  const std::uint64_t seeds = std::uint64_t{1} << oracle.n;
  const auto anc_dim = static_cast<Eigen::Index>(std::uint64_t{1} << oracle.anc_qubits);
  double acc = 0.0;
  for (std::uint64_t y = 0; y < seeds; ++y) {
    const auto right = static_cast<Eigen::Index>(ip_word(x, y));
    for (std::uint64_t e = 0; e < side_dim; ++e) {
      const double w = std::norm(side_state(static_cast<Eigen::Index>(e)));
      if (w == 0.0) continue;
      const Matrix& b = oracle.block(e, y);
      double p = 0.0;
      for (Eigen::Index a = 0; a < anc_dim; ++a) p += std::norm(b(right * anc_dim + a, 0));
      acc += w * p;
    }
  }
  return acc / static_cast<double>(seeds);
}

}  // namespace unplab
