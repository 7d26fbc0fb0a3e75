#include "unplab/adversary.hpp"

#include <cmath>
#include <complex>
#include <unordered_set>

#include "unplab/guessing.hpp"
#include "unplab/linalg.hpp"

namespace unplab {

std::string to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::constant: return "constant";
    case StrategyKind::measurement: return "measurement";
    case StrategyKind::basis: return "basis";
    case StrategyKind::circuit: return "circuit";
    case StrategyKind::helstrom: return "helstrom";
    case StrategyKind::pretty_good: return "pretty_good";
  }
  return "unknown";
}

Strategy Strategy::constant(int value) {
  Strategy s;
  s.kind = StrategyKind::constant;
  s.name = "const-" + std::to_string(value);
  s.constant_value = value;
  return s;
}

Strategy Strategy::fixed_measurement(std::string name, Povm povm, int gate_cost, std::optional<KrausChannel> pre) {
  Strategy s;
  s.kind = StrategyKind::measurement;
  s.name = std::move(name);
  s.gate_cost = gate_cost;
  s.povm = std::move(povm);
  s.pre = std::move(pre);
  return s;
}

Strategy Strategy::basis_measurement(int gate_cost) {
  Strategy s;
  s.kind = StrategyKind::basis;
  s.name = "basis";
  s.gate_cost = gate_cost;
  return s;
}

Strategy Strategy::helstrom(int gate_cost) {
  Strategy s;
  s.kind = StrategyKind::helstrom;
  s.name = "helstrom";
  s.gate_cost = gate_cost;
  return s;
}

Strategy Strategy::pretty_good(int gate_cost) {
  Strategy s;
  s.kind = StrategyKind::pretty_good;
  s.name = "pretty-good";
  s.gate_cost = gate_cost;
  return s;
}

// ---------------------------------------------------------------- families

AdversaryFamily AdversaryFamily::unbounded() {
  AdversaryFamily f;
  f.unbounded_ = true;
  f.strategies_ = {Strategy::constant(0), Strategy::constant(1)};
  f.descriptor_ = "unbounded";
  return f;
}

AdversaryFamily AdversaryFamily::constants_only() {
  AdversaryFamily f(0);
  f.descriptor_ = "constants";
  return f;
}

AdversaryFamily::AdversaryFamily(int budget) : budget_(budget) {
  if (budget < 0) throw ValidationError("adversary family: negative budget");
  strategies_ = {Strategy::constant(0), Strategy::constant(1)};
  descriptor_ = "budget:" + std::to_string(budget);
}

void AdversaryFamily::add(Strategy strategy) {
  if (strategy.gate_cost < 0) throw ValidationError("strategy '" + strategy.name + "' has negative gate cost");
  if (budget_ && strategy.gate_cost > *budget_) {
    throw ValidationError("strategy '" + strategy.name + "' costs " + std::to_string(strategy.gate_cost) +
                          " gates, over the budget of " + std::to_string(*budget_));
  }
  strategies_.push_back(std::move(strategy));
}

namespace {

constexpr double key_grid = 1e8;
constexpr std::size_t enumeration_limit = 200000;

Complex phase_of_first(const Matrix& m, Eigen::Index row_or_all, bool per_row) {
  if (per_row) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const auto z = m(row_or_all, j);
      if (std::abs(z) > 1e-9) return std::conj(z) / std::abs(z);
    }
    return 1.0;
  }
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const auto z = m(i, j);
      if (std::abs(z) > 1e-9) return std::conj(z) / std::abs(z);
    }
  }
  return 1.0;
}

std::size_t hash_rounded(const Matrix& m) {
  std::size_t h = 1469598103934665603ULL;
  auto mix = [&h](long long v) {
    h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      mix(std::llround(m(i, j).real() * key_grid));
      mix(std::llround(m(i, j).imag() * key_grid));
    }
  }
  return h;
}

std::size_t global_phase_key(const Matrix& u) { return hash_rounded(u * phase_of_first(u, 0, false)); }

// Measurement statistics of "apply U, measure in the basis" are invariant
// under a phase on each row of U.
std::size_t row_phase_key(const Matrix& u) {
  Matrix n = u;
  for (Eigen::Index i = 0; i < n.rows(); ++i) n.row(i) *= phase_of_first(u, i, true);
  return hash_rounded(n);
}

Matrix single_qubit_gate(int qubits, int target, const Matrix& g) {
  if (target < 0 || target >= qubits) throw DimensionError("gate target out of range");
  Matrix out = Matrix::Identity(1, 1);
  for (int q = 0; q < qubits; ++q) out = linalg::kron(out, q == target ? g : Matrix::Identity(2, 2));
  return out;
}

double effect_weight(const Matrix& effect, const Matrix& rho) {
  return (effect.transpose().cwiseProduct(rho)).sum().real();
}

Matrix binary_effect(const Povm& povm) {
  const auto d = static_cast<Eigen::Index>(povm.dim());
  Matrix e = Matrix::Zero(d, d);
  const auto n = povm.outcomes();
  for (std::size_t k = n / 2; k < n; ++k) e += povm.elements()[k];
  return e;
}

void require_square_same(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    throw DimensionError("distinguisher inputs differ in shape");
  }
}

}  // namespace

Matrix gate_h(int qubits, int target) {
  Matrix h(2, 2);
  const double r = 1.0 / std::sqrt(2.0);
  h << r, r, r, -r;
  return single_qubit_gate(qubits, target, h);
}

Matrix gate_t(int qubits, int target) {
  Matrix t = Matrix::Zero(2, 2);
  t(0, 0) = 1.0;
  t(1, 1) = std::polar(1.0, M_PI / 4.0);
  return single_qubit_gate(qubits, target, t);
}

Matrix gate_cnot(int qubits, int control, int target) {
  if (control == target || control < 0 || target < 0 || control >= qubits || target >= qubits) {
    throw DimensionError("cnot: bad control/target");
  }
  const auto dim = static_cast<Eigen::Index>(1) << qubits;
  Matrix out = Matrix::Zero(dim, dim);
  const auto cbit = static_cast<Eigen::Index>(1) << (qubits - 1 - control);
  const auto tbit = static_cast<Eigen::Index>(1) << (qubits - 1 - target);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto j = (i & cbit) != 0 ? (i ^ tbit) : i;
    out(j, i) = 1.0;
  }
  return out;
}

AdversaryFamily AdversaryFamily::enumerate_circuits(int qubits, int max_gates) {
  if (qubits < 1 || qubits > 3) throw CapacityError("circuit enumeration supports 1 to 3 qubits");
  if (max_gates < 0 || max_gates > 6) throw CapacityError("circuit enumeration supports at most 6 gates");
  AdversaryFamily f(max_gates);
  f.descriptor_ = "enumerate:" + std::to_string(qubits) + ":" + std::to_string(max_gates);

  struct Gate {
    std::string name;
    Matrix u;
  };
  std::vector<Gate> gates;
  for (int q = 0; q < qubits; ++q) gates.push_back({"H" + std::to_string(q), gate_h(qubits, q)});
  for (int q = 0; q < qubits; ++q) gates.push_back({"T" + std::to_string(q), gate_t(qubits, q)});
  for (int c = 0; c < qubits; ++c) {
    for (int t = 0; t < qubits; ++t) {
      if (c != t) gates.push_back({"CX" + std::to_string(c) + std::to_string(t), gate_cnot(qubits, c, t)});
    }
  }

  struct Node {
    Matrix u;
    std::vector<std::string> names;
  };
  const auto dim = static_cast<Eigen::Index>(1) << qubits;
  std::unordered_set<std::size_t> seen_unitaries;
  std::unordered_set<std::size_t> seen_statistics;
  std::vector<Node> frontier{{Matrix::Identity(dim, dim), {}}};
  seen_unitaries.insert(global_phase_key(frontier.front().u));

  auto admit = [&](const Node& node) {
    if (!seen_statistics.insert(row_phase_key(node.u)).second) return;
    Strategy s;
    s.kind = StrategyKind::circuit;
    s.gate_cost = static_cast<int>(node.names.size());
    s.unitary = node.u;
    s.gates = node.names;
    s.name = "circuit[";
    for (std::size_t i = 0; i < node.names.size(); ++i) s.name += (i ? "," : "") + node.names[i];
    s.name += "]";
    f.strategies_.push_back(std::move(s));
    if (f.strategies_.size() > enumeration_limit) throw CapacityError("circuit enumeration exceeded its limit");
  };
  admit(frontier.front());

  for (int level = 1; level <= max_gates; ++level) {
    std::vector<Node> next;
    for (const auto& node : frontier) {
      for (const auto& g : gates) {
        Matrix u = g.u * node.u;
        if (!seen_unitaries.insert(global_phase_key(u)).second) continue;
        Node child{std::move(u), node.names};
        child.names.push_back(g.name);
        admit(child);
        if (level < max_gates) next.push_back(std::move(child));
      }
    }
    if (seen_unitaries.size() > enumeration_limit) throw CapacityError("circuit enumeration exceeded its limit");
    frontier = std::move(next);
  }
  return f;
}

// ---------------------------------------------------------------- evaluation

Matrix distinguisher_effect(const Strategy& s, const Matrix& a, const Matrix& b) {
  require_square_same(a, b);
  const auto d = a.rows();
  switch (s.kind) {
    case StrategyKind::constant:
      return (s.constant_value != 0 ? 1.0 : 0.0) * Matrix::Identity(d, d);
    case StrategyKind::measurement: {
      if (!s.povm) throw ValidationError("measurement strategy without POVM");
      Matrix e = binary_effect(*s.povm);
      if (s.pre) e = s.pre->adjoint_apply(e);
      if (e.rows() != d) throw DimensionError("measurement strategy does not match the state");
      return e;
    }
    case StrategyKind::basis:
    case StrategyKind::circuit: {
      Matrix e = Matrix::Zero(d, d);
      for (Eigen::Index i = d / 2; i < d; ++i) e(i, i) = 1.0;
      if (s.kind == StrategyKind::basis) return e;
      if (s.unitary.rows() != d) throw DimensionError("circuit strategy does not match the state");
      return linalg::hermitian_part(s.unitary.adjoint() * e * s.unitary);
    }
    case StrategyKind::helstrom: {
      const auto eig = linalg::eigh(a - b);
      Matrix e = Matrix::Zero(d, d);
      for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        if (eig.values(i) > 0.0) e += eig.vectors.col(i) * eig.vectors.col(i).adjoint();
      }
      return e;
    }
    case StrategyKind::pretty_good:
      return pretty_good_measurement({b, a})[1];
  }
  return Matrix::Zero(d, d);
}

std::pair<double, double> distinguisher_probabilities(const Strategy& s, const Matrix& a, const Matrix& b) {
  const Matrix e = distinguisher_effect(s, a, b);
  return {effect_weight(e, a), effect_weight(e, b)};
}

double guess_success(const Strategy& s, const std::vector<Matrix>& weighted) {
  if (weighted.empty()) return 0.0;
  const auto d = weighted.front().rows();
  switch (s.kind) {
    case StrategyKind::constant: {
      const auto v = static_cast<std::size_t>(std::max(0, s.constant_value));
      return v < weighted.size() ? weighted[v].trace().real() : 0.0;
    }
    case StrategyKind::measurement: {
      if (!s.povm) throw ValidationError("measurement strategy without POVM");
      double acc = 0.0;
      const auto n = std::min(s.povm->outcomes(), weighted.size());
      for (std::size_t x = 0; x < n; ++x) {
        Matrix e = s.povm->elements()[x];
        if (s.pre) e = s.pre->adjoint_apply(e);
        if (e.rows() != d) throw DimensionError("measurement strategy does not match the state");
        acc += effect_weight(e, weighted[x]);
      }
      return acc;
    }
    case StrategyKind::basis:
    case StrategyKind::circuit: {
      if (s.kind == StrategyKind::circuit && s.unitary.rows() != d) {
        throw DimensionError("circuit strategy does not match the state");
      }
      double acc = 0.0;
      const auto n = std::min(static_cast<std::size_t>(d), weighted.size());
      for (std::size_t x = 0; x < n; ++x) {
        const auto xi = static_cast<Eigen::Index>(x);
        if (s.kind == StrategyKind::basis) {
          acc += weighted[x](xi, xi).real();
        } else {
          const Vector row = s.unitary.row(xi).adjoint();
          acc += (row.adjoint() * weighted[x] * row)(0, 0).real();
        }
      }
      return acc;
    }
    case StrategyKind::helstrom:
      return guess_weighted(weighted).value;
    case StrategyKind::pretty_good: {
      const auto e = pretty_good_measurement(weighted);
      double acc = 0.0;
      for (std::size_t x = 0; x < weighted.size(); ++x) acc += effect_weight(e[x], weighted[x]);
      return acc;
    }
  }
  return 0.0;
}

FamilyGuess best_family_guess(const AdversaryFamily& family, const std::vector<Matrix>& weighted) {
  FamilyGuess best;
  best.value = -1.0;
  for (std::size_t x = 0; x < weighted.size(); ++x) {
    const double v = weighted[x].trace().real();
    if (v > best.value) {
      best.value = v;
      best.strategy = "const-" + std::to_string(x);
    }
  }
  if (family.is_unbounded()) {
    const auto cert = guess_weighted(weighted);
    if (cert.value > best.value) {
      best.value = cert.value;
      best.strategy = "optimal";
    }
    return best;
  }
  for (const auto& s : family.strategies()) {
    if (s.kind == StrategyKind::constant) continue;
    const double v = guess_success(s, weighted);
    if (v > best.value) {
      best.value = v;
      best.strategy = s.name;
    }
  }
  best.value = std::max(best.value, 0.0);
  return best;
}

}  // namespace unplab
