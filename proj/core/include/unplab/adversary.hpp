#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "unplab/qcore.hpp"

namespace unplab {

enum class StrategyKind {
  constant,     // ignores the state, outputs a fixed value
  measurement,  // fixed POVM, optionally after a preprocessing channel
  basis,        // computational-basis measurement
  circuit,      // unitary from the gate set, then computational-basis measurement
  helstrom,     // optimal measurement for the instance at hand
  pretty_good,  // pretty-good measurement for the instance at hand
};

std::string to_string(StrategyKind kind);

// One distinguisher / guesser with a declared gate cost.
//
// As a distinguisher the strategy outputs one bit: outcome 1 for
// `measurement`, the most significant half of the basis for `basis` and
// `circuit`. As a guesser the outcome index is the guess.
struct Strategy {
  StrategyKind kind = StrategyKind::constant;
  std::string name;
  int gate_cost = 0;
  int constant_value = 0;
  std::optional<KrausChannel> pre;
  std::optional<Povm> povm;
  Matrix unitary;
  std::vector<std::string> gates;

  static Strategy constant(int value);
  static Strategy fixed_measurement(std::string name, Povm povm, int gate_cost,
                                    std::optional<KrausChannel> pre = std::nullopt);
  static Strategy basis_measurement(int gate_cost = 0);
  static Strategy helstrom(int gate_cost);
  static Strategy pretty_good(int gate_cost);
};

class AdversaryFamily {
 public:
  // Family of every measurement; distances collapse to trace distance.
  static AdversaryFamily unbounded();
  // Only the two constant distinguishers.
  static AdversaryFamily constants_only();
  // Finite budget, seeded with the constants.
  explicit AdversaryFamily(int budget);
  // All circuits over {H, T, CNOT} with at most max_gates gates on `qubits`
  // qubits, deduplicated by their measurement statistics.
  static AdversaryFamily enumerate_circuits(int qubits, int max_gates);

  void add(Strategy strategy);

  bool is_unbounded() const { return unbounded_; }
  std::optional<int> budget() const { return budget_; }
  const std::vector<Strategy>& strategies() const { return strategies_; }
  // Descriptor used in serialized form, e.g. "enumerate:2:4".
  const std::string& descriptor() const { return descriptor_; }
  void set_descriptor(std::string d) { descriptor_ = std::move(d); }

 private:
  AdversaryFamily() = default;
  bool unbounded_ = false;
  std::optional<int> budget_;
  std::vector<Strategy> strategies_;
  std::string descriptor_;
};

// Pr[C(a)=1] and Pr[C(b)=1] for one strategy on (possibly subnormalized)
// operators of equal shape.
std::pair<double, double> distinguisher_probabilities(const Strategy& s, const Matrix& a, const Matrix& b);
// Effect E with Pr[C(rho)=1] = tr(E rho); instance-dependent strategies use (a, b).
Matrix distinguisher_effect(const Strategy& s, const Matrix& a, const Matrix& b);

// Success weight sum_x tr(E_x M_x) of a strategy used as a guesser on
// weighted blocks M_x = p_x rho_x.
double guess_success(const Strategy& s, const std::vector<Matrix>& weighted);

struct FamilyGuess {
  double value = 0.0;
  std::string strategy;
};

// Best guessing weight over the family. The best constant guess is always
// considered. For the unbounded family this is the optimal guessing weight.
FamilyGuess best_family_guess(const AdversaryFamily& family, const std::vector<Matrix>& weighted);

// Gate matrices on q qubits (qubit 0 is the most significant).
Matrix gate_h(int qubits, int target);
Matrix gate_t(int qubits, int target);
Matrix gate_cnot(int qubits, int control, int target);

}  // namespace unplab
