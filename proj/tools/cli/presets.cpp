#include <cmath>

#include "unplab/protocols.hpp"
#include "unplab_cli.hpp"

namespace unplab::cli {

namespace {

Vector bell(std::size_t v) {
  const double r = 1.0 / std::sqrt(2.0);
  const double sign = (v & 2U) ? -1.0 : 1.0;
  Vector psi = Vector::Zero(4);
  if (v & 1U) {
    psi(1) = r;
    psi(2) = sign * r;
  } else {
    psi(0) = r;
    psi(3) = sign * r;
  }
  return psi;
}

DensityOperator ket(std::size_t dim, std::size_t index) { return basis_state({dim}, index); }

// X uniform over four values, (B, C) in the Bell state indexed by x.
CqState superdense_cqq() {
  std::vector<DensityOperator> conds;
  for (std::size_t x = 0; x < 4; ++x) conds.push_back(pure_state(bell(x), {2, 2}));
  return CqState(std::vector<double>(4, 0.25), std::move(conds), 2);
}

// X uniform over four values, B empty (|0>), C a copy of the low bit of x.
CqState classical_leak_cqq() {
  std::vector<DensityOperator> conds;
  for (std::size_t x = 0; x < 4; ++x) conds.push_back(basis_state({2, 2}, x & 1U));
  return CqState(std::vector<double>(4, 0.25), std::move(conds), 2);
}

// Uniform bit with branches I/2 and |0><0|.
CqState helstrom_cq() {
  return CqState({0.5, 0.5}, {maximally_mixed(2), ket(2, 0)}, 1);
}

CqState uniform_with_side(std::size_t bits, const DensityOperator& side) {
  const std::size_t count = std::size_t{1} << bits;
  return CqState(std::vector<double>(count, 1.0 / static_cast<double>(count)),
                 std::vector<DensityOperator>(count, side), bits);
}

json channel_kind(const std::string& kind, std::size_t bit = 0) { return {{"kind", kind}, {"bit", bit}}; }

}  // namespace

std::vector<std::string> preset_names(const std::string& subcommand) {
  if (subcommand == "entropy") return {"helstrom", "superdense", "classical-leak"};
  if (subcommand == "chain") {
    return {"superdense", "classical-leak", "cnot-attack", "superdense-leak", "classical-copy-leak"};
  }
  if (subcommand == "extract") return {"ip-uniform", "ip-random", "composed-uniform"};
  if (subcommand == "design") return {"t4-m8"};
  if (subcommand == "reconstruct") return {"exact", "approximate"};
  if (subcommand == "ocl-sim") return protocol_preset_names();
  return {};
}

json preset_config(const std::string& subcommand, const std::string& name) {
  if (subcommand == "entropy") {
    if (name == "helstrom") return {{"state", encode(helstrom_cq())}};
    if (name == "superdense") return {{"state", encode(superdense_cqq())}};
    if (name == "classical-leak") return {{"state", encode(classical_leak_cqq())}};
  } else if (subcommand == "chain") {
    if (name == "superdense") return {{"mode", "chain-rule"}, {"state", encode(superdense_cqq())}};
    if (name == "classical-leak") return {{"mode", "chain-rule"}, {"state", encode(classical_leak_cqq())}};
    if (name == "cnot-attack") {
      return {{"mode", "attack"},
              {"state", encode(uniform_with_side(6, basis_state({64}, 0)))},
              {"channel", {{"kind", "cnot-copy"}, {"k", 6}}}};
    }
    if (name == "superdense-leak") {
      return {{"mode", "degradation"},
              {"state", encode(uniform_with_side(2, maximally_mixed(2)))},
              {"channel", channel_kind("superdense")}};
    }
    if (name == "classical-copy-leak") {
      return {{"mode", "degradation"},
              {"state", encode(uniform_with_side(2, ket(1, 0)))},
              {"channel", channel_kind("classical-copy")}};
    }
  } else if (subcommand == "extract") {
    if (name == "ip-uniform") return {{"mode", "ip"}, {"state", encode(uniform_with_side(6, ket(1, 0)))}, {"eps_ext", 0.25}};
    if (name == "ip-random") {
      return {{"mode", "ip"},
              {"random", {{"n", 8}, {"side_dim", 2}, {"side_weight", 0.3}, {"bias", 0.1}}},
              {"eps_ext", 0.25}};
    }
    if (name == "composed-uniform") {
      return {{"mode", "composed"}, {"state", encode(uniform_with_side(8, ket(1, 0)))}, {"eps_ext", 0.5}, {"m", 2}};
    }
  } else if (subcommand == "design") {
    if (name == "t4-m8") return {{"t", 4}, {"m", 8}};
  } else if (subcommand == "reconstruct") {
    if (name == "exact") return {{"oracle", "ideal"}, {"n", {2, 3, 4, 5, 6}}};
    if (name == "approximate") return {{"oracle", "biased"}, {"n", {3, 4, 5}}, {"epsilon", {0.1, 0.2, 0.3, 0.4}}};
  } else if (subcommand == "ocl-sim") {
    const auto names = protocol_preset_names();
    for (const auto& n : names) {
      if (n == name) return {{"preset", name}};
    }
  }
  throw ConfigError("unknown preset '" + name + "' for subcommand '" + subcommand + "'");
}

}  // namespace unplab::cli
