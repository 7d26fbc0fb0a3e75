#pragma once

#include <optional>
#include <string>
#include <vector>

#include "unplab/ensemble.hpp"
#include "unplab/extractors.hpp"
#include "unplab/leakage.hpp"

namespace unplab {

enum class SeedVariant { chained, fresh };

// Per-round leak, resolved against the current size of E when the round runs.
struct ChannelSpec {
  enum class Kind { identity, classical_copy, superdense, xor_into_e, custom };
  Kind kind = Kind::identity;
  std::size_t bit = 0;     // source bit read by the leak (0 = least significant)
  std::size_t target = 0;  // xor_into_e: qubit of E, 0 = most significant
  std::optional<LeakageChannel> custom;

  LeakageChannel resolve(std::size_t dim_a, std::size_t dim_e) const;
  std::string label() const;
};

struct ProtocolConfig {
  std::string name = "custom";
  std::size_t n = 0;                // bits per source
  CqState sources = CqState({1.0}, {DensityOperator::trusted(Matrix::Identity(1, 1), {1})});
  std::size_t env_factors = 0;      // trailing side factors of `sources` that form R_0
  std::size_t rounds = 0;
  double lambda = 1.0;              // per-round leakage bound
  ExtractorSpec extractor;
  std::vector<ChannelSpec> channels;  // one per round; missing entries leak nothing
  SeedVariant variant = SeedVariant::fresh;
  double epsilon = 0.0;             // smoothing radius for entropy bookkeeping
  std::optional<int> budget;        // initial circuit budget s
  int adversary_round_cost = 0;     // gates spent by the adversary update per round
  bool validate = true;             // false lets invalid channels through (attack runs)
  std::size_t env_cap = 16;         // dim R above which R is compressed
};

struct RoundRecord {
  std::size_t round = 0;
  Source active = Source::B;
  std::string channel;
  double lambda = 0.0;              // log2 dim L of this round's channel
  LeakageValidation validation;

  double h_a_before = 0.0, h_b_before = 0.0;
  double h_a_after = 0.0, h_b_after = 0.0;
  double degradation_slack = 0.0;   // h_active_after - (h_active_before - 2 lambda)
  double passive_change = 0.0;      // h_passive_after - h_passive_before
  // Lower bounds k - (1 + (-1)^{i+1} + 2i) lambda (A) and k - (1 + (-1)^i + 2i) lambda (B) at i = round + 1.
  double alt_bound_a = 0.0, alt_bound_b = 0.0;
  // k - delta * 2 lambda with delta the number of rounds each source was active.
  std::size_t delta_a = 0, delta_b = 0;
  double fresh_bound_a = 0.0, fresh_bound_b = 0.0;

  double cmi = 0.0;                 // I(A:B|E R) after the round
  bool hypothesis_met = false;      // active entropy before >= k_ext + 2 lambda
  double k_required = 0.0;
  double output_distance = 0.0;     // d(Ext(T,S) S E_{i+1}, U (x) S E_{i+1})
  double distance_bound = 0.0;
  std::optional<int> budget_after;  // s - (i+1)(t + 2 ceil(lambda))
  std::size_t dim_e = 0, dim_r = 0;
  CqState output_state = CqState({1.0}, {DensityOperator::trusted(Matrix::Identity(1, 1), {1})});  // T given E_{i+1}
};

struct ProtocolTranscript {
  std::string name;
  SeedVariant variant = SeedVariant::fresh;
  std::size_t n = 0;
  double lambda = 0.0;
  double epsilon = 0.0;
  double eps_ext = 0.0;
  double k = 0.0;                   // min of the initial entropies
  double k_ext = 0.0;
  double h_a0 = 0.0, h_b0 = 0.0, cmi0 = 0.0;
  std::optional<int> budget;
  int budget_decay_per_round = 0;   // t + 2 ceil(lambda), measured constants
  std::vector<RoundRecord> rounds;
};

ProtocolTranscript run_alternating(const ProtocolConfig& config);

struct MarkovCheck {
  bool ok = true;
  std::optional<std::size_t> first_violation;  // round index
  double worst = 0.0;
};
inline constexpr double markov_tolerance = 1e-8;
MarkovCheck check_markov_preservation(const ProtocolTranscript& transcript);

struct ExtractionQuality {
  std::size_t round = 0;
  bool hypothesis_met = false;
  double active_entropy = 0.0;
  double required = 0.0;
  double distance = 0.0;
  double bound = 0.0;
  bool holds = true;  // distance <= bound + 1e-7; vacuous when the hypothesis fails
};
ExtractionQuality check_extraction_quality(const ProtocolTranscript& transcript, std::size_t round);

struct CumulativeDistance {
  std::size_t rounds = 0;
  bool hypotheses_met = true;
  double bound = 0.0;     // i (2 eps + eps_ext)
  double measured = 0.0;  // sum of the per-round output distances
  bool holds = true;
};
// Throws HypothesisError when some round before i did not meet its entropy hypothesis.
CumulativeDistance cumulative_distance_bound(const ProtocolTranscript& transcript, std::size_t i);

// Named configurations: alternating-2round, alternating-4round, fresh-3round, chained-1round.
ProtocolConfig protocol_preset(const std::string& name);
std::vector<std::string> protocol_preset_names();

std::string variant_name(SeedVariant v);
SeedVariant parse_variant(const std::string& s);

}  // namespace unplab
