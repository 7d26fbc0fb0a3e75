#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "unplab/adversary.hpp"
#include "unplab/metrics.hpp"
#include "unplab/qcore.hpp"

namespace unplab {

// Bit strings are stored one bit per byte; bit i of an integer encoding is
// element i (element 0 is the least significant bit).
using BitString = std::vector<std::uint8_t>;

BitString to_bits(std::uint64_t value, std::size_t length);
std::uint64_t from_bits(const BitString& bits);

int ip(const BitString& x, const BitString& y);
inline int ip_word(std::uint64_t x, std::uint64_t y) { return __builtin_popcountll(x & y) & 1; }

struct WeakDesign {
  std::size_t t = 0;
  double r = 1.0;
  std::size_t d = 0;
  std::vector<Indices> sets;  // each sorted, entries in [0, d)
  std::size_t m() const { return sets.size(); }
};

// ceil(log2 v) for v >= 1.
std::size_t ceil_log2(std::uint64_t v);
// t * ceil(t / ln 2) * ceil(log2(4m)).
std::size_t design_seed_length(std::size_t t, std::size_t m);

// Weak (t,1)-design over [design_seed_length(t, m)].
WeakDesign build_weak_design(std::size_t t, std::size_t m, std::uint64_t seed = 0);
// Same construction over a caller-chosen seed length and overlap parameter.
WeakDesign build_weak_design(std::size_t t, std::size_t m, std::size_t d, double r, std::uint64_t seed);

struct DesignCheck {
  bool ok = false;
  std::optional<std::size_t> violating_index;  // 0-based set index
  double worst_sum = 0.0;                      // max_i sum_{j<i} 2^{|S_i n S_j|}
  double bound = 0.0;                          // r * m
  std::string message;
};

// Independent verifier of the weak-design condition and set structure.
DesignCheck verify_weak_design(const WeakDesign& design);

using OneBitExtractor = std::function<int(const BitString& x, const BitString& seed_part)>;

// Output bit i is one_bit(x, y restricted to S_i).
BitString ext_compose(const BitString& x, const BitString& y, const WeakDesign& design, const OneBitExtractor& one_bit);

struct PredictResult {
  DistanceInterval interval;  // distance between p0 rho0 and p1 rho1
  Strategy predictor;         // guesser for X built from the best distinguisher
  double predictor_success = 0.0;
};

// Binary cq state: distance of the weighted branches and a matching predictor.
PredictResult distinguish_equals_predict(const CqState& state, const AdversaryFamily& family);

struct HybridResult {
  std::size_t index = 0;  // 1-based bit position (bit 1 is the least significant)
  double gap = 0.0;
  double total_distance = 0.0;
  std::vector<double> gaps;  // gaps[i-1] = d(sigma_i, sigma_{i-1})
};

// Hybrid gaps for sigma_i = rho_{Z_1..Z_i B} (x) U_{i+1..m}.
HybridResult hybrid_gaps(const CqState& rho_zb);
// Returns the hybrid with the largest gap when the total distance exceeds
// threshold; that gap is at least total / m.
std::optional<HybridResult> hybrid_locate_bit(const CqState& rho_zb, double threshold);

// d(rho_{ZB}, U_m (x) rho_B) for a cq state over m-bit symbols.
double distance_from_uniform(const CqState& rho_zb);

struct IpExtractorReport {
  std::size_t n = 0;
  double eps_ext = 0.0;
  double distance = 0.0;        // d(rho_{IP(X,Y) Y E}, U_1 (x) rho_{YE}), exact
  double min_entropy = 0.0;     // H_min(X|E)
  double k_required = 0.0;      // 1 - 2 log2 eps_ext
  bool hypothesis_met = false;
  bool holds = true;            // distance <= eps_ext + 1e-9 when the hypothesis is met
};

inline constexpr std::size_t max_ip_source_bits = 12;

double ip_output_distance(const CqState& state);
IpExtractorReport ip_extractor_test(const CqState& state, double eps_ext);

struct ExtractorSpec {
  std::size_t n = 0;
  std::size_t m = 1;
  double eps_ext = 0.0;
  WeakDesign design;  // t must equal n
};

struct ComposedExtractorReport {
  std::size_t n = 0, m = 0, d = 0;
  std::size_t active_seed_bits = 0;  // size of the union of the design sets
  double eps_ext = 0.0;
  double distance = 0.0;     // d(rho_{Ext(X,Y) Y E}, U_m (x) rho_{YE}), exact
  double min_entropy = 0.0;
  double k_required = 0.0;   // 1 + r m - 2 log2(eps_ext / m)
  double bound = 0.0;        // eps_ext
  bool hypothesis_met = false;
  bool holds = true;
};

inline constexpr std::size_t max_composed_source_bits = 10;
inline constexpr std::size_t max_composed_output_bits = 3;
inline constexpr std::size_t max_active_seed_bits = 20;

// Entropy threshold of the composed extractor: 1 - 2 log2 eps_ext for m = 1,
// otherwise 1 + r m - 2 log2(eps_ext / m).
double composed_k_required(const ExtractorSpec& spec);
double composed_output_distance(const ExtractorSpec& spec, const CqState& state);
ComposedExtractorReport composed_extractor_test(const ExtractorSpec& spec, const CqState& state);

}  // namespace unplab
