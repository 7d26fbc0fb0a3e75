#pragma once

#include <optional>
#include <string>
#include <vector>

#include "unplab/adversary.hpp"
#include "unplab/qcore.hpp"

namespace unplab {

// Bounded leakage on a classical register A with side information E:
// first pre_process (E -> E'), then for each value a of A the channel
// leaks[a] (E' -> L (x) E'). Outputs are ordered (A, L, E').
struct LeakageChannel {
  KrausChannel pre_process = KrausChannel::identity({1});
  std::vector<KrausChannel> leaks;
  std::size_t dim_l = 1;
  double lambda = 0.0;                // bound with dim_l <= 2^lambda
  std::optional<int> pre_gate_cost;   // nullopt: unbounded
  std::string name;

  std::size_t dim_a() const { return leaks.size(); }
  std::size_t dim_e() const { return pre_process.in_dim(); }
  std::size_t dim_e_out() const { return pre_process.out_dim(); }

  // Leak stage as one channel on A (x) E' -> A (x) L (x) E'.
  KrausChannel leak_kraus() const;
  // Inverse of leak_kraus(); rejects maps that do not keep A classical.
  static LeakageChannel from_kraus(const KrausChannel& pre_process, const KrausChannel& leak, std::size_t dim_a,
                                   std::size_t dim_l, std::optional<double> lambda = std::nullopt);

  static LeakageChannel identity(std::size_t dim_a, std::size_t dim_e);
  // Writes bit `bit` of a into a one-qubit L.
  static LeakageChannel classical_copy(std::size_t dim_a, std::size_t dim_e, std::size_t bit = 0);
  // A in {0..3}, E one qubit: E is replaced by half of the Bell state
  // indexed by a, the other half becoming L.
  static LeakageChannel superdense();
  // Same encoding for bits (bit, bit + 1) of a, using the last qubit of a
  // dim_e-dimensional E; the other factors of E pass through.
  static LeakageChannel superdense_bits(std::size_t dim_a, std::size_t dim_e, std::size_t bit);
  // No L; XORs the k-bit value a into a k-qubit E.
  static LeakageChannel cnot_copy_attack(std::size_t k);
  // No L; XORs bit `bit` of a into qubit `target` of E (0 is the most
  // significant qubit). Rejected by validation on most states.
  static LeakageChannel xor_into_e(std::size_t dim_a, std::size_t dim_e, std::size_t bit, std::size_t target);
};

struct ClauseResult {
  std::string clause;
  bool ok = true;
  double residual = 0.0;
  std::string detail;
};

struct LeakageValidation {
  bool ok = true;
  double invariance_residual = 0.0;  // sum_a p_a || Tr_L leak_a(rho'_a) - rho'_a ||_1
  std::vector<ClauseResult> clauses;
  // First failing clause, empty when valid.
  std::string failed_clause() const;
};

inline constexpr double invariance_tolerance = 1e-9;

LeakageValidation validate_leakage_channel(const LeakageChannel& chan, const CqState& rho_ae);
LeakageValidation validate_leakage_channel(const LeakageChannel& chan, const DensityOperator& rho_ae);

// Validates first and throws ValidationError naming the failed clause.
CqState apply_leakage(const LeakageChannel& chan, const CqState& rho_ae);
// Applies the channel without validation (attack demonstrations).
CqState apply_leakage_unchecked(const LeakageChannel& chan, const CqState& rho_ae);
// State after pre_process only.
CqState apply_pre_process(const LeakageChannel& chan, const CqState& rho_ae);

struct DilationResult {
  Matrix isometry;   // (dim_out * aux_dim) x dim_in, auxiliary factor last
  std::size_t aux_dim = 0;
  Dims out_dims;     // channel output dims followed by aux_dim
  // Tr_R(V rho V^dag)
  Matrix apply(const Matrix& rho) const;
};

// Isometry built from a minimal Kraus set (rank of the Choi matrix).
DilationResult stinespring_dilate(const KrausChannel& chan);
// Isometry sum_m K_m (x) |m> over the channel's own Kraus list. Controlled
// channels dilated this way share one environment basis across control values;
// minimal sets do not, since the Choi eigenbasis is arbitrary on degenerate
// eigenspaces and can leak the control value into the environment.
DilationResult kraus_dilation(const KrausChannel& chan);
// Kraus set of minimal size for the same channel.
std::vector<Matrix> minimal_kraus(const KrausChannel& chan);

struct DegradationReport {
  double epsilon = 0.0;
  double lambda = 0.0;
  double h_before = 0.0;      // H(A|E)
  double h_after_pre = 0.0;   // H(A|E')
  double h_after = 0.0;       // H(A|L E')
  double slack = 0.0;         // h_after - (h_before - 2 lambda)
  bool holds = false;
  LeakageValidation validation;
  // Finite-budget interval form, when a bounded family is supplied.
  std::optional<int> shifted_budget;
  std::optional<double> interval_upper_after;
  std::optional<double> interval_slack;
};

DegradationReport measure_chain_degradation(const CqState& state, const LeakageChannel& chan, double epsilon,
                                            const AdversaryFamily& family = AdversaryFamily::unbounded());

}  // namespace unplab
