#pragma once

#include <optional>
#include <string>

#include "unplab/adversary.hpp"
#include "unplab/guessing.hpp"
#include "unplab/qcore.hpp"

namespace unplab {

// -log2 of the optimal guessing weight; +inf when every block is zero.
double min_entropy(const CqState& state, const SolverOptions& options = {});
double min_entropy_from_guess(double guess_weight);

// Lower bound on the smooth min-entropy. Candidates are the state itself and
// the state with every block's spectrum clipped at a common level, with the
// level chosen as low as the purified-distance budget allows.
struct SmoothResult {
  double value = 0.0;  // bits
  double epsilon = 0.0;
  double candidate_distance = 0.0;  // purified distance of the chosen candidate
  double clip_level = 0.0;          // +inf when the state itself won
  std::vector<Matrix> candidate;    // weighted blocks of the winning candidate
  GuessCertificate certificate;
};

SmoothResult smooth_min_entropy_lower(const CqState& state, double epsilon);

// Purified distance between cq operators given by weighted blocks.
double purified_distance_blocks(const std::vector<Matrix>& a, const std::vector<Matrix>& b);

// Weighted blocks clipped at `level` (eigenvalues min(lambda, level)).
std::vector<Matrix> clip_blocks(const std::vector<Matrix>& weighted, double level);

struct EntropyInterval {
  double lower = 0.0;
  double upper = 0.0;
  // False when the upper end relies on a finite strategy list that may miss
  // a better circuit of the same size.
  bool family_complete = false;
  std::string upper_witness;
};

// Bounds on the unpredictability entropy for the given family and smoothing
// radius. The lower end is the smooth min-entropy lower bound. The upper end
// uses that every state within purified distance epsilon admits a family
// guess of weight at least max(best - epsilon, (tr - epsilon)/|X|).
EntropyInterval unpredictability_interval(const CqState& state, double epsilon, const AdversaryFamily& family);

double von_neumann_entropy(const DensityOperator& rho);
// H(rest | conditioning) = H(all) - H(conditioning).
double conditional_entropy(const DensityOperator& rho, const Indices& conditioning);
// I(A:B|C) = H(AC) + H(BC) - H(ABC) - H(C); subsystems not listed are traced out.
double cmi(const DensityOperator& rho, const Indices& a, const Indices& b, const Indices& c);

// Extension of sigma_A to sigma_AB whose purified distance to rho_AB is at
// most that of the A marginals. A is the leading block of factors of rho_AB
// matching sigma_A's dims.
DensityOperator extend_state(const DensityOperator& sigma_a, const DensityOperator& rho_ab);
// Matrix form on positive (possibly unnormalized) operators with A of size dim_a.
Matrix extend_matrix(const Matrix& sigma_a, const Matrix& rho_ab, std::size_t dim_a);
// Blockwise cq form: each weighted block of rho_ab (side dims A then B) is
// extended from the matching block of sigma_a.
std::vector<Matrix> extend_cq(const std::vector<Matrix>& sigma_a, const std::vector<Matrix>& rho_ab, std::size_t dim_a);

struct ChainRuleReport {
  double epsilon = 0.0;
  double ell = 0.0;      // log2 dim(C)
  double h_xb = 0.0;     // (smooth) min-entropy lower bound of X given B
  double h_xbc = 0.0;    // (smooth) min-entropy lower bound of X given BC
  double slack = 0.0;    // h_xbc - (h_xb - 2 ell)
  bool holds = false;
  // Finite-budget interval form: upper(X|BC) >= lower(X|B) - 2 ell.
  std::optional<double> interval_upper_xbc;
  std::optional<double> interval_slack;
  bool family_complete = true;
};

// rho_xbc has side dims {dim B, dim C}.
ChainRuleReport verify_chain_rule(const CqState& rho_xbc, double epsilon, const AdversaryFamily& family);

// Drops trailing side factors, keeping the first `keep` of them.
CqState trace_side_tail(const CqState& state, std::size_t keep);

}  // namespace unplab
