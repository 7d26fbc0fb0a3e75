#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "unplab/qcore.hpp"

namespace unplab {

// Primal/dual bracket for max sum_x tr(E_x M_x) over POVMs {E_x}, where
// M_x = p_x rho_x. The dual witness sigma satisfies sigma >= M_x for every x.
struct GuessCertificate {
  double value = 0.0;       // primal: sum_x tr(E_x M_x)
  double dual_value = 0.0;  // tr(sigma)
  double gap = 0.0;         // dual_value - value
  double min_dual_eigenvalue = 0.0;  // min_x lambda_min(sigma - M_x)
  std::size_t iterations = 0;
  std::string method;
  bool converged = false;
  std::vector<Matrix> povm_elements;  // empty for combined certificates
  Matrix sigma;

  Povm povm(const Dims& dims) const { return Povm(povm_elements, dims); }
};

struct SolverOptions {
  double gap_tolerance = tol::solver_gap;
  std::size_t max_iterations = 10000;
  // Fixed-point iterations before handing a stalled block to the barrier
  // refinement.
  std::size_t fixed_point_stall = 500;
  std::size_t barrier_max_dim = 32;
  bool allow_barrier = true;
};

GuessCertificate guess_weighted(const std::vector<Matrix>& weighted, const SolverOptions& options = {});
GuessCertificate guessing_probability(const CqState& state, const SolverOptions& options = {});

// Sums certificates of independent blocks, e.g. one per value of a classical
// side register.
GuessCertificate combine_certificates(const std::vector<GuessCertificate>& parts);

// Pretty-good measurement for the weighted blocks.
std::vector<Matrix> pretty_good_measurement(const std::vector<Matrix>& weighted);

// Receives every certificate produced by the solver while installed. One
// audit may be active at a time; it is safe to use from worker threads.
class CertificateAudit {
 public:
  CertificateAudit();
  ~CertificateAudit();
  CertificateAudit(const CertificateAudit&) = delete;
  CertificateAudit& operator=(const CertificateAudit&) = delete;

  struct Entry {
    double gap;
    double min_dual_eigenvalue;
    std::string method;
  };
  std::vector<Entry> entries() const;
};

}  // namespace unplab
