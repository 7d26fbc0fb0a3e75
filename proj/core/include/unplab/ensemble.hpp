#pragma once

#include <cstddef>
#include <vector>

#include "unplab/leakage.hpp"
#include "unplab/qcore.hpp"

namespace unplab {

enum class Source { A, B };

inline char source_name(Source s) { return s == Source::A ? 'A' : 'B'; }

// Global state of two classical n-bit sources A, B with adversary register E
// and environment R. Each (a, b) carries a pure conditional state on E (x) R,
// stored as an amplitude matrix M with rows indexed by E and columns by R, so
// the weighted block on ER is p * vec(M) vec(M)^dag.
class SourceEnsemble {
 public:
  struct Entry {
    std::size_t a = 0;
    std::size_t b = 0;
    double prob = 0.0;
    Matrix amplitudes;  // dim_e x dim_r, unit Frobenius norm
  };

  // `sources` is a cq state over x = (a << n) | b with side dims E factors
  // followed by `env_factors` environment factors. Mixed conditionals are
  // purified into an extra environment factor.
  static SourceEnsemble from_cq(const CqState& sources, std::size_t n, std::size_t env_factors = 0);

  std::size_t bits() const { return n_; }
  std::size_t dim_e() const { return dim_e_; }
  std::size_t dim_r() const { return dim_r_; }
  const std::vector<Entry>& entries() const { return entries_; }

  // cq state of one source given E (environment traced out).
  CqState view(Source which) const;
  // I(A:B|E R) in bits.
  double cmi() const;

  // Applies the leakage channel controlled on the value of `active`, through
  // Stinespring dilations of the pre-processing and leak maps. The new E is
  // (L, E') and the dilation registers join R. No validation is done here.
  void apply_leakage(Source active, const LeakageChannel& chan);

  // Restricts R to the support of its marginal when dim R exceeds `cap`.
  // Exact up to eigenvalues below 1e-14 relative to the largest.
  void compress_environment(std::size_t cap);

 private:
  std::size_t n_ = 0;
  std::size_t dim_e_ = 1;
  std::size_t dim_r_ = 1;
  std::vector<Entry> entries_;
};

}  // namespace unplab
