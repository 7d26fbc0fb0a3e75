// Verifier for weak designs. Kept apart from the constructor so the check
// shares no code with the placement logic.
#include <algorithm>
#include <cmath>
#include <iterator>

#include "unplab/extractors.hpp"

namespace unplab {

DesignCheck verify_weak_design(const WeakDesign& design) {
  DesignCheck out;
  const auto m = design.sets.size();
  out.bound = design.r * static_cast<double>(m);
  if (m == 0) {
    out.message = "design has no sets";
    return out;
  }
  for (std::size_t i = 0; i < m; ++i) {
    const auto& s = design.sets[i];
    if (s.size() != design.t) {
      out.violating_index = i;
      out.message = "set " + std::to_string(i) + " has size " + std::to_string(s.size()) + ", expected " +
                    std::to_string(design.t);
      return out;
    }
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (s[k] >= design.d || (k > 0 && s[k] <= s[k - 1])) {
        out.violating_index = i;
        out.message = "set " + std::to_string(i) + " is not a sorted subset of [d]";
        return out;
      }
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
      Indices common;
      std::set_intersection(design.sets[i].begin(), design.sets[i].end(), design.sets[j].begin(),
                            design.sets[j].end(), std::back_inserter(common));
      sum += std::ldexp(1.0, static_cast<int>(common.size()));
    }
    out.worst_sum = std::max(out.worst_sum, sum);
    if (sum > out.bound * (1.0 + 1e-12) && !out.violating_index) {
      out.violating_index = i;
      out.message = "overlap sum " + std::to_string(sum) + " at set " + std::to_string(i) + " exceeds r*m = " +
                    std::to_string(out.bound);
    }
  }
  out.ok = !out.violating_index.has_value();
  if (out.ok) out.message = "ok";
  return out;
}

}  // namespace unplab
