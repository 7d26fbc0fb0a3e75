#include "unplab/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "unplab/linalg.hpp"

namespace unplab {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError(std::string(what) + ": dimension mismatch");
}

void require_same_dims(const DensityOperator& a, const DensityOperator& b, const char* what) {
  if (a.dims() != b.dims()) throw DimensionError(std::string(what) + ": dims differ");
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

double trace_distance(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "trace_distance");
  return 0.5 * linalg::trace_norm_hermitian(a - b);
}

double root_fidelity(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "fidelity");
  return linalg::trace_norm(linalg::psd_sqrt(a) * linalg::psd_sqrt(b));
}

double generalized_fidelity(const Matrix& a, const Matrix& b) {
  const double ta = a.trace().real();
  const double tb = b.trace().real();
  const double slack = std::sqrt(std::max(0.0, (1.0 - ta) * (1.0 - tb)));
  const double root = root_fidelity(a, b) + slack;
  return clamp01(root * root);
}

double purified_distance(const Matrix& a, const Matrix& b) {
  return std::sqrt(std::max(0.0, 1.0 - generalized_fidelity(a, b)));
}

double trace_distance(const DensityOperator& a, const DensityOperator& b) {
  require_same_dims(a, b, "trace_distance");
  return trace_distance(a.matrix(), b.matrix());
}

double fidelity(const DensityOperator& a, const DensityOperator& b) {
  require_same_dims(a, b, "fidelity");
  const double r = root_fidelity(a.matrix(), b.matrix());
  return clamp01(r * r);
}

double generalized_fidelity(const DensityOperator& a, const DensityOperator& b) {
  require_same_dims(a, b, "generalized_fidelity");
  return generalized_fidelity(a.matrix(), b.matrix());
}

double purified_distance(const DensityOperator& a, const DensityOperator& b) {
  require_same_dims(a, b, "purified_distance");
  return purified_distance(a.matrix(), b.matrix());
}

namespace {

template <class F>
void for_each_block(const CqState& a, const CqState& b, F&& f) {
  if (a.side_dims() != b.side_dims()) throw DimensionError("cq distance: side dims differ");
  const auto n = std::max(a.alphabet_size(), b.alphabet_size());
  const auto d = static_cast<Eigen::Index>(a.side_dim());
  const Matrix zero = Matrix::Zero(d, d);
  for (std::size_t x = 0; x < n; ++x) {
    const Matrix ma = x < a.alphabet_size() ? a.weighted(x) : zero;
    const Matrix mb = x < b.alphabet_size() ? b.weighted(x) : zero;
    f(ma, mb);
  }
}

}  // namespace

double trace_distance(const CqState& a, const CqState& b) {
  double acc = 0.0;
  for_each_block(a, b, [&](const Matrix& ma, const Matrix& mb) { acc += linalg::trace_norm_hermitian(ma - mb); });
  return 0.5 * acc;
}

double generalized_fidelity(const CqState& a, const CqState& b) {
  double root = 0.0;
  for_each_block(a, b, [&](const Matrix& ma, const Matrix& mb) { root += root_fidelity(ma, mb); });
  root += std::sqrt(std::max(0.0, (1.0 - a.total_weight()) * (1.0 - b.total_weight())));
  return clamp01(root * root);
}

double purified_distance(const CqState& a, const CqState& b) {
  return std::sqrt(std::max(0.0, 1.0 - generalized_fidelity(a, b)));
}

DistanceInterval computational_distance(const DensityOperator& a, const DensityOperator& b,
                                        const AdversaryFamily& family) {
  require_same_dims(a, b, "computational_distance");
  DistanceInterval out;
  out.upper = trace_distance(a, b);
  if (family.is_unbounded()) {
    out.lower = out.upper;
    out.witness = "unbounded";
    return out;
  }
  double best = -1.0;
  for (const auto& s : family.strategies()) {
    const auto [pa, pb] = distinguisher_probabilities(s, a.matrix(), b.matrix());
    const double adv = 0.5 * std::abs(pa - pb);
    if (adv > best) {
      best = adv;
      out.witness = s.name;
    }
  }
  out.lower = std::min(std::max(best, 0.0), out.upper);
  return out;
}

OrderCheck operator_leq(const Matrix& a, const Matrix& b, double tolerance) {
  require_same_shape(a, b, "operator_leq");
  const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  if (linalg::hermiticity_error(a) > tol::state * scale || linalg::hermiticity_error(b) > tol::state * scale) {
    throw ValidationError("operator_leq: inputs must be Hermitian");
  }
  OrderCheck out;
  out.min_eigenvalue = linalg::min_eigenvalue(b - a);
  out.holds = out.min_eigenvalue >= -tolerance;
  return out;
}

}  // namespace unplab
