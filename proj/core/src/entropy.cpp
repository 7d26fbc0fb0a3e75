#include "unplab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "unplab/linalg.hpp"
#include "unplab/metrics.hpp"

namespace unplab {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double total_trace(const std::vector<Matrix>& blocks) {
  double t = 0.0;
  for (const auto& b : blocks) t += b.trace().real();
  return t;
}

}  // namespace

double purified_distance_blocks(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
  if (a.size() != b.size()) throw DimensionError("purified distance: alphabets differ");
  double root = 0.0;
  for (std::size_t x = 0; x < a.size(); ++x) root += root_fidelity(a[x], b[x]);
  root += std::sqrt(std::max(0.0, (1.0 - total_trace(a)) * (1.0 - total_trace(b))));
  return std::sqrt(std::max(0.0, 1.0 - std::min(1.0, root * root)));
}

double min_entropy_from_guess(double guess_weight) {
  return guess_weight > 0.0 ? -std::log2(guess_weight) : inf;
}

double min_entropy(const CqState& state, const SolverOptions& options) {
  return min_entropy_from_guess(guessing_probability(state, options).value);
}

std::vector<Matrix> clip_blocks(const std::vector<Matrix>& weighted, double level) {
  std::vector<Matrix> out;
  out.reserve(weighted.size());
  for (const auto& m : weighted) {
    out.push_back(linalg::spectral_apply(m, [level](double v) { return std::clamp(v, 0.0, level); }));
  }
  return out;
}

SmoothResult smooth_min_entropy_lower(const CqState& state, double epsilon) {
  const double tr = state.total_weight();
  if (!(epsilon >= 0.0)) throw ValidationError("smoothing radius must be non-negative");
  if (epsilon >= std::sqrt(tr)) throw ValidationError("smoothing radius must be below sqrt(tr rho)");

  const auto weighted = state.weighted_all();
  SmoothResult out;
  out.epsilon = epsilon;
  out.clip_level = inf;
  out.candidate = weighted;
  out.certificate = guess_weighted(weighted);
  out.value = min_entropy_from_guess(out.certificate.value);
  if (epsilon == 0.0) return out;

  // Clipping keeps each block's eigenbasis, so the distance follows from the
  // spectra alone.
  std::vector<RealVector> spectra;
  double top = 0.0;
  for (const auto& m : weighted) {
    spectra.push_back(linalg::eigenvalues(m).cwiseMax(0.0));
    if (spectra.back().size() > 0) top = std::max(top, spectra.back().maxCoeff());
  }
  auto distance_at = [&](double level) {
    double root = 0.0, clipped = 0.0;
    for (const auto& s : spectra) {
      for (Eigen::Index i = 0; i < s.size(); ++i) {
        const double c = std::min(s(i), level);
        root += std::sqrt(s(i) * c);
        clipped += c;
      }
    }
    root += std::sqrt(std::max(0.0, (1.0 - tr) * (1.0 - clipped)));
    return std::sqrt(std::max(0.0, 1.0 - std::min(1.0, root * root)));
  };
  const double target = epsilon - 1e-12;
  double lo = 0.0, hi = top;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(top, 1e-300); ++it) {
    const double mid = 0.5 * (lo + hi);
    (distance_at(mid) <= target ? hi : lo) = mid;
  }

  auto candidate = clip_blocks(weighted, hi);
  const double verified = purified_distance_blocks(weighted, candidate);
  if (!(verified <= epsilon)) return out;
  auto cert = guess_weighted(candidate);
  const double value = min_entropy_from_guess(cert.value);
  if (value > out.value) {
    out.value = value;
    out.candidate = std::move(candidate);
    out.candidate_distance = verified;
    out.clip_level = hi;
    out.certificate = std::move(cert);
  }
  return out;
}

EntropyInterval unpredictability_interval(const CqState& state, double epsilon, const AdversaryFamily& family) {
  const auto smooth = smooth_min_entropy_lower(state, epsilon);
  EntropyInterval out;
  out.lower = smooth.value;
  out.family_complete = family.is_unbounded();

  const auto weighted = state.weighted_all();
  const auto best = best_family_guess(family, weighted);
  const double n = static_cast<double>(weighted.size());
  const double guaranteed = std::max(best.value - epsilon, (state.total_weight() - epsilon) / n);
  out.upper = min_entropy_from_guess(guaranteed);
  out.upper_witness = best.value - epsilon >= (state.total_weight() - epsilon) / n ? best.strategy : "const-uniform";
  if (out.upper < out.lower - 1e-9) {
    throw Error("unpredictability interval inverted: upper " + std::to_string(out.upper) + " < lower " +
                std::to_string(out.lower));
  }
  out.upper = std::max(out.upper, out.lower);
  return out;
}

double von_neumann_entropy(const DensityOperator& rho) {
  if (!rho.is_normalized()) throw ValidationError("von Neumann entropy needs a normalized state");
  return linalg::entropy_bits(rho.matrix());
}

double conditional_entropy(const DensityOperator& rho, const Indices& conditioning) {
  if (!rho.is_normalized()) throw ValidationError("conditional entropy needs a normalized state");
  Indices keep = conditioning;
  std::sort(keep.begin(), keep.end());
  const double h_all = linalg::entropy_bits(rho.matrix());
  const double h_cond = keep.empty() ? 0.0 : linalg::entropy_bits(linalg::partial_trace(rho.matrix(), rho.dims(), keep));
  return h_all - h_cond;
}

double cmi(const DensityOperator& rho, const Indices& a, const Indices& b, const Indices& c) {
  if (!rho.is_normalized()) throw ValidationError("cmi needs a normalized state");
  auto h = [&](Indices keep) {
    if (keep.empty()) return 0.0;
    std::sort(keep.begin(), keep.end());
    if (std::adjacent_find(keep.begin(), keep.end()) != keep.end()) throw ValidationError("cmi: overlapping subsystems");
    for (auto k : keep) {
      if (k >= rho.dims().size()) throw DimensionError("cmi: subsystem index out of range");
    }
    return linalg::entropy_bits(linalg::partial_trace(rho.matrix(), rho.dims(), keep));
  };
  auto join = [](Indices x, const Indices& y) {
    x.insert(x.end(), y.begin(), y.end());
    return x;
  };
  return h(join(a, c)) + h(join(b, c)) - h(join(join(a, b), c)) - h(c);
}

Matrix extend_matrix(const Matrix& sigma_a, const Matrix& rho_ab, std::size_t dim_a) {
  if (dim_a == 0 || rho_ab.rows() % static_cast<Eigen::Index>(dim_a) != 0 ||
      sigma_a.rows() != static_cast<Eigen::Index>(dim_a)) {
    throw DimensionError("extend: incompatible dimensions");
  }
  const auto da = static_cast<Eigen::Index>(dim_a);
  const auto db = rho_ab.rows() / da;
  const Matrix rho_a = linalg::partial_trace(rho_ab, {dim_a, static_cast<std::size_t>(db)}, {0});

  const Matrix sq_sigma = linalg::psd_sqrt(sigma_a);
  const Matrix sq_rho = linalg::psd_sqrt(rho_a);
  Eigen::JacobiSVD<Matrix> svd(sq_rho * sq_sigma, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix w = svd.matrixV() * svd.matrixU().adjoint();

  const double scale = std::max(rho_a.cwiseAbs().maxCoeff(), 1e-300);
  const Matrix inv_rho = linalg::psd_inv_sqrt(rho_a, 1e-13 * scale);
  const Matrix support = linalg::hermitian_part(inv_rho * rho_a * inv_rho);
  const Matrix k = sq_sigma * w * inv_rho;
  const Matrix lift = linalg::kron(k, Matrix::Identity(db, db));
  const Matrix rest = sq_sigma * w * (Matrix::Identity(da, da) - support) * w.adjoint() * sq_sigma;
  return linalg::hermitian_part(lift * rho_ab * lift.adjoint() +
                                linalg::kron(rest, Matrix::Identity(db, db) / static_cast<double>(db)));
}

DensityOperator extend_state(const DensityOperator& sigma_a, const DensityOperator& rho_ab) {
  const auto& sd = sigma_a.dims();
  const auto& rd = rho_ab.dims();
  if (sd.size() > rd.size() || !std::equal(sd.begin(), sd.end(), rd.begin())) {
    throw DimensionError("extend_state: sigma_A dims must lead rho_AB dims");
  }
  Matrix out = extend_matrix(sigma_a.matrix(), rho_ab.matrix(), sigma_a.dim());
  return DensityOperator(std::move(out), rd, sigma_a.normalization());
}

std::vector<Matrix> extend_cq(const std::vector<Matrix>& sigma_a, const std::vector<Matrix>& rho_ab, std::size_t dim_a) {
  if (sigma_a.size() != rho_ab.size()) throw DimensionError("extend_cq: alphabets differ");
  std::vector<Matrix> out;
  out.reserve(rho_ab.size());
  for (std::size_t x = 0; x < rho_ab.size(); ++x) out.push_back(extend_matrix(sigma_a[x], rho_ab[x], dim_a));
  return out;
}

CqState trace_side_tail(const CqState& state, std::size_t keep) {
  const auto& dims = state.side_dims();
  if (keep > dims.size()) throw DimensionError("trace_side_tail: keep exceeds factor count");
  Indices kept(keep);
  for (std::size_t i = 0; i < keep; ++i) kept[i] = i;
  Dims kept_dims(dims.begin(), dims.begin() + static_cast<std::ptrdiff_t>(keep));
  std::vector<Matrix> blocks;
  for (const auto& m : state.weighted_all()) {
    blocks.push_back(keep == 0 ? Matrix::Constant(1, 1, m.trace()) : linalg::partial_trace(m, dims, kept));
  }
  if (kept_dims.empty()) kept_dims = {1};
  return CqState::from_weighted(blocks, kept_dims, state.alphabet_bits());
}

ChainRuleReport verify_chain_rule(const CqState& rho_xbc, double epsilon, const AdversaryFamily& family) {
  const auto& dims = rho_xbc.side_dims();
  if (dims.size() < 2) throw ValidationError("chain rule: side information must split as B then C");
  const std::size_t dim_c = dims.back();
  const CqState rho_xb = trace_side_tail(rho_xbc, dims.size() - 1);

  ChainRuleReport r;
  r.epsilon = epsilon;
  r.ell = std::log2(static_cast<double>(dim_c));

  if (epsilon == 0.0) {
    r.h_xb = min_entropy(rho_xb);
    r.h_xbc = min_entropy(rho_xbc);
  } else {
    const auto smooth_xb = smooth_min_entropy_lower(rho_xb, epsilon);
    r.h_xb = smooth_xb.value;
    const auto full = rho_xbc.weighted_all();
    const auto extended = extend_cq(smooth_xb.candidate, full, rho_xb.side_dim());
    double h_ext = -inf;
    if (purified_distance_blocks(full, extended) <= epsilon + 1e-9) {
      h_ext = min_entropy_from_guess(guess_weighted(extended).value);
    }
    r.h_xbc = std::max(h_ext, smooth_min_entropy_lower(rho_xbc, epsilon).value);
  }
  r.slack = r.h_xbc - (r.h_xb - 2.0 * r.ell);
  r.holds = r.slack >= -1e-7;

  if (!family.is_unbounded()) {
    const auto interval = unpredictability_interval(rho_xbc, epsilon, family);
    r.interval_upper_xbc = interval.upper;
    r.interval_slack = interval.upper - (r.h_xb - 2.0 * r.ell);
    r.family_complete = interval.family_complete;
    r.holds = r.holds && *r.interval_slack >= -1e-7;
  }
  return r;
}

}  // namespace unplab
