#include "unplab/leakage.hpp"

#include <cmath>
#include <limits>

#include "unplab/config.hpp"
#include "unplab/entropy.hpp"
#include "unplab/linalg.hpp"

namespace unplab {

namespace {

std::vector<Matrix> run_pre(const LeakageChannel& chan, const std::vector<Matrix>& blocks) {
  std::vector<Matrix> out;
  out.reserve(blocks.size());
  for (const auto& b : blocks) out.push_back(linalg::hermitian_part(chan.pre_process.apply(b)));
  return out;
}

std::vector<Matrix> run_leak(const LeakageChannel& chan, const std::vector<Matrix>& blocks) {
  std::vector<Matrix> out;
  out.reserve(blocks.size());
  for (std::size_t a = 0; a < blocks.size(); ++a) out.push_back(linalg::hermitian_part(chan.leaks[a].apply(blocks[a])));
  return out;
}

std::vector<Matrix> padded(const CqState& state, std::size_t n) {
  auto blocks = state.weighted_all();
  const auto d = static_cast<Eigen::Index>(state.side_dim());
  if (blocks.size() < n) blocks.resize(n, Matrix::Zero(d, d));
  return blocks;
}

std::size_t ceil_log2_size(std::size_t v) {
  std::size_t k = 0;
  while ((std::size_t{1} << k) < v) ++k;
  return k;
}

}  // namespace

// ---------------------------------------------------------------- construction

KrausChannel LeakageChannel::leak_kraus() const {
  const std::size_t da = dim_a();
  const std::size_t de = dim_e_out();
  check_dimension(da * dim_l * de, "leak map output");
  std::size_t count = 0;
  for (const auto& l : leaks) count = std::max(count, l.ops().size());
  const auto out_local = static_cast<Eigen::Index>(dim_l * de);
  const auto in_local = static_cast<Eigen::Index>(de);
  std::vector<Matrix> ops;
  for (std::size_t k = 0; k < count; ++k) {
    Matrix op = Matrix::Zero(static_cast<Eigen::Index>(da) * out_local, static_cast<Eigen::Index>(da) * in_local);
    for (std::size_t a = 0; a < da; ++a) {
      if (k < leaks[a].ops().size()) {
        op.block(static_cast<Eigen::Index>(a) * out_local, static_cast<Eigen::Index>(a) * in_local, out_local, in_local) =
            leaks[a].ops()[k];
      }
    }
    ops.push_back(std::move(op));
  }
  return KrausChannel(std::move(ops), {da, de}, {da, dim_l, de});
}

LeakageChannel LeakageChannel::from_kraus(const KrausChannel& pre_process, const KrausChannel& leak, std::size_t dim_a,
                                          std::size_t dim_l, std::optional<double> lambda) {
  const std::size_t de = pre_process.out_dim();
  if (leak.in_dim() != dim_a * de || leak.out_dim() != dim_a * dim_l * de) {
    throw DimensionError("leak map must act on A (x) E' and output A (x) L (x) E'");
  }
  const auto out_local = static_cast<Eigen::Index>(dim_l * de);
  const auto in_local = static_cast<Eigen::Index>(de);
  std::vector<std::vector<Matrix>> per_a(dim_a);
  for (const auto& k : leak.ops()) {
    const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
    for (std::size_t a = 0; a < dim_a; ++a) {
      for (std::size_t b = 0; b < dim_a; ++b) {
        const Matrix blk = k.block(static_cast<Eigen::Index>(a) * out_local, static_cast<Eigen::Index>(b) * in_local,
                                   out_local, in_local);
        if (a != b && blk.cwiseAbs().maxCoeff() > tol::state * scale) {
          throw ValidationError("leak map does not keep A classical (Kraus operator mixes A values)");
        }
        if (a == b && blk.cwiseAbs().maxCoeff() > 0.0) per_a[a].push_back(blk);
      }
    }
  }
  LeakageChannel c;
  c.pre_process = pre_process;
  c.dim_l = dim_l;
  c.lambda = lambda.value_or(std::log2(static_cast<double>(dim_l)));
  c.name = "custom";
  for (std::size_t a = 0; a < dim_a; ++a) {
    if (per_a[a].empty()) per_a[a].push_back(Matrix::Zero(out_local, in_local));
    c.leaks.emplace_back(per_a[a], Dims{de}, Dims{dim_l, de});
  }
  return c;
}

LeakageChannel LeakageChannel::identity(std::size_t dim_a, std::size_t dim_e) {
  LeakageChannel c;
  c.pre_process = KrausChannel::identity({dim_e});
  c.dim_l = 1;
  c.lambda = 0.0;
  c.pre_gate_cost = 0;
  c.name = "identity";
  for (std::size_t a = 0; a < dim_a; ++a) c.leaks.emplace_back(std::vector<Matrix>{linalg::identity(dim_e)}, Dims{dim_e}, Dims{1, dim_e});
  return c;
}

LeakageChannel LeakageChannel::classical_copy(std::size_t dim_a, std::size_t dim_e, std::size_t bit) {
  LeakageChannel c;
  c.pre_process = KrausChannel::identity({dim_e});
  c.dim_l = 2;
  c.lambda = 1.0;
  c.pre_gate_cost = 0;
  c.name = "classical-copy";
  const auto de = static_cast<Eigen::Index>(dim_e);
  for (std::size_t a = 0; a < dim_a; ++a) {
    Matrix k = Matrix::Zero(2 * de, de);
    const auto b = static_cast<Eigen::Index>((a >> bit) & 1U);
    k.block(b * de, 0, de, de) = Matrix::Identity(de, de);
    c.leaks.emplace_back(std::vector<Matrix>{k}, Dims{dim_e}, Dims{2, dim_e});
  }
  return c;
}

LeakageChannel LeakageChannel::superdense() {
  auto c = superdense_bits(4, 2, 0);
  c.name = "superdense";
  return c;
}

LeakageChannel LeakageChannel::superdense_bits(std::size_t dim_a, std::size_t dim_e, std::size_t bit) {
  if (dim_e < 2 || dim_e % 2 != 0) throw DimensionError("superdense leak needs a qubit factor at the end of E");
  LeakageChannel c;
  c.pre_process = KrausChannel::identity({dim_e});
  c.dim_l = 2;
  c.lambda = 1.0;
  c.pre_gate_cost = 0;
  c.name = "superdense";
  const double r = 1.0 / std::sqrt(2.0);
  const auto de = static_cast<Eigen::Index>(dim_e);
  const Eigen::Index rest = de / 2;
  // Bell states on (L, last qubit of E'): value v = 2 * (phase flip) + (bit flip).
  for (std::size_t a = 0; a < dim_a; ++a) {
    const std::size_t v = (a >> bit) & 3U;
    const bool flip = (v & 1U) != 0;
    const double sign = (v & 2U) ? -1.0 : 1.0;
    Vector bell = Vector::Zero(4);  // index l * 2 + q
    bell(flip ? 1 : 0) = r;
    bell(flip ? 2 : 3) = sign * r;
    std::vector<Matrix> ops;
    for (Eigen::Index j = 0; j < 2; ++j) {
      Matrix k = Matrix::Zero(2 * de, de);
      for (Eigen::Index e = 0; e < rest; ++e) {
        for (Eigen::Index l = 0; l < 2; ++l) {
          for (Eigen::Index q = 0; q < 2; ++q) k(l * de + e * 2 + q, e * 2 + j) = bell(l * 2 + q);
        }
      }
      ops.push_back(std::move(k));
    }
    c.leaks.emplace_back(std::move(ops), Dims{dim_e}, Dims{2, dim_e});
  }
  return c;
}

LeakageChannel LeakageChannel::xor_into_e(std::size_t dim_a, std::size_t dim_e, std::size_t bit, std::size_t target) {
  if (dim_e < 2 || (dim_e & (dim_e - 1)) != 0) throw DimensionError("xor attack needs E made of qubits");
  const std::size_t qubits = ceil_log2_size(dim_e);
  if (target >= qubits) throw DimensionError("xor attack target qubit out of range");
  const std::size_t mask = std::size_t{1} << (qubits - 1 - target);
  LeakageChannel c;
  c.pre_process = KrausChannel::identity({dim_e});
  c.dim_l = 1;
  c.lambda = 0.0;
  c.pre_gate_cost = 0;
  c.name = "xor-into-e";
  const auto d = static_cast<Eigen::Index>(dim_e);
  for (std::size_t a = 0; a < dim_a; ++a) {
    const std::size_t flip = ((a >> bit) & 1U) ? mask : 0;
    Matrix u = Matrix::Zero(d, d);
    for (std::size_t e = 0; e < dim_e; ++e) u(static_cast<Eigen::Index>(e ^ flip), static_cast<Eigen::Index>(e)) = 1.0;
    c.leaks.emplace_back(std::vector<Matrix>{u}, Dims{dim_e}, Dims{1, dim_e});
  }
  return c;
}

LeakageChannel LeakageChannel::cnot_copy_attack(std::size_t k) {
  if (k == 0 || k > 8) throw CapacityError("copy attack supports 1 to 8 bits");
  const std::size_t dim = std::size_t{1} << k;
  LeakageChannel c;
  c.pre_process = KrausChannel::identity({dim});
  c.dim_l = 1;
  c.lambda = 0.0;
  c.pre_gate_cost = 0;
  c.name = "cnot-copy-attack";
  const auto d = static_cast<Eigen::Index>(dim);
  for (std::size_t a = 0; a < dim; ++a) {
    Matrix u = Matrix::Zero(d, d);
    for (std::size_t e = 0; e < dim; ++e) u(static_cast<Eigen::Index>(e ^ a), static_cast<Eigen::Index>(e)) = 1.0;
    c.leaks.emplace_back(std::vector<Matrix>{u}, Dims{dim}, Dims{1, dim});
  }
  return c;
}

// ---------------------------------------------------------------- validation

std::string LeakageValidation::failed_clause() const {
  for (const auto& c : clauses) {
    if (!c.ok) return c.clause;
  }
  return {};
}

LeakageValidation validate_leakage_channel(const LeakageChannel& chan, const CqState& rho_ae) {
  LeakageValidation v;
  auto add = [&v](std::string clause, bool ok, double residual, std::string detail) {
    v.clauses.push_back({std::move(clause), ok, residual, std::move(detail)});
    v.ok = v.ok && ok;
  };

  bool dims_ok = rho_ae.side_dim() == chan.dim_e() && rho_ae.alphabet_size() <= chan.dim_a() && chan.dim_a() > 0;
  for (const auto& l : chan.leaks) {
    dims_ok = dims_ok && l.in_dim() == chan.dim_e_out() && l.out_dims() == Dims{chan.dim_l, chan.dim_e_out()};
  }
  add("dimensions", dims_ok, 0.0,
      dims_ok ? "ok" : "state or leak maps do not match (A, E) -> (A, L, E') shapes");
  if (!dims_ok) return v;

  const double pre_err = chan.pre_process.trace_preservation_error();
  add("pre-process trace preserving", pre_err <= tol::state, pre_err, "max |sum K^dag K - I|");

  const double cap = std::exp2(chan.lambda);
  const bool bound_ok = static_cast<double>(chan.dim_l) <= cap * (1.0 + 1e-12);
  add("leak dimension bound", bound_ok, static_cast<double>(chan.dim_l),
      "dim L = " + std::to_string(chan.dim_l) + ", 2^lambda = " + std::to_string(cap));

  add("A preserved", true, 0.0, "leak maps are controlled on the classical value of A");

  double leak_err = 0.0;
  for (const auto& l : chan.leaks) leak_err = std::max(leak_err, l.trace_preservation_error());
  add("leak trace preserving", leak_err <= tol::state, leak_err, "max over a of |sum K^dag K - I|");

  const auto before = run_pre(chan, padded(rho_ae, chan.dim_a()));
  const auto after = run_leak(chan, before);
  double residual = 0.0;
  const Dims out_dims{chan.dim_l, chan.dim_e_out()};
  for (std::size_t a = 0; a < before.size(); ++a) {
    const Matrix marginal = linalg::partial_trace(after[a], out_dims, {1});
    residual += linalg::trace_norm_hermitian(marginal - before[a]);
  }
  v.invariance_residual = residual;
  add("marginal invariance", residual <= invariance_tolerance, residual, "sum_a ||Tr_L leak_a(rho'_a) - rho'_a||_1");
  return v;
}

LeakageValidation validate_leakage_channel(const LeakageChannel& chan, const DensityOperator& rho_ae) {
  if (rho_ae.dims().size() != 2) throw DimensionError("leakage validation expects dims {A, E}");
  try {
    return validate_leakage_channel(chan, CqState::from_joint(rho_ae));
  } catch (const ValidationError& e) {
    LeakageValidation v;
    v.ok = false;
    v.clauses.push_back({"A classical", false, 0.0, e.what()});
    return v;
  }
}

CqState apply_pre_process(const LeakageChannel& chan, const CqState& rho_ae) {
  if (rho_ae.side_dim() != chan.dim_e()) throw DimensionError("pre-process input does not match side register");
  return CqState::from_weighted(run_pre(chan, rho_ae.weighted_all()), chan.pre_process.out_dims(), rho_ae.alphabet_bits());
}

CqState apply_leakage_unchecked(const LeakageChannel& chan, const CqState& rho_ae) {
  if (rho_ae.side_dim() != chan.dim_e() || rho_ae.alphabet_size() > chan.dim_a()) {
    throw DimensionError("leakage channel does not match the state");
  }
  const auto after = run_leak(chan, run_pre(chan, padded(rho_ae, chan.dim_a())));
  return CqState::from_weighted(after, {chan.dim_l, chan.dim_e_out()}, rho_ae.alphabet_bits());
}

CqState apply_leakage(const LeakageChannel& chan, const CqState& rho_ae) {
  const auto v = validate_leakage_channel(chan, rho_ae);
  if (!v.ok) throw ValidationError("leakage channel rejected: clause '" + v.failed_clause() + "' failed");
  return apply_leakage_unchecked(chan, rho_ae);
}

// ---------------------------------------------------------------- dilation

std::vector<Matrix> minimal_kraus(const KrausChannel& chan) {
  const auto din = static_cast<Eigen::Index>(chan.in_dim());
  const auto dout = static_cast<Eigen::Index>(chan.out_dim());
  check_dimension(static_cast<std::size_t>(din * dout), "Choi matrix");
  Matrix choi = Matrix::Zero(din * dout, din * dout);
  for (const auto& k : chan.ops()) {
    const Eigen::Map<const Vector> v(k.data(), din * dout);  // column-major: entry (r, i) at i * dout + r
    choi.noalias() += v * v.adjoint();
  }
  const auto eig = linalg::eigh(choi);
  const double top = std::max(eig.values.maxCoeff(), 0.0);
  std::vector<Matrix> ops;
  for (Eigen::Index j = eig.values.size(); j-- > 0;) {
    const double lam = eig.values(j);
    if (!(lam > 1e-12 * std::max(1.0, top))) continue;
    Vector v = std::sqrt(lam) * eig.vectors.col(j);
    ops.push_back(Eigen::Map<Matrix>(v.data(), dout, din));
  }
  return ops;
}

namespace {

DilationResult dilation_from(const std::vector<Matrix>& ops, const KrausChannel& chan) {
  const auto din = static_cast<Eigen::Index>(chan.in_dim());
  const auto dout = static_cast<Eigen::Index>(chan.out_dim());
  const auto r = static_cast<Eigen::Index>(ops.size());
  DilationResult out;
  out.aux_dim = ops.size();
  out.isometry = Matrix::Zero(dout * r, din);
  for (Eigen::Index m = 0; m < r; ++m) {
    for (Eigen::Index row = 0; row < dout; ++row) out.isometry.row(row * r + m) = ops[static_cast<std::size_t>(m)].row(row);
  }
  out.out_dims = chan.out_dims();
  out.out_dims.push_back(out.aux_dim);
  return out;
}

}  // namespace

DilationResult stinespring_dilate(const KrausChannel& chan) { return dilation_from(minimal_kraus(chan), chan); }

DilationResult kraus_dilation(const KrausChannel& chan) { return dilation_from(chan.ops(), chan); }

Matrix DilationResult::apply(const Matrix& rho) const {
  const Matrix full = isometry * rho * isometry.adjoint();
  const auto dout = static_cast<std::size_t>(isometry.rows()) / aux_dim;
  return linalg::partial_trace(full, {dout, aux_dim}, {0});
}

// ---------------------------------------------------------------- degradation

DegradationReport measure_chain_degradation(const CqState& state, const LeakageChannel& chan, double epsilon,
                                            const AdversaryFamily& family) {
  DegradationReport r;
  r.epsilon = epsilon;
  r.lambda = chan.lambda;
  r.validation = validate_leakage_channel(chan, state);
  if (!r.validation.ok) {
    throw ValidationError("leakage channel rejected: clause '" + r.validation.failed_clause() + "' failed");
  }
  const auto mid = apply_pre_process(chan, state);
  const auto after = apply_leakage_unchecked(chan, state);

  if (epsilon == 0.0) {
    r.h_before = min_entropy(state);
    r.h_after_pre = min_entropy(mid);
    r.h_after = min_entropy(after);
  } else {
    // Push the smoothing candidate through the channel; purified distance
    // does not grow under channels, so the image stays in the ball.
    const auto smooth = smooth_min_entropy_lower(state, epsilon);
    r.h_before = smooth.value;
    std::vector<Matrix> cand = smooth.candidate;
    const auto d = static_cast<Eigen::Index>(state.side_dim());
    cand.resize(chan.dim_a(), Matrix::Zero(d, d));
    const auto cand_mid = run_pre(chan, cand);
    const auto cand_after = run_leak(chan, cand_mid);
    auto pushed = [&](const std::vector<Matrix>& image, const CqState& target) {
      auto reference = target.weighted_all();
      const auto side = static_cast<Eigen::Index>(target.side_dim());
      reference.resize(image.size(), Matrix::Zero(side, side));
      double h = smooth_min_entropy_lower(target, epsilon).value;
      if (purified_distance_blocks(reference, image) <= epsilon + 1e-9) {
        h = std::max(h, min_entropy_from_guess(guess_weighted(image).value));
      }
      return h;
    };
    r.h_after_pre = pushed(cand_mid, mid);
    r.h_after = pushed(cand_after, after);
  }
  r.slack = r.h_after - (r.h_before - 2.0 * r.lambda);
  r.holds = r.slack >= -1e-7;

  if (!family.is_unbounded()) {
    const auto interval = unpredictability_interval(after, epsilon, family);
    r.interval_upper_after = interval.upper;
    r.interval_slack = interval.upper - (r.h_before - 2.0 * r.lambda);
    r.holds = r.holds && *r.interval_slack >= -1e-7;
    const int lam_gates = 2 * static_cast<int>(std::ceil(chan.lambda));
    r.shifted_budget = family.budget().value_or(0) + lam_gates + chan.pre_gate_cost.value_or(0);
  }
  return r;
}

}  // namespace unplab
