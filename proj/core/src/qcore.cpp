#include "unplab/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "unplab/config.hpp"
#include "unplab/linalg.hpp"

namespace unplab {

namespace {

std::size_t ceil_log2(std::size_t n) {
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  return bits;
}

std::string fmt(double v) { return std::to_string(v); }

}  // namespace

// ---------------------------------------------------------------- DensityOperator

DensityOperator::DensityOperator(Matrix matrix, Dims dims, Normalization norm)
    : matrix_(std::move(matrix)), dims_(std::move(dims)), norm_(norm) {
  validate();
}

DensityOperator::DensityOperator(Matrix matrix, Dims dims, Normalization norm, TrustTag)
    : matrix_(std::move(matrix)), dims_(std::move(dims)), norm_(norm) {
  check_shape();
  check_trace();
}

DensityOperator DensityOperator::trusted(Matrix matrix, Dims dims, Normalization norm) {
  return DensityOperator(std::move(matrix), std::move(dims), norm, TrustTag{});
}

double DensityOperator::trace() const { return matrix_.trace().real(); }

void DensityOperator::check_shape() const {
  if (matrix_.rows() != matrix_.cols()) throw DimensionError("density operator must be square");
  if (dims_.empty()) throw DimensionError("density operator needs at least one subsystem");
  for (auto d : dims_) {
    if (d == 0) throw DimensionError("subsystem dimension 0");
  }
  if (product(dims_) != static_cast<std::size_t>(matrix_.rows())) {
    throw DimensionError("dims product " + std::to_string(product(dims_)) +
                         " does not match matrix side " + std::to_string(matrix_.rows()));
  }
  check_dimension(static_cast<std::size_t>(matrix_.rows()), "density operator");
}

void DensityOperator::check_trace() const {
  const double herm = linalg::hermiticity_error(matrix_);
  if (herm > tol::state) throw ValidationError("not Hermitian: max |M - M^dag| = " + fmt(herm));
  const double tr = trace();
  if (norm_ == Normalization::normalized) {
    if (std::abs(tr - 1.0) > tol::state) {
      throw ValidationError("normalized state has trace " + fmt(tr));
    }
  } else if (tr < -tol::state || tr > 1.0 + tol::state) {
    throw ValidationError("subnormalized state has trace " + fmt(tr) + " outside [0, 1]");
  }
}

void DensityOperator::validate() const {
  check_shape();
  check_trace();
  const double lmin = linalg::min_eigenvalue(matrix_);
  if (lmin < -tol::state) throw ValidationError("not PSD: min eigenvalue " + fmt(lmin));
}

// ---------------------------------------------------------------- PureVector

PureVector::PureVector(Vector amplitudes, Dims dims, Normalization norm)
    : amplitudes_(std::move(amplitudes)), dims_(std::move(dims)), norm_(norm) {
  if (product(dims_) != static_cast<std::size_t>(amplitudes_.size())) {
    throw DimensionError("pure vector length does not match dims");
  }
  const double nrm = amplitudes_.squaredNorm();
  if (norm_ == Normalization::normalized && std::abs(nrm - 1.0) > tol::state) {
    throw ValidationError("pure vector norm^2 " + fmt(nrm) + " is not 1");
  }
  if (norm_ == Normalization::subnormalized && nrm > 1.0 + tol::state) {
    throw ValidationError("subnormalized vector has norm^2 above 1");
  }
}

DensityOperator PureVector::density() const {
  return DensityOperator::trusted(amplitudes_ * amplitudes_.adjoint(), dims_, norm_);
}

// ---------------------------------------------------------------- KrausChannel

KrausChannel::KrausChannel(std::vector<Matrix> ops, Dims in_dims, Dims out_dims)
    : ops_(std::move(ops)), in_dims_(std::move(in_dims)), out_dims_(std::move(out_dims)) {
  if (ops_.empty()) throw ValidationError("channel needs at least one Kraus operator");
  const auto din = static_cast<Eigen::Index>(product(in_dims_));
  const auto dout = static_cast<Eigen::Index>(product(out_dims_));
  for (const auto& k : ops_) {
    if (k.rows() != dout || k.cols() != din) {
      throw DimensionError("Kraus operator shape does not match in/out dims");
    }
  }
  if (!is_trace_preserving()) {
    throw ValidationError("channel is not trace preserving: error " + fmt(trace_preservation_error()));
  }
}

KrausChannel KrausChannel::identity(const Dims& dims) {
  return KrausChannel({linalg::identity(product(dims))}, dims, dims);
}

KrausChannel KrausChannel::unitary(const Matrix& u, const Dims& dims) {
  return KrausChannel({u}, dims, dims);
}

KrausChannel KrausChannel::depolarizing(double p) {
  if (p < 0.0 || p > 4.0 / 3.0) throw std::invalid_argument("depolarizing parameter out of range");
  Matrix i2 = Matrix::Identity(2, 2);
  Matrix x(2, 2), y(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  y << 0, Complex(0, -1), Complex(0, 1), 0;
  z << 1, 0, 0, -1;
  const double a = std::sqrt(std::max(0.0, 1.0 - 3.0 * p / 4.0));
  const double b = std::sqrt(p / 4.0);
  return KrausChannel({a * i2, b * x, b * y, b * z}, {2}, {2});
}

KrausChannel KrausChannel::dephasing(std::size_t dim) {
  std::vector<Matrix> ops;
  for (std::size_t i = 0; i < dim; ++i) {
    Matrix p = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
    ops.push_back(p);
  }
  return KrausChannel(std::move(ops), {dim}, {dim});
}

double KrausChannel::trace_preservation_error() const {
  const auto din = static_cast<Eigen::Index>(in_dim());
  Matrix acc = Matrix::Zero(din, din);
  for (const auto& k : ops_) acc.noalias() += k.adjoint() * k;
  acc -= Matrix::Identity(din, din);
  return acc.size() == 0 ? 0.0 : acc.cwiseAbs().maxCoeff();
}

bool KrausChannel::is_trace_preserving(double tolerance) const {
  return trace_preservation_error() <= tolerance;
}

Matrix KrausChannel::apply(const Matrix& rho) const {
  const auto dout = static_cast<Eigen::Index>(out_dim());
  Matrix out = Matrix::Zero(dout, dout);
  for (const auto& k : ops_) out.noalias() += k * rho * k.adjoint();
  return out;
}

Matrix KrausChannel::adjoint_apply(const Matrix& effect) const {
  const auto din = static_cast<Eigen::Index>(in_dim());
  Matrix out = Matrix::Zero(din, din);
  for (const auto& k : ops_) out.noalias() += k.adjoint() * effect * k;
  return out;
}

KrausChannel KrausChannel::after(const KrausChannel& first) const {
  if (first.out_dim() != in_dim()) throw DimensionError("channel composition dimension mismatch");
  std::vector<Matrix> ops;
  for (const auto& b : ops_) {
    for (const auto& a : first.ops_) ops.push_back(b * a);
  }
  return KrausChannel(std::move(ops), first.in_dims_, out_dims_);
}

// ---------------------------------------------------------------- Povm

Povm::Povm(std::vector<Matrix> elements, Dims dims) : elements_(std::move(elements)), dims_(std::move(dims)) {
  if (elements_.empty()) throw ValidationError("POVM needs at least one element");
  const auto d = static_cast<Eigen::Index>(product(dims_));
  Matrix acc = Matrix::Zero(d, d);
  for (const auto& e : elements_) {
    if (e.rows() != d || e.cols() != d) throw DimensionError("POVM element shape mismatch");
    if (linalg::hermiticity_error(e) > tol::state) throw ValidationError("POVM element not Hermitian");
    if (linalg::min_eigenvalue(e) < -tol::state) throw ValidationError("POVM element not PSD");
    acc += e;
  }
  acc -= Matrix::Identity(d, d);
  if (acc.size() > 0 && acc.cwiseAbs().maxCoeff() > tol::state) {
    throw ValidationError("POVM elements do not sum to identity");
  }
}

Povm Povm::computational_basis(const Dims& dims) {
  const auto d = static_cast<Eigen::Index>(product(dims));
  std::vector<Matrix> els;
  for (Eigen::Index i = 0; i < d; ++i) {
    Matrix p = Matrix::Zero(d, d);
    p(i, i) = 1.0;
    els.push_back(p);
  }
  return Povm(std::move(els), dims);
}

// ---------------------------------------------------------------- CqState

CqState::CqState(std::vector<double> probs, std::vector<DensityOperator> conditionals,
                 std::optional<std::size_t> alphabet_bits)
    : probs_(std::move(probs)), conditionals_(std::move(conditionals)) {
  if (probs_.empty()) throw ValidationError("cq state needs a non-empty alphabet");
  if (probs_.size() != conditionals_.size()) {
    throw DimensionError("cq state: probs and conditionals differ in length");
  }
  side_dims_ = conditionals_.front().dims();
  double total = 0.0;
  for (std::size_t x = 0; x < probs_.size(); ++x) {
    if (probs_[x] < -tol::state) throw ValidationError("cq state: negative probability");
    if (probs_[x] < 0.0) probs_[x] = 0.0;
    total += probs_[x];
    if (conditionals_[x].dims() != side_dims_) {
      throw DimensionError("cq state: conditionals have differing dims");
    }
    if (!conditionals_[x].is_normalized()) {
      throw ValidationError("cq state: conditionals must be normalized");
    }
  }
  if (total > 1.0 + tol::state) throw ValidationError("cq state: probabilities sum above 1");
  const auto needed = ceil_log2(probs_.size());
  alphabet_bits_ = alphabet_bits.value_or(needed);
  if (alphabet_bits_ < needed) throw ValidationError("cq state: alphabet_bits too small");
}

CqState CqState::from_weighted(const std::vector<Matrix>& weighted, const Dims& side_dims,
                               std::optional<std::size_t> alphabet_bits) {
  std::vector<double> probs;
  std::vector<DensityOperator> conds;
  const auto d = product(side_dims);
  for (const auto& m : weighted) {
    const Matrix h = linalg::hermitian_part(m);
    const double p = h.trace().real();
    if (p > 1e-300) {
      probs.push_back(p);
      Matrix rho = h / p;
      conds.push_back(DensityOperator::trusted(rho, side_dims));
    } else {
      probs.push_back(0.0);
      conds.push_back(DensityOperator::trusted(linalg::identity(d) / static_cast<double>(d), side_dims));
    }
  }
  return CqState(std::move(probs), std::move(conds), alphabet_bits);
}

CqState CqState::from_joint(const DensityOperator& joint) {
  const auto& dims = joint.dims();
  if (dims.size() < 2) throw DimensionError("cq state needs a classical and a side register");
  const auto dx = dims.front();
  Dims side(dims.begin() + 1, dims.end());
  const auto de = static_cast<Eigen::Index>(product(side));
  const auto& m = joint.matrix();
  std::vector<Matrix> blocks;
  for (std::size_t x = 0; x < dx; ++x) {
    for (std::size_t y = 0; y < dx; ++y) {
      if (x == y) continue;
      const auto off = m.block(static_cast<Eigen::Index>(x) * de, static_cast<Eigen::Index>(y) * de, de, de);
      if (off.size() > 0 && off.cwiseAbs().maxCoeff() > tol::state) {
        throw ValidationError("joint state is not classical on its first register");
      }
    }
    blocks.push_back(m.block(static_cast<Eigen::Index>(x) * de, static_cast<Eigen::Index>(x) * de, de, de));
  }
  return from_weighted(blocks, side);
}

double CqState::total_weight() const {
  double t = 0.0;
  for (double p : probs_) t += p;
  return t;
}

bool CqState::is_normalized() const { return std::abs(total_weight() - 1.0) <= tol::state; }

Matrix CqState::weighted(std::size_t x) const { return probs_.at(x) * conditionals_.at(x).matrix(); }

std::vector<Matrix> CqState::weighted_all() const {
  std::vector<Matrix> out;
  out.reserve(probs_.size());
  for (std::size_t x = 0; x < probs_.size(); ++x) out.push_back(weighted(x));
  return out;
}

DensityOperator CqState::side_marginal() const {
  const auto d = static_cast<Eigen::Index>(side_dim());
  Matrix acc = Matrix::Zero(d, d);
  for (std::size_t x = 0; x < probs_.size(); ++x) acc += weighted(x);
  return DensityOperator::trusted(acc, side_dims_,
                                  is_normalized() ? Normalization::normalized : Normalization::subnormalized);
}

DensityOperator CqState::joint() const {
  const auto dx = probs_.size();
  const auto de = static_cast<Eigen::Index>(side_dim());
  const auto total = static_cast<Eigen::Index>(dx) * de;
  check_dimension(static_cast<std::size_t>(total), "cq joint state");
  Matrix m = Matrix::Zero(total, total);
  for (std::size_t x = 0; x < dx; ++x) {
    m.block(static_cast<Eigen::Index>(x) * de, static_cast<Eigen::Index>(x) * de, de, de) = weighted(x);
  }
  Dims dims{dx};
  dims.insert(dims.end(), side_dims_.begin(), side_dims_.end());
  return DensityOperator::trusted(std::move(m), std::move(dims),
                                  is_normalized() ? Normalization::normalized : Normalization::subnormalized);
}

// ---------------------------------------------------------------- free functions

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  check_dimension(a.dim() * b.dim(), "tensor product");
  const auto norm = (a.is_normalized() && b.is_normalized()) ? Normalization::normalized
                                                             : Normalization::subnormalized;
  return DensityOperator::trusted(linalg::kron(a.matrix(), b.matrix()), std::move(dims), norm);
}

DensityOperator partial_trace(const DensityOperator& rho, const Indices& keep) {
  Indices sorted = keep;
  std::sort(sorted.begin(), sorted.end());
  Dims kept;
  for (auto k : sorted) {
    if (k >= rho.dims().size()) throw DimensionError("partial_trace: index out of range");
    kept.push_back(rho.dims()[k]);
  }
  if (kept.empty()) kept.push_back(1);
  return DensityOperator::trusted(linalg::partial_trace(rho.matrix(), rho.dims(), sorted), std::move(kept),
                                  rho.normalization());
}

PureVector purify(const DensityOperator& rho) {
  if (!rho.is_normalized()) {
    throw ValidationError("purify accepts normalized states only");
  }
  const auto eig = linalg::eigh(rho.matrix());
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = eig.values.size(); i-- > 0;) {
    if (eig.values(i) > tol::state) support.push_back(i);
  }
  const auto rank = static_cast<Eigen::Index>(support.size());
  const auto d = static_cast<Eigen::Index>(rho.dim());
  Vector psi = Vector::Zero(d * rank);
  for (Eigen::Index r = 0; r < rank; ++r) {
    const auto col = support[static_cast<std::size_t>(r)];
    const double w = std::sqrt(eig.values(col));
    for (Eigen::Index i = 0; i < d; ++i) psi(i * rank + r) = w * eig.vectors(i, col);
  }
  psi /= psi.norm();
  Dims dims = rho.dims();
  dims.push_back(static_cast<std::size_t>(rank));
  return PureVector(std::move(psi), std::move(dims));
}

Dims replaced_dims(const Dims& dims, const Indices& targets, const Dims& out) {
  if (targets.empty()) {
    Dims result = out;
    result.insert(result.end(), dims.begin(), dims.end());
    return result;
  }
  const auto first = *std::min_element(targets.begin(), targets.end());
  Dims result;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (k == first) result.insert(result.end(), out.begin(), out.end());
    if (std::find(targets.begin(), targets.end(), k) == targets.end()) result.push_back(dims[k]);
  }
  return result;
}

Matrix apply_channel(const KrausChannel& phi, const Matrix& rho, const Dims& dims, const Indices& targets,
                     Dims* out_dims) {
  const auto n = dims.size();
  Dims target_dims;
  std::vector<bool> is_target(n, false);
  for (auto t : targets) {
    if (t >= n) throw DimensionError("apply_channel: target index out of range");
    if (is_target[t]) throw DimensionError("apply_channel: repeated target");
    is_target[t] = true;
    target_dims.push_back(dims[t]);
  }
  if (product(target_dims) != phi.in_dim()) {
    throw DimensionError("apply_channel: channel input dims do not match targeted subsystems");
  }
  if (static_cast<std::size_t>(rho.rows()) != product(dims)) {
    throw DimensionError("apply_channel: matrix side does not match dims");
  }

  Indices perm(targets.begin(), targets.end());
  Dims rest_dims;
  for (std::size_t k = 0; k < n; ++k) {
    if (!is_target[k]) {
      perm.push_back(k);
      rest_dims.push_back(dims[k]);
    }
  }
  const Matrix front = linalg::permute_subsystems(rho, dims, perm);
  const auto drest = product(rest_dims);
  const auto dout_total = phi.out_dim() * drest;
  check_dimension(dout_total, "channel output");
  const Matrix id_rest = linalg::identity(drest);

  const auto dout = static_cast<Eigen::Index>(dout_total);
  Matrix mid = Matrix::Zero(dout, dout);
  for (const auto& k : phi.ops()) {
    const Matrix big = linalg::kron(k, id_rest);
    mid.noalias() += big * front * big.adjoint();
  }

  // mid is ordered (outputs..., rest...). Move outputs to the first target slot.
  const auto n_out = phi.out_dims().size();
  Dims mid_dims = phi.out_dims();
  mid_dims.insert(mid_dims.end(), rest_dims.begin(), rest_dims.end());
  const std::size_t insert_at = [&] {
    if (targets.empty()) return std::size_t{0};
    const auto first = *std::min_element(targets.begin(), targets.end());
    std::size_t before = 0;
    for (std::size_t k = 0; k < first; ++k) before += is_target[k] ? 0 : 1;
    return before;
  }();
  Indices back;
  for (std::size_t r = 0; r < insert_at; ++r) back.push_back(n_out + r);
  for (std::size_t o = 0; o < n_out; ++o) back.push_back(o);
  for (std::size_t r = insert_at; r < rest_dims.size(); ++r) back.push_back(n_out + r);
  Dims final_dims;
  for (auto b : back) final_dims.push_back(mid_dims[b]);
  if (out_dims != nullptr) *out_dims = final_dims;
  if (mid_dims.empty()) return mid;
  return linalg::permute_subsystems(mid, mid_dims, back);
}

DensityOperator apply_channel(const KrausChannel& phi, const DensityOperator& rho, const Indices& targets) {
  Dims out_dims;
  Matrix m = apply_channel(phi, rho.matrix(), rho.dims(), targets, &out_dims);
  if (out_dims.empty()) out_dims.push_back(1);
  return DensityOperator::trusted(linalg::hermitian_part(m), std::move(out_dims), rho.normalization());
}

double povm_guess_probability(const Povm& povm, const CqState& state) {
  if (povm.dim() != state.side_dim()) throw DimensionError("POVM dimension does not match side register");
  double p = 0.0;
  const auto k = std::min(povm.outcomes(), state.alphabet_size());
  for (std::size_t x = 0; x < k; ++x) {
    p += state.prob(x) * (povm.elements()[x] * state.conditional(x).matrix()).trace().real();
  }
  return p;
}

DensityOperator maximally_mixed(std::size_t dim) {
  if (dim == 0) throw DimensionError("maximally_mixed: dimension 0");
  return DensityOperator::trusted(linalg::identity(dim) / static_cast<double>(dim), {dim});
}

PureVector maximally_entangled(std::size_t dim) {
  if (dim == 0) throw DimensionError("maximally_entangled: dimension 0");
  const auto d = static_cast<Eigen::Index>(dim);
  Vector psi = Vector::Zero(d * d);
  for (Eigen::Index i = 0; i < d; ++i) psi(i * d + i) = 1.0 / std::sqrt(static_cast<double>(dim));
  return PureVector(std::move(psi), {dim, dim});
}

DensityOperator basis_state(const Dims& dims, std::size_t index) {
  const auto d = product(dims);
  if (index >= d) throw DimensionError("basis_state: index out of range");
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  m(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
  return DensityOperator::trusted(std::move(m), dims);
}

DensityOperator pure_state(const Vector& psi, const Dims& dims) {
  return PureVector(psi, dims).density();
}

}  // namespace unplab
