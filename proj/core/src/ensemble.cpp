#include "unplab/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "unplab/linalg.hpp"

namespace unplab {

namespace {

// Entropy (bits) of sum_j p_j |v_j><v_j| with v_j = vec(M_j); uses the Gram
// matrix when it is the smaller of the two.
double mixture_entropy(const std::vector<const SourceEnsemble::Entry*>& members) {
  if (members.empty()) return 0.0;
  const Eigen::Index size = members.front()->amplitudes.size();
  const auto count = static_cast<Eigen::Index>(members.size());
  if (count <= size) {
    Matrix gram(count, count);
    for (Eigen::Index j = 0; j < count; ++j) {
      const auto& mj = members[static_cast<std::size_t>(j)]->amplitudes;
      for (Eigen::Index k = j; k < count; ++k) {
        const auto& mk = members[static_cast<std::size_t>(k)]->amplitudes;
        const Complex overlap = (mj.conjugate().cwiseProduct(mk)).sum();
        const double w = std::sqrt(members[static_cast<std::size_t>(j)]->prob * members[static_cast<std::size_t>(k)]->prob);
        gram(j, k) = w * overlap;
        gram(k, j) = std::conj(gram(j, k));
      }
    }
    return linalg::entropy_bits(gram);
  }
  Matrix rho = Matrix::Zero(size, size);
  for (const auto* e : members) {
    const Eigen::Map<const Vector> v(e->amplitudes.data(), size);
    rho.noalias() += e->prob * (v * v.adjoint());
  }
  return linalg::entropy_bits(linalg::hermitian_part(rho));
}

// Rows of x are (out, aux) with aux fastest; moves aux into the column index
// as the most significant part, padding aux up to aux_total.
Matrix fold_aux(const Matrix& x, Eigen::Index out, Eigen::Index aux, Eigen::Index aux_total) {
  const Eigen::Index cols = x.cols();
  Matrix folded = Matrix::Zero(out, aux_total * cols);
  for (Eigen::Index o = 0; o < out; ++o) {
    for (Eigen::Index q = 0; q < aux; ++q) folded.block(o, q * cols, 1, cols) = x.row(o * aux + q);
  }
  return folded;
}

}  // namespace

SourceEnsemble SourceEnsemble::from_cq(const CqState& sources, std::size_t n, std::size_t env_factors) {
  if (n == 0 || n > 5) throw CapacityError("source ensembles support 1 to 5 bits per source");
  if (sources.alphabet_size() > (std::size_t{1} << (2 * n))) throw DimensionError("source alphabet exceeds 2n bits");
  const auto& dims = sources.side_dims();
  if (env_factors > dims.size()) throw DimensionError("more environment factors than side factors");
  SourceEnsemble ens;
  ens.n_ = n;
  ens.dim_e_ = 1;
  for (std::size_t i = 0; i + env_factors < dims.size(); ++i) ens.dim_e_ *= dims[i];
  const std::size_t base_r = sources.side_dim() / ens.dim_e_;

  struct Spectral {
    std::size_t x;
    double prob;
    RealVector values;
    Matrix vectors;
  };
  std::vector<Spectral> parts;
  Eigen::Index rank = 1;
  for (std::size_t x = 0; x < sources.alphabet_size(); ++x) {
    const double p = sources.prob(x);
    if (!(p > 0.0)) continue;
    const auto eig = linalg::eigh(sources.conditional(x).matrix());
    const double top = eig.values.maxCoeff();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = eig.values.size(); k-- > 0;) {
      if (eig.values(k) > 1e-14 * top) keep.push_back(k);
    }
    Spectral s{x, p, RealVector(static_cast<Eigen::Index>(keep.size())),
               Matrix(eig.vectors.rows(), static_cast<Eigen::Index>(keep.size()))};
    for (std::size_t j = 0; j < keep.size(); ++j) {
      s.values(static_cast<Eigen::Index>(j)) = eig.values(keep[j]);
      s.vectors.col(static_cast<Eigen::Index>(j)) = eig.vectors.col(keep[j]);
    }
    rank = std::max(rank, static_cast<Eigen::Index>(keep.size()));
    parts.push_back(std::move(s));
  }
  const auto de = static_cast<Eigen::Index>(ens.dim_e_);
  const auto dr = static_cast<Eigen::Index>(base_r);
  ens.dim_r_ = base_r * static_cast<std::size_t>(rank);
  for (const auto& s : parts) {
    Matrix m = Matrix::Zero(de, dr * rank);
    for (Eigen::Index k = 0; k < s.values.size(); ++k) {
      const double w = std::sqrt(s.values(k));
      for (Eigen::Index e = 0; e < de; ++e) {
        for (Eigen::Index r = 0; r < dr; ++r) m(e, r * rank + k) = w * s.vectors(e * dr + r, k);
      }
    }
    m /= m.norm();
    ens.entries_.push_back({s.x >> n, s.x & ((std::size_t{1} << n) - 1), s.prob, std::move(m)});
  }
  return ens;
}

CqState SourceEnsemble::view(Source which) const {
  const auto de = static_cast<Eigen::Index>(dim_e_);
  std::vector<Matrix> blocks(std::size_t{1} << n_, Matrix::Zero(de, de));
  for (const auto& e : entries_) {
    const std::size_t t = which == Source::A ? e.a : e.b;
    blocks[t].noalias() += e.prob * (e.amplitudes * e.amplitudes.adjoint());
  }
  for (auto& b : blocks) b = linalg::hermitian_part(b);
  return CqState::from_weighted(blocks, {dim_e_}, n_);
}

double SourceEnsemble::cmi() const {
  std::map<std::size_t, std::vector<const Entry*>> by_a, by_b;
  std::vector<const Entry*> all;
  double h_ab = 0.0;
  for (const auto& e : entries_) {
    by_a[e.a].push_back(&e);
    by_b[e.b].push_back(&e);
    all.push_back(&e);
    h_ab -= e.prob * std::log2(e.prob);
  }
  double h_a = 0.0, h_b = 0.0;
  for (const auto& [a, members] : by_a) h_a += mixture_entropy(members);
  for (const auto& [b, members] : by_b) h_b += mixture_entropy(members);
  return h_a + h_b - h_ab - mixture_entropy(all);
}

void SourceEnsemble::apply_leakage(Source active, const LeakageChannel& chan) {
  if (chan.dim_e() != dim_e_) throw DimensionError("leakage channel input does not match E");
  if (chan.dim_a() < (std::size_t{1} << n_)) throw DimensionError("leakage channel alphabet smaller than the source");
  const auto pre = kraus_dilation(chan.pre_process);
  const auto de_out = static_cast<Eigen::Index>(chan.dim_e_out());
  const auto pre_aux = static_cast<Eigen::Index>(pre.aux_dim);

  std::map<std::size_t, DilationResult> leak_iso;
  Eigen::Index aux = 1;
  for (const auto& e : entries_) {
    const std::size_t t = active == Source::A ? e.a : e.b;
    if (leak_iso.count(t) == 0) {
      auto d = kraus_dilation(chan.leaks[t]);
      aux = std::max(aux, static_cast<Eigen::Index>(d.aux_dim));
      leak_iso.emplace(t, std::move(d));
    }
  }
  const auto out = static_cast<Eigen::Index>(chan.dim_l) * de_out;
  for (auto& e : entries_) {
    const std::size_t t = active == Source::A ? e.a : e.b;
    const Matrix after_pre = fold_aux(pre.isometry * e.amplitudes, de_out, pre_aux, pre_aux);
    const auto& iso = leak_iso.at(t);
    e.amplitudes = fold_aux(iso.isometry * after_pre, out, static_cast<Eigen::Index>(iso.aux_dim), aux);
  }
  dim_e_ = static_cast<std::size_t>(out);
  dim_r_ = dim_r_ * pre.aux_dim * static_cast<std::size_t>(aux);
}

void SourceEnsemble::compress_environment(std::size_t cap) {
  if (dim_r_ <= cap || entries_.empty()) return;
  const auto dr = static_cast<Eigen::Index>(dim_r_);
  Matrix rho_r = Matrix::Zero(dr, dr);
  for (const auto& e : entries_) rho_r.noalias() += e.prob * (e.amplitudes.transpose() * e.amplitudes.conjugate());
  const auto eig = linalg::eigh(linalg::hermitian_part(rho_r));
  const double top = eig.values.maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = eig.values.size(); k-- > 0;) {
    if (eig.values(k) > 1e-14 * top) keep.push_back(k);
  }
  Matrix basis(dr, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) basis.col(static_cast<Eigen::Index>(j)) = eig.vectors.col(keep[j]);
  const Matrix proj = basis.conjugate();
  for (auto& e : entries_) e.amplitudes = e.amplitudes * proj;
  dim_r_ = keep.size();
}

}  // namespace unplab
