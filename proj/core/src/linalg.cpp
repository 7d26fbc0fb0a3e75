#include "unplab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace unplab::linalg {

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

double hermiticity_error(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

HermitianEig eigh(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("eigh: matrix is not square");
  HermitianEig out;
  if (m.rows() == 0) return out;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m));
  if (solver.info() != Eigen::Success) throw Error("eigh: eigensolver failed");
  out.values = solver.eigenvalues();
  out.vectors = solver.eigenvectors();
  return out;
}

RealVector eigenvalues(const Matrix& m) {
  if (m.rows() == 0) return RealVector();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("eigenvalues: eigensolver failed");
  return solver.eigenvalues();
}

double min_eigenvalue(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  return eigenvalues(m).minCoeff();
}

Matrix spectral_apply(const Matrix& m, const std::function<double(double)>& f) {
  const auto eig = eigh(m);
  RealVector mapped(eig.values.size());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) mapped(i) = f(eig.values(i));
  return eig.vectors * mapped.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
}

Matrix psd_sqrt(const Matrix& m) {
  return spectral_apply(m, [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
}

Matrix psd_inv_sqrt(const Matrix& m, double cutoff) {
  return spectral_apply(m, [cutoff](double x) { return x > cutoff ? 1.0 / std::sqrt(x) : 0.0; });
}

Matrix positive_part(const Matrix& m) {
  return spectral_apply(m, [](double x) { return x > 0.0 ? x : 0.0; });
}

double trace_norm_hermitian(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  return eigenvalues(m).cwiseAbs().sum();
}

double trace_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix identity(std::size_t dim) {
  return Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

namespace {

void check_perm(const Dims& dims, const Indices& perm) {
  if (perm.size() != dims.size()) throw DimensionError("permutation length mismatch");
  std::vector<bool> seen(dims.size(), false);
  for (auto p : perm) {
    if (p >= dims.size() || seen[p]) throw DimensionError("invalid subsystem permutation");
    seen[p] = true;
  }
}

// new_index[old_linear] for the given factor permutation.
std::vector<std::size_t> permutation_map(const Dims& dims, const Indices& perm) {
  const std::size_t n = dims.size();
  const std::size_t total = product(dims);
  Dims new_dims(n);
  for (std::size_t k = 0; k < n; ++k) new_dims[k] = dims[perm[k]];
  // stride of old factor perm[k] inside the new layout
  std::vector<std::size_t> new_stride(n, 1);
  for (std::size_t k = n; k-- > 1;) new_stride[k - 1] = new_stride[k] * new_dims[k];
  std::vector<std::size_t> stride_of_old(n, 0);
  for (std::size_t k = 0; k < n; ++k) stride_of_old[perm[k]] = new_stride[k];

  std::vector<std::size_t> map(total);
  std::vector<std::size_t> digit(n, 0);
  for (std::size_t lin = 0; lin < total; ++lin) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < n; ++k) idx += digit[k] * stride_of_old[k];
    map[lin] = idx;
    for (std::size_t k = n; k-- > 0;) {
      if (++digit[k] < dims[k]) break;
      digit[k] = 0;
    }
  }
  return map;
}

}  // namespace

Matrix permute_subsystems(const Matrix& m, const Dims& dims, const Indices& perm) {
  check_perm(dims, perm);
  const auto total = product(dims);
  if (static_cast<std::size_t>(m.rows()) != total || m.rows() != m.cols()) {
    throw DimensionError("permute_subsystems: matrix side does not match dims");
  }
  const auto map = permutation_map(dims, perm);
  Matrix out(m.rows(), m.cols());
  for (std::size_t j = 0; j < total; ++j) {
    for (std::size_t i = 0; i < total; ++i) {
      out(static_cast<Eigen::Index>(map[i]), static_cast<Eigen::Index>(map[j])) =
          m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

Vector permute_subsystems(const Vector& v, const Dims& dims, const Indices& perm) {
  check_perm(dims, perm);
  const auto total = product(dims);
  if (static_cast<std::size_t>(v.size()) != total) {
    throw DimensionError("permute_subsystems: vector length does not match dims");
  }
  const auto map = permutation_map(dims, perm);
  Vector out(v.size());
  for (std::size_t i = 0; i < total; ++i) {
    out(static_cast<Eigen::Index>(map[i])) = v(static_cast<Eigen::Index>(i));
  }
  return out;
}

Matrix partial_trace(const Matrix& m, const Dims& dims, const Indices& keep_in) {
  const std::size_t n = dims.size();
  Indices keep = keep_in;
  std::sort(keep.begin(), keep.end());
  if (std::adjacent_find(keep.begin(), keep.end()) != keep.end()) {
    throw DimensionError("partial_trace: repeated subsystem index");
  }
  for (auto k : keep) {
    if (k >= n) throw DimensionError("partial_trace: subsystem index out of range");
  }
  const auto total = product(dims);
  if (static_cast<std::size_t>(m.rows()) != total || m.rows() != m.cols()) {
    throw DimensionError("partial_trace: matrix side does not match dims");
  }
  std::vector<bool> kept(n, false);
  for (auto k : keep) kept[k] = true;

  std::vector<std::size_t> stride(n, 1);
  for (std::size_t k = n; k-- > 1;) stride[k - 1] = stride[k] * dims[k];

  // offsets contributed by kept and traced digits
  auto offsets = [&](bool want_kept) {
    std::vector<std::size_t> offs{0};
    for (std::size_t k = 0; k < n; ++k) {
      if (kept[k] != want_kept) continue;
      std::vector<std::size_t> next;
      next.reserve(offs.size() * dims[k]);
      for (auto o : offs) {
        for (std::size_t d = 0; d < dims[k]; ++d) next.push_back(o + d * stride[k]);
      }
      offs.swap(next);
    }
    return offs;
  };
  const auto kept_off = offsets(true);
  const auto traced_off = offsets(false);

  const auto dk = static_cast<Eigen::Index>(kept_off.size());
  Matrix out = Matrix::Zero(dk, dk);
  for (Eigen::Index j = 0; j < dk; ++j) {
    for (Eigen::Index i = 0; i < dk; ++i) {
      Complex acc = 0.0;
      for (auto t : traced_off) {
        acc += m(static_cast<Eigen::Index>(kept_off[i] + t), static_cast<Eigen::Index>(kept_off[j] + t));
      }
      out(i, j) = acc;
    }
  }
  return out;
}

std::vector<Indices> connected_blocks(const std::vector<const Matrix*>& ms, double threshold) {
  if (ms.empty()) return {};
  const auto dim = static_cast<std::size_t>(ms.front()->rows());
  std::vector<std::size_t> parent(dim);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto* m : ms) {
    for (std::size_t j = 0; j < dim; ++j) {
      for (std::size_t i = j + 1; i < dim; ++i) {
        if (std::abs((*m)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) > threshold) {
          auto a = find(i);
          auto b = find(j);
          if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
      }
    }
  }
  std::vector<Indices> groups;
  std::vector<long> slot(dim, -1);
  for (std::size_t i = 0; i < dim; ++i) {
    const auto root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<long>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<std::size_t>(slot[root])].push_back(i);
  }
  return groups;
}

Matrix submatrix(const Matrix& m, const Indices& rows) {
  const auto k = static_cast<Eigen::Index>(rows.size());
  Matrix out(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i < k; ++i) {
      out(i, j) = m(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(rows[j]));
    }
  }
  return out;
}

std::vector<double> eigenvalues_blockwise(const Matrix& m) {
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(m.rows()));
  const double scale = m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
  const auto blocks = connected_blocks({&m}, 1e-15 * std::max(scale, 1e-300));
  for (const auto& block : blocks) {
    if (block.size() == 1) {
      const auto i = static_cast<Eigen::Index>(block.front());
      values.push_back(m(i, i).real());
      continue;
    }
    const auto ev = eigenvalues(submatrix(m, block));
    for (Eigen::Index i = 0; i < ev.size(); ++i) values.push_back(ev(i));
  }
  return values;
}

double entropy_bits(const Matrix& m) {
  double h = 0.0;
  for (double v : eigenvalues_blockwise(m)) {
    if (v > tol::entropy_cutoff) h -= v * std::log2(v);
  }
  return h;
}

}  // namespace unplab::linalg
