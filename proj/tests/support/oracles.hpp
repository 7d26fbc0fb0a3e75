#pragma once

// Reference computations used as test oracles. They are written directly on
// Eigen, with loops where the library uses reshapes, so that they share no
// code with the implementation under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Eigen::VectorXd eigvals(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline double trace_norm(const Mat& h) { return eigvals(h).cwiseAbs().sum(); }

// 1/2 ||a - b||_1
inline double trace_distance(const Mat& a, const Mat& b) { return 0.5 * trace_norm(a - b); }

// Optimal two-outcome discrimination weight for p0 rho0 vs p1 rho1.
inline double helstrom(const Mat& w0, const Mat& w1) {
  return 0.5 * ((w0 + w1).trace().real() + trace_norm(w0 - w1));
}

inline double shannon_bits(const Eigen::VectorXd& ev) {
  double h = 0.0;
  for (double v : ev) {
    if (v > 1e-15) h -= v * std::log2(v);
  }
  return h;
}

inline double von_neumann(const Mat& rho) { return shannon_bits(eigvals(rho)); }

// Partial trace over the second factor of a (da*db)-dimensional operator.
inline Mat trace_second(const Mat& m, int da, int db) {
  Mat out = Mat::Zero(da, da);
  for (int i = 0; i < da; ++i) {
    for (int j = 0; j < da; ++j) {
      for (int k = 0; k < db; ++k) out(i, j) += m(i * db + k, j * db + k);
    }
  }
  return out;
}

// Partial trace over the first factor.
inline Mat trace_first(const Mat& m, int da, int db) {
  Mat out = Mat::Zero(db, db);
  for (int i = 0; i < db; ++i) {
    for (int j = 0; j < db; ++j) {
      for (int k = 0; k < da; ++k) out(i, j) += m(k * db + i, k * db + j);
    }
  }
  return out;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

inline Mat projector(const Vec& v) { return v * v.adjoint(); }

// Uhlmann fidelity (tr |sqrt a sqrt b|)^2 via the eigen-square-roots.
inline Mat sqrtm(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.adjoint()));
  Eigen::VectorXd s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

inline double fidelity(const Mat& a, const Mat& b) {
  Eigen::JacobiSVD<Mat> svd(sqrtm(a) * sqrtm(b));
  const double f = svd.singularValues().sum();
  return f * f;
}

// Inner-product extractor distance for classical side information:
// 2^-n sum_y 1/2 |sum_x p_x (-1)^{x.y}|.
inline double ip_distance_classical(const std::vector<double>& p, int n) {
  const std::uint64_t count = std::uint64_t{1} << n;
  double acc = 0.0;
  for (std::uint64_t y = 0; y < count; ++y) {
    double s = 0.0;
    for (std::uint64_t x = 0; x < p.size(); ++x) s += (__builtin_popcountll(x & y) & 1) ? -p[x] : p[x];
    acc += 0.5 * std::abs(s);
  }
  return acc / static_cast<double>(count);
}

// Explicit Bell basis vector, index v = 2*z + x: (|0 x> + (-1)^z |1 !x>)/sqrt2.
inline Vec bell(int v) {
  Vec psi = Vec::Zero(4);
  const double r = 1.0 / std::sqrt(2.0);
  const int x = v & 1;
  const int z = (v >> 1) & 1;
  psi(x) = r;
  psi(2 + (1 - x)) = (z ? -r : r);
  return psi;
}

}  // namespace oracle
