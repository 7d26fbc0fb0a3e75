#include "unplab/random.hpp"

#include <cmath>

#include "unplab/linalg.hpp"

namespace unplab {

Matrix random_ginibre(Rng& rng, std::size_t rows, std::size_t cols) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Matrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

Matrix random_unitary(Rng& rng, std::size_t dim) {
  const Matrix g = random_ginibre(rng, dim, dim);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(g.rows(), g.cols());
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    const double mag = std::abs(r(i, i));
    if (mag > 0.0) q.col(i) *= r(i, i) / mag;
  }
  return q;
}

Vector random_pure_vector(Rng& rng, std::size_t dim) {
  Vector v = random_ginibre(rng, dim, 1).col(0);
  return v / v.norm();
}

DensityOperator random_density(Rng& rng, const Dims& dims, std::optional<std::size_t> rank) {
  const std::size_t dim = product(dims);
  const Matrix g = random_ginibre(rng, dim, rank.value_or(dim));
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityOperator::trusted(linalg::hermitian_part(rho), dims);
}

KrausChannel random_channel(Rng& rng, const Dims& in_dims, const Dims& out_dims, std::size_t kraus_count) {
  const std::size_t din = product(in_dims);
  const std::size_t dout = product(out_dims);
  if (kraus_count == 0 || dout * kraus_count < din) throw DimensionError("random channel needs dout * kraus >= din");
  const Matrix u = random_unitary(rng, dout * kraus_count);
  const auto k = static_cast<Eigen::Index>(kraus_count);
  std::vector<Matrix> ops(kraus_count, Matrix::Zero(static_cast<Eigen::Index>(dout), static_cast<Eigen::Index>(din)));
  for (Eigen::Index m = 0; m < k; ++m) {
    for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(dout); ++r) {
      ops[static_cast<std::size_t>(m)].row(r) = u.row(r * k + m).head(static_cast<Eigen::Index>(din));
    }
  }
  return KrausChannel(std::move(ops), in_dims, out_dims);
}

CqState random_cq(Rng& rng, std::size_t alphabet_size, const Dims& side_dims, std::optional<std::size_t> rank) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> probs(alphabet_size);
  double total = 0.0;
  for (auto& p : probs) total += (p = expo(rng));
  for (auto& p : probs) p /= total;
  std::vector<DensityOperator> conds;
  conds.reserve(alphabet_size);
  for (std::size_t x = 0; x < alphabet_size; ++x) conds.push_back(random_density(rng, side_dims, rank));
  return CqState(std::move(probs), std::move(conds));
}

CqState random_noisy_source(Rng& rng, std::size_t n_bits, std::size_t side_dim, double side_weight, double bias) {
  const std::size_t count = std::size_t{1} << n_bits;
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> dirichlet(count);
  double total = 0.0;
  for (auto& p : dirichlet) total += (p = expo(rng));
  std::vector<double> probs(count);
  for (std::size_t x = 0; x < count; ++x) {
    probs[x] = (1.0 - bias) / static_cast<double>(count) + bias * dirichlet[x] / total;
  }
  const auto d = static_cast<Eigen::Index>(side_dim);
  std::vector<DensityOperator> conds;
  conds.reserve(count);
  for (std::size_t x = 0; x < count; ++x) {
    const Vector psi = random_pure_vector(rng, side_dim);
    Matrix rho = (1.0 - side_weight) * Matrix::Identity(d, d) / static_cast<double>(side_dim) +
                 side_weight * psi * psi.adjoint();
    conds.push_back(DensityOperator::trusted(linalg::hermitian_part(rho), {side_dim}));
  }
  return CqState(std::move(probs), std::move(conds), n_bits);
}

LeakageChannel random_validated_leakage(Rng& rng, const CqState& rho_ae, std::size_t dim_e_out, std::size_t dim_l) {
  const std::size_t de = rho_ae.side_dim();
  LeakageChannel c;
  c.pre_process = random_channel(rng, {de}, {dim_e_out}, 2);
  c.dim_l = dim_l;
  c.lambda = std::log2(static_cast<double>(dim_l));
  c.name = "random-validated";
  const auto dout = static_cast<Eigen::Index>(dim_e_out);
  for (std::size_t a = 0; a < rho_ae.alphabet_size(); ++a) {
    const Matrix processed = linalg::hermitian_part(c.pre_process.apply(rho_ae.weighted(a)));
    const auto basis = linalg::eigh(processed).vectors;
    std::vector<Matrix> ops;
    for (Eigen::Index k = 0; k < dout; ++k) {
      const Matrix proj = basis.col(k) * basis.col(k).adjoint();
      const auto tau = linalg::eigh(random_density(rng, {dim_l}).matrix());
      for (Eigen::Index l = 0; l < tau.values.size(); ++l) {
        const double mu = std::max(tau.values(l), 0.0);
        if (mu <= 0.0) continue;
        ops.push_back(linalg::kron(std::sqrt(mu) * tau.vectors.col(l), proj));
      }
    }
    c.leaks.emplace_back(std::move(ops), Dims{dim_e_out}, Dims{dim_l, dim_e_out});
  }
  return c;
}

}  // namespace unplab
