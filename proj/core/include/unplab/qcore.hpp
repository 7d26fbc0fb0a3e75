#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "unplab/types.hpp"

namespace unplab {

enum class Normalization { normalized, subnormalized };

// Dense Hermitian PSD operator with trace at most one, tagged with the
// dimensions of its tensor factors.
class DensityOperator {
 public:
  DensityOperator(Matrix matrix, Dims dims, Normalization norm = Normalization::normalized);

  // Skips the eigenvalue check; used where positivity holds by construction.
  static DensityOperator trusted(Matrix matrix, Dims dims,
                                 Normalization norm = Normalization::normalized);

  const Matrix& matrix() const { return matrix_; }
  const Dims& dims() const { return dims_; }
  Normalization normalization() const { return norm_; }
  bool is_normalized() const { return norm_ == Normalization::normalized; }
  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  double trace() const;

  // Re-runs the full invariant check, throwing ValidationError on failure.
  void validate() const;

 private:
  struct TrustTag {};
  DensityOperator(Matrix matrix, Dims dims, Normalization norm, TrustTag);
  void check_shape() const;
  void check_trace() const;

  Matrix matrix_;
  Dims dims_;
  Normalization norm_;
};

class PureVector {
 public:
  PureVector(Vector amplitudes, Dims dims, Normalization norm = Normalization::normalized);

  const Vector& amplitudes() const { return amplitudes_; }
  const Dims& dims() const { return dims_; }
  std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }
  DensityOperator density() const;

 private:
  Vector amplitudes_;
  Dims dims_;
  Normalization norm_;
};

class KrausChannel {
 public:
  KrausChannel(std::vector<Matrix> ops, Dims in_dims, Dims out_dims);

  static KrausChannel identity(const Dims& dims);
  static KrausChannel unitary(const Matrix& u, const Dims& dims);
  // rho -> (1-p) rho + p tr(rho) omega on one qubit.
  static KrausChannel depolarizing(double p);
  // Computational-basis measurement on a system of dimension dim.
  static KrausChannel dephasing(std::size_t dim);

  const std::vector<Matrix>& ops() const { return ops_; }
  const Dims& in_dims() const { return in_dims_; }
  const Dims& out_dims() const { return out_dims_; }
  std::size_t in_dim() const { return product(in_dims_); }
  std::size_t out_dim() const { return product(out_dims_); }

  // max entry of |sum K^dag K - I|
  double trace_preservation_error() const;
  bool is_trace_preserving(double tolerance = tol::state) const;

  Matrix apply(const Matrix& rho) const;
  // Heisenberg picture: sum K^dag effect K.
  Matrix adjoint_apply(const Matrix& effect) const;

  // this after first
  KrausChannel after(const KrausChannel& first) const;

 private:
  std::vector<Matrix> ops_;
  Dims in_dims_;
  Dims out_dims_;
};

class Povm {
 public:
  Povm(std::vector<Matrix> elements, Dims dims);

  const std::vector<Matrix>& elements() const { return elements_; }
  std::size_t outcomes() const { return elements_.size(); }
  const Dims& dims() const { return dims_; }
  std::size_t dim() const { return product(dims_); }

  static Povm computational_basis(const Dims& dims);

 private:
  std::vector<Matrix> elements_;
  Dims dims_;
};

// Classical register X paired with quantum side information E:
// sum_x p_x |x><x| (x) rho_E^x. Symbols are 0..|X|-1.
class CqState {
 public:
  CqState(std::vector<double> probs, std::vector<DensityOperator> conditionals,
          std::optional<std::size_t> alphabet_bits = std::nullopt);

  // Builds from the weighted blocks M_x = p_x rho_x.
  static CqState from_weighted(const std::vector<Matrix>& weighted, const Dims& side_dims,
                               std::optional<std::size_t> alphabet_bits = std::nullopt);
  // Reads a joint operator whose first factor is the classical register.
  static CqState from_joint(const DensityOperator& joint);

  std::size_t alphabet_size() const { return probs_.size(); }
  std::size_t alphabet_bits() const { return alphabet_bits_; }
  const std::vector<double>& probs() const { return probs_; }
  double prob(std::size_t x) const { return probs_.at(x); }
  const DensityOperator& conditional(std::size_t x) const { return conditionals_.at(x); }
  const Dims& side_dims() const { return side_dims_; }
  std::size_t side_dim() const { return product(side_dims_); }
  double total_weight() const;
  bool is_normalized() const;

  Matrix weighted(std::size_t x) const;
  std::vector<Matrix> weighted_all() const;
  DensityOperator side_marginal() const;
  DensityOperator joint() const;

 private:
  std::vector<double> probs_;
  std::vector<DensityOperator> conditionals_;
  Dims side_dims_;
  std::size_t alphabet_bits_;
};

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);
DensityOperator partial_trace(const DensityOperator& rho, const Indices& keep);

// Eigen-decomposition purification; the reference factor is appended last
// with dimension equal to the rank.
PureVector purify(const DensityOperator& rho);

// Applies phi to the listed subsystems. Output factors replace the targets at
// the position of the first target; other factors keep their order.
DensityOperator apply_channel(const KrausChannel& phi, const DensityOperator& rho,
                              const Indices& targets);
Matrix apply_channel(const KrausChannel& phi, const Matrix& rho, const Dims& dims,
                     const Indices& targets, Dims* out_dims = nullptr);

// sum_x p_x tr(E_x rho_x); outcomes beyond the alphabet are never credited.
double povm_guess_probability(const Povm& povm, const CqState& state);

DensityOperator maximally_mixed(std::size_t dim);
PureVector maximally_entangled(std::size_t dim);
DensityOperator basis_state(const Dims& dims, std::size_t index);
DensityOperator pure_state(const Vector& psi, const Dims& dims);

// Output dims after apply_channel replaces `targets` with `out`.
Dims replaced_dims(const Dims& dims, const Indices& targets, const Dims& out);

}  // namespace unplab
