#pragma once

#include <functional>
#include <vector>

#include "unplab/types.hpp"

namespace unplab::linalg {

struct HermitianEig {
  RealVector values;  // ascending
  Matrix vectors;     // columns are eigenvectors
};

Matrix hermitian_part(const Matrix& m);
double hermiticity_error(const Matrix& m);

// Eigendecomposition of the Hermitian part of m.
HermitianEig eigh(const Matrix& m);
RealVector eigenvalues(const Matrix& m);
double min_eigenvalue(const Matrix& m);

// Applies f to the eigenvalues of the Hermitian part of m.
Matrix spectral_apply(const Matrix& m, const std::function<double(double)>& f);

Matrix psd_sqrt(const Matrix& m);
// Pseudo-inverse square root; eigenvalues at or below cutoff map to zero.
Matrix psd_inv_sqrt(const Matrix& m, double cutoff);
Matrix positive_part(const Matrix& m);

double trace_norm_hermitian(const Matrix& m);
// Sum of singular values, for non-Hermitian products.
double trace_norm(const Matrix& m);

Matrix kron(const Matrix& a, const Matrix& b);
Matrix identity(std::size_t dim);

// Reorders tensor factors: factor k of the result is factor perm[k] of m.
Matrix permute_subsystems(const Matrix& m, const Dims& dims, const Indices& perm);
Vector permute_subsystems(const Vector& v, const Dims& dims, const Indices& perm);

// Keeps the listed subsystems (ascending order) and traces out the rest.
Matrix partial_trace(const Matrix& m, const Dims& dims, const Indices& keep);

// Groups basis indices into connected components of the union sparsity
// pattern of the given matrices. Entries with modulus <= threshold count as
// zero. Components are returned sorted by their smallest index.
std::vector<Indices> connected_blocks(const std::vector<const Matrix*>& ms, double threshold);

Matrix submatrix(const Matrix& m, const Indices& rows);

// Eigenvalues of a Hermitian matrix, computed block by block when its
// sparsity pattern splits.
std::vector<double> eigenvalues_blockwise(const Matrix& m);

// von Neumann entropy in bits of a PSD (possibly subnormalized) matrix:
// -sum lambda log2 lambda over eigenvalues above the entropy cutoff.
double entropy_bits(const Matrix& m);

}  // namespace unplab::linalg
