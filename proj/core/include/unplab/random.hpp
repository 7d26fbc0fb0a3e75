#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "unplab/leakage.hpp"
#include "unplab/qcore.hpp"

namespace unplab {

using Rng = std::mt19937_64;

// Complex Gaussian matrix with unit-variance entries.
Matrix random_ginibre(Rng& rng, std::size_t rows, std::size_t cols);
// Haar-random unitary (QR of a Ginibre matrix with phase correction).
Matrix random_unitary(Rng& rng, std::size_t dim);
// Haar-random unit vector.
Vector random_pure_vector(Rng& rng, std::size_t dim);
// Induced measure: G G^dag / tr with G of shape dim x rank (full rank by default).
DensityOperator random_density(Rng& rng, const Dims& dims, std::optional<std::size_t> rank = std::nullopt);
// Channel from a random isometry with `kraus_count` Kraus operators.
KrausChannel random_channel(Rng& rng, const Dims& in_dims, const Dims& out_dims, std::size_t kraus_count);
// Probabilities from a flat Dirichlet draw and random conditional states.
CqState random_cq(Rng& rng, std::size_t alphabet_size, const Dims& side_dims,
                  std::optional<std::size_t> rank = std::nullopt);
// Source with weak side information: rho_x = (1 - w) I/d + w |psi_x><psi_x|,
// probabilities (1 - bias) uniform + bias Dirichlet.
CqState random_noisy_source(Rng& rng, std::size_t n_bits, std::size_t side_dim, double side_weight, double bias);

// Random leakage channel that passes validation on `rho_ae`: a random
// pre-processing E -> E' followed, for each a, by a measurement of E' in the
// eigenbasis of the processed conditional state that prepares a random state
// of L for each outcome.
LeakageChannel random_validated_leakage(Rng& rng, const CqState& rho_ae, std::size_t dim_e_out, std::size_t dim_l);

}  // namespace unplab
