#include <doctest.h>

#include <cmath>

#include "unplab/extractors.hpp"
#include "unplab/random.hpp"
#include "unplab/reconstruct.hpp"

using namespace unplab;

TEST_CASE("statevector gates") {
  StateVector sv(2);
  sv.apply_h(0);
  sv.apply_cnot(0, 1);
  CHECK(sv.probability({0, 1}, 0b00) == doctest::Approx(0.5));
  CHECK(sv.probability({0, 1}, 0b11) == doctest::Approx(0.5));
  CHECK(sv.probability({0, 1}, 0b01) == doctest::Approx(0.0));
  sv.apply_x(1);
  CHECK(sv.probability({0, 1}, 0b10) == doctest::Approx(0.5));
  CHECK(sv.probability({1}, 0) == doctest::Approx(0.5));
  CHECK(sv.norm() == doctest::Approx(1.0));
}

TEST_CASE("multiplexed gate applies the block selected by the controls") {
  StateVector sv(2);
  sv.apply_x(0);  // control reads 1
  Matrix x = Matrix::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  sv.apply_multiplexed({0}, {1}, {Matrix::Identity(2, 2), x});
  CHECK(sv.probability({0, 1}, 0b11) == doctest::Approx(1.0));
  sv.apply_multiplexed({0}, {1}, {Matrix::Identity(2, 2), x}, true);
  CHECK(sv.probability({0, 1}, 0b10) == doctest::Approx(1.0));
}

TEST_CASE("oracles are unitary and have the advertised bias") {
  for (std::size_t n : {2u, 3u, 4u}) {
    const auto ideal = make_ideal_ip_predictor(n);
    CHECK(ideal.unitarity_error() < 1e-12);
    for (std::uint64_t x = 0; x < (1u << n); ++x) {
      CHECK(predictor_bias(ideal, x, basis_side_info(n, x).amplitudes()) == doctest::Approx(1.0).epsilon(1e-12));
    }
    for (double eps : {0.0, 0.1, 0.25, 0.5}) {
      const auto biased = make_biased_predictor(n, eps);
      CHECK(biased.unitarity_error() < 1e-12);
      CHECK(biased.bias.value() == eps);
      const std::uint64_t x = (1u << n) - 1;
      CHECK(predictor_bias(biased, x, basis_side_info(n, x).amplitudes()) ==
            doctest::Approx(0.5 + eps).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(make_biased_predictor(3, 0.7), ValidationError);
}

TEST_CASE("circuit layout and gate count") {
  const auto c = build_reconstructor(make_ideal_ip_predictor(3));
  CHECK(c.total_qubits() == 2 + 3 + 3);
  CHECK(c.output_qubit() == 4);
  CHECK(c.seed_qubits() == Indices{1, 2, 3});
  CHECK(c.side_qubits() == Indices{5, 6, 7});
  CHECK(c.anc_qubits().empty());
  // prepare 1, two Hadamard layers of n+1, two oracle calls of cost n, one CNOT
  CHECK(c.gate_count == 1 + 2 * 4 + 2 * 3 + 1);
  CHECK(c.stages.size() == 7);
}

TEST_CASE("ideal predictor reconstructs x with certainty") {
  for (std::size_t n = 2; n <= 6; ++n) {
    const auto c = build_reconstructor(make_ideal_ip_predictor(n));
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
      CHECK(std::abs(run_reconstruction(c, x, basis_side_info(n, x)) - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("biased predictor: success at least 4 eps^2") {
  for (std::size_t n : {3u, 4u}) {
    for (double eps : {0.1, 0.2, 0.3, 0.4}) {
      const auto c = build_reconstructor(make_biased_predictor(n, eps));
      for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
        CHECK(run_reconstruction(c, x, basis_side_info(n, x)) >= 4.0 * eps * eps - 1e-6);
      }
    }
  }
}

TEST_CASE("statevector run agrees with the dense unitary") {
  const auto c = build_reconstructor(make_biased_predictor(2, 0.3));
  const Matrix u = reconstruction_unitary(c);
  CHECK((u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).norm() < 1e-10);
  for (std::uint64_t x = 0; x < 4; ++x) {
    const auto side = basis_side_info(2, x).amplitudes();
    const auto sv = reconstruction_final_state(c, side);
    // Input |0>_phase |0^n>_seed |0>_out |side> |0>_anc, side register sits after the output qubit.
    Vector in = Vector::Zero(u.cols());
    const std::size_t anc = c.oracle.anc_qubits;
    const std::size_t side_dim = std::size_t{1} << c.oracle.side_qubits;
    for (std::size_t e = 0; e < side_dim; ++e) in((e << anc)) = side(e);
    const Vector out = u * in;
    CHECK((out - sv.amplitudes()).norm() < 1e-10);
  }
}

TEST_CASE("property: reconstruction with rotated side information") {
  // Side information in superposition: the success stays a probability and
  // never beats the basis copy of x.
  Rng rng(31);
  const std::size_t n = 3;
  const auto c = build_reconstructor(make_ideal_ip_predictor(n));
  for (int trial = 0; trial < 10; ++trial) {
    const Vector side = random_pure_vector(rng, 1u << n);
    const double p = run_reconstruction(c, 5, PureVector(side, {1u << n}));
    CHECK(p >= -1e-12);
    CHECK(p <= 1.0 + 1e-12);
    CHECK(p <= run_reconstruction(c, 5, basis_side_info(n, 5)) + 1e-12);
  }
}
