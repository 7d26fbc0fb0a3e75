#include <doctest.h>

#include "../support/oracles.hpp"
#include "unplab/config.hpp"
#include "unplab/qcore.hpp"
#include "unplab/random.hpp"

using namespace unplab;

TEST_CASE("density operator rejects malformed matrices") {
  Matrix m = Matrix::Identity(2, 2) * 0.5;
  CHECK_NOTHROW(DensityOperator(m, {2}));
  CHECK_THROWS_AS(DensityOperator(m, {3}), DimensionError);
  CHECK_THROWS_AS(DensityOperator(Matrix::Identity(2, 2), {2}), ValidationError);

  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityOperator(neg, {2}), ValidationError);

  Matrix nonherm = m;
  nonherm(0, 1) = 0.3;
  CHECK_THROWS_AS(DensityOperator(nonherm, {2}), ValidationError);

  // Subnormalized operators may have any trace in [0, 1], including 0.
  CHECK_NOTHROW(DensityOperator(m * 0.5, {2}, Normalization::subnormalized));
  CHECK_NOTHROW(DensityOperator(Matrix::Zero(2, 2), {2}, Normalization::subnormalized));
}

TEST_CASE("dimension cap is enforced and adjustable") {
  const auto saved = max_dimension();
  set_max_dimension(4);
  CHECK_THROWS_AS(maximally_mixed(8), CapacityError);
  CHECK_NOTHROW(maximally_mixed(4));
  set_max_dimension(saved);
  CHECK_NOTHROW(maximally_mixed(8));
}

TEST_CASE("partial trace matches an explicit loop") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t da = 2 + trial % 3, db = 2 + (trial / 3) % 2;
    const auto rho = random_density(rng, {da, db});
    const auto a = partial_trace(rho, {0});
    const auto b = partial_trace(rho, {1});
    CHECK((a.matrix() - oracle::trace_second(rho.matrix(), int(da), int(db))).norm() < 1e-12);
    CHECK((b.matrix() - oracle::trace_first(rho.matrix(), int(da), int(db))).norm() < 1e-12);
    CHECK(a.dims() == Dims{da});
  }
}

TEST_CASE("tensor product matches Kronecker product") {
  Rng rng(3);
  const auto a = random_density(rng, {2});
  const auto b = random_density(rng, {3});
  const auto ab = tensor(a, b);
  CHECK(ab.dims() == Dims{2, 3});
  CHECK((ab.matrix() - oracle::kron(a.matrix(), b.matrix())).norm() < 1e-13);
}

TEST_CASE("purification reproduces the state") {
  Rng rng(5);
  for (std::size_t rank : {1u, 2u, 3u}) {
    const auto rho = random_density(rng, {3}, rank);
    const auto psi = purify(rho);
    CHECK(psi.dims().size() == 2);
    CHECK(psi.dims()[1] == rank);
    const auto back = partial_trace(psi.density(), {0});
    CHECK((back.matrix() - rho.matrix()).norm() < 1e-10);
  }
}

TEST_CASE("apply_channel on a subsystem") {
  // Dephasing the second half of a Bell pair gives the classically correlated state.
  const auto bell = maximally_entangled(2).density();
  const auto out = apply_channel(KrausChannel::dephasing(2), bell, {1});
  Matrix expected = Matrix::Zero(4, 4);
  expected(0, 0) = 0.5;
  expected(3, 3) = 0.5;
  CHECK((out.matrix() - expected).norm() < 1e-13);

  // Fully depolarizing one half leaves I/4.
  const auto dep = apply_channel(KrausChannel::depolarizing(1.0), bell, {0});
  CHECK((dep.matrix() - Matrix::Identity(4, 4) * 0.25).norm() < 1e-13);
}

TEST_CASE("random channels are trace preserving and compose") {
  Rng rng(8);
  const auto f = random_channel(rng, {2}, {3}, 3);
  const auto g = random_channel(rng, {3}, {2}, 2);
  CHECK(f.is_trace_preserving());
  CHECK(g.after(f).is_trace_preserving());
  const auto rho = random_density(rng, {2});
  CHECK((g.after(f).apply(rho.matrix()) - g.apply(f.apply(rho.matrix()))).norm() < 1e-12);
  CHECK(std::abs(f.apply(rho.matrix()).trace().real() - 1.0) < 1e-12);
}

TEST_CASE("adjoint channel satisfies the duality relation") {
  Rng rng(9);
  const auto f = random_channel(rng, {3}, {2}, 4);
  const auto rho = random_density(rng, {3}).matrix();
  const Matrix effect = random_density(rng, {2}).matrix();
  const Complex lhs = (effect * f.apply(rho)).trace();
  const Complex rhs = (f.adjoint_apply(effect) * rho).trace();
  CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("cq state joint round trip") {
  Rng rng(21);
  const auto cq = random_cq(rng, 4, {2});
  CHECK(cq.is_normalized());
  const auto joint = cq.joint();
  CHECK(joint.dims() == Dims{4, 2});
  const auto back = CqState::from_joint(joint);
  for (std::size_t x = 0; x < 4; ++x) {
    CHECK(std::abs(back.prob(x) - cq.prob(x)) < 1e-13);
    CHECK((back.weighted(x) - cq.weighted(x)).norm() < 1e-13);
  }
  CHECK((cq.side_marginal().matrix() - oracle::trace_first(joint.matrix(), 4, 2)).norm() < 1e-13);
}

TEST_CASE("from_joint rejects coherence on the classical register") {
  const auto plus = pure_state(Vector::Constant(2, Complex(1.0 / std::sqrt(2.0), 0.0)), {2});
  CHECK_THROWS_AS(CqState::from_joint(tensor(plus, maximally_mixed(2))), ValidationError);
}

TEST_CASE("povm guess probability of the basis measurement") {
  // Basis states |x> given x: the basis measurement always succeeds.
  std::vector<DensityOperator> conds;
  for (std::size_t x = 0; x < 3; ++x) conds.push_back(basis_state({3}, x));
  const CqState cq({0.2, 0.3, 0.5}, conds);
  CHECK(povm_guess_probability(Povm::computational_basis({3}), cq) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("replaced_dims") {
  CHECK(replaced_dims({2, 3, 4}, {1}, {5, 6}) == Dims{2, 5, 6, 4});
  CHECK(replaced_dims({2, 3, 4}, {0, 2}, {7}) == Dims{7, 3});
}
