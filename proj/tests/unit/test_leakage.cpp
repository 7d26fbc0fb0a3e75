#include <doctest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "unplab/entropy.hpp"
#include "unplab/leakage.hpp"
#include "unplab/random.hpp"

using namespace unplab;

namespace {

CqState uniform_with_side(std::size_t bits, const DensityOperator& side) {
  const std::size_t count = std::size_t{1} << bits;
  return CqState(std::vector<double>(count, 1.0 / double(count)), std::vector<DensityOperator>(count, side), bits);
}

}  // namespace

TEST_CASE("classical copy leaks exactly one bit") {
  const auto state = uniform_with_side(2, maximally_mixed(1));
  const auto chan = LeakageChannel::classical_copy(4, 1, 0);
  CHECK(chan.dim_l == 2);
  CHECK(chan.lambda == doctest::Approx(1.0));
  const auto v = validate_leakage_channel(chan, state);
  CHECK(v.ok);
  CHECK(v.failed_clause().empty());
  const auto after = apply_leakage(chan, state);
  CHECK(after.side_dims() == Dims{2, 1});
  CHECK(min_entropy(after) == doctest::Approx(1.0).epsilon(1e-7));
  const auto report = measure_chain_degradation(state, chan, 0.0);
  CHECK(report.slack == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(report.holds);
}

TEST_CASE("superdense leak costs two bits for one qubit") {
  const auto state = uniform_with_side(2, maximally_mixed(2));
  const auto chan = LeakageChannel::superdense();
  const auto v = validate_leakage_channel(chan, state);
  CHECK(v.ok);
  CHECK(v.invariance_residual < 1e-12);
  const auto report = measure_chain_degradation(state, chan, 0.0);
  CHECK(report.h_before == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(std::abs(report.h_after) < 1e-7);
  CHECK(std::abs(report.slack) < 1e-7);
}

TEST_CASE("superdense leak is rejected when E is pure") {
  // With E = |0>, replacing E by half a Bell pair changes its marginal.
  const auto state = uniform_with_side(2, basis_state({2}, 0));
  const auto v = validate_leakage_channel(LeakageChannel::superdense(), state);
  CHECK_FALSE(v.ok);
  CHECK(v.failed_clause() == "marginal invariance");
  CHECK_THROWS_AS(apply_leakage(LeakageChannel::superdense(), state), ValidationError);
}

TEST_CASE("CNOT-copy attack is rejected on the invariance clause") {
  const auto state = uniform_with_side(6, basis_state({64}, 0));
  const auto chan = LeakageChannel::cnot_copy_attack(6);
  CHECK(min_entropy(state) == doctest::Approx(6.0).epsilon(1e-9));
  const auto after = apply_leakage_unchecked(chan, state);
  CHECK(min_entropy(after) <= 1e-7);
  const auto v = validate_leakage_channel(chan, state);
  CHECK_FALSE(v.ok);
  CHECK(v.failed_clause() == "marginal invariance");
  // Other clauses hold; the attack only breaks invariance.
  for (const auto& c : v.clauses) {
    if (c.clause != "marginal invariance") CHECK(c.ok);
  }
  CHECK_THROWS_WITH_AS(apply_leakage(chan, state), doctest::Contains("marginal invariance"), ValidationError);
}

TEST_CASE("oversized leak register is rejected") {
  const auto state = uniform_with_side(2, maximally_mixed(2));
  auto chan = LeakageChannel::superdense();
  chan.lambda = 0.5;
  const auto v = validate_leakage_channel(chan, state);
  CHECK_FALSE(v.ok);
  CHECK(v.failed_clause() == "leak dimension bound");
}

TEST_CASE("leak_kraus and from_kraus are inverse") {
  const auto chan = LeakageChannel::classical_copy(4, 2, 1);
  const auto joint = chan.leak_kraus();
  CHECK(joint.is_trace_preserving());
  const auto back = LeakageChannel::from_kraus(chan.pre_process, joint, 4, 2);
  CHECK(back.dim_a() == 4);
  Rng rng(41);
  const auto state = random_cq(rng, 4, {2});
  const auto a = apply_leakage(chan, state);
  const auto b = apply_leakage(back, state);
  for (std::size_t x = 0; x < 4; ++x) CHECK((a.weighted(x) - b.weighted(x)).norm() < 1e-12);

  // A map that mixes values of A is not a leakage channel.
  Matrix swap = Matrix::Zero(4, 4);
  swap(0, 2) = swap(2, 0) = swap(1, 1) = swap(3, 3) = 1.0;  // exchanges a = 0 and a = 1 when e = 0
  const KrausChannel mixing({swap}, {2, 2}, {2, 1, 2});
  CHECK_THROWS_AS(LeakageChannel::from_kraus(KrausChannel::identity({2}), mixing, 2, 1), ValidationError);
}

TEST_CASE("property: Stinespring dilation reproduces the channel") {
  Rng rng(42);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t din = 2 + trial % 2, dout = 2 + (trial / 2) % 2;
    const auto ch = random_channel(rng, {din}, {dout}, 1 + trial % 4);
    const auto dil = stinespring_dilate(ch);
    CHECK(dil.aux_dim <= din * dout);
    CHECK((dil.isometry.adjoint() * dil.isometry - Matrix::Identity(din, din)).norm() < 1e-10);
    const auto rho = random_density(rng, {din}).matrix();
    CHECK((dil.apply(rho) - ch.apply(rho)).norm() < 1e-10);
    // Minimal Kraus rank equals the Choi rank, never more than the input set.
    CHECK(minimal_kraus(ch).size() <= ch.ops().size());
  }
  // The Kraus-list dilation reproduces the same channel with one aux level per operator.
  const auto noisy = random_channel(rng, {2}, {3}, 3);
  const auto listed = kraus_dilation(noisy);
  CHECK(listed.aux_dim == noisy.ops().size());
  const auto sample = random_density(rng, {2}).matrix();
  CHECK((listed.apply(sample) - noisy.apply(sample)).norm() < 1e-10);
  // A unitary has a one-element minimal Kraus set even when given redundantly.
  const Matrix h = gate_h(1, 0);
  const KrausChannel redundant({h / std::sqrt(2.0), h / std::sqrt(2.0)}, {2}, {2});
  CHECK(minimal_kraus(redundant).size() == 1);
}

TEST_CASE("property: validated random leakage obeys the two-lambda degradation") {
  Rng rng(43);
  int validated = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto state = random_cq(rng, 4, {2});
    const auto chan = random_validated_leakage(rng, state, 2, 2);
    const auto v = validate_leakage_channel(chan, state);
    CHECK(v.ok);
    if (!v.ok) continue;
    ++validated;
    for (double eps : {0.0, 0.05}) {
      const auto r = measure_chain_degradation(state, chan, eps);
      CHECK(r.slack >= -1e-7);
      CHECK(r.holds);
      // Pre-processing alone is data processing on E.
      CHECK(r.h_after_pre >= r.h_before - 1e-7);
    }
  }
  CHECK(validated == 20);
}

TEST_CASE("degradation with a finite family shifts the budget") {
  const auto state = uniform_with_side(2, maximally_mixed(2));
  const auto r = measure_chain_degradation(state, LeakageChannel::superdense(), 0.0, AdversaryFamily(4));
  REQUIRE(r.shifted_budget.has_value());
  CHECK(*r.shifted_budget >= 4 + 2);
  REQUIRE(r.interval_slack.has_value());
}

TEST_CASE("xor into E is rejected on uniform sources") {
  const auto state = uniform_with_side(2, basis_state({2}, 0));
  const auto chan = LeakageChannel::xor_into_e(4, 2, 0, 0);
  const auto v = validate_leakage_channel(chan, state);
  CHECK_FALSE(v.ok);
  CHECK(v.failed_clause() == "marginal invariance");
}

TEST_CASE("density-operator overload reads A from the first factor") {
  const auto state = uniform_with_side(2, maximally_mixed(2));
  const auto v = validate_leakage_channel(LeakageChannel::superdense(), state.joint());
  CHECK(v.ok);
  // Coherence between values of A is reported, not thrown.
  Vector plus = Vector::Constant(4, 0.5);
  const auto coherent = tensor(pure_state(plus, {4}), maximally_mixed(2));
  const auto bad = validate_leakage_channel(LeakageChannel::superdense(), coherent);
  CHECK_FALSE(bad.ok);
}
