#include <doctest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "unplab/entropy.hpp"
#include "unplab/guessing.hpp"
#include "unplab/metrics.hpp"
#include "unplab/random.hpp"

using namespace unplab;

namespace {

CqState superdense_cqq() {
  std::vector<DensityOperator> conds;
  for (int x = 0; x < 4; ++x) conds.push_back(pure_state(oracle::bell(x), {2, 2}));
  return CqState(std::vector<double>(4, 0.25), std::move(conds), 2);
}

void check_certificate(const GuessCertificate& c) {
  CHECK(c.gap <= 1e-7);
  CHECK(c.min_dual_eigenvalue >= -1e-8);
  CHECK(c.dual_value >= c.value - 1e-12);
}

}  // namespace

TEST_CASE("binary guessing probability equals the two-outcome optimum") {
  Rng rng(1);
  for (int trial = 0; trial < 40; ++trial) {
    const auto cq = random_cq(rng, 2, {2 + std::size_t(trial % 3)});
    const auto cert = guessing_probability(cq);
    check_certificate(cert);
    CHECK(cert.value == doctest::Approx(oracle::helstrom(cq.weighted(0), cq.weighted(1))).epsilon(1e-7));
  }
}

TEST_CASE("classical side information: guessing is the best row maximum") {
  // p(x, e) with E measured in the basis; P_guess = sum_e max_x p(x, e).
  const std::vector<std::vector<double>> p = {{0.1, 0.2, 0.05}, {0.3, 0.05, 0.1}, {0.05, 0.05, 0.1}};
  std::vector<double> px;
  std::vector<DensityOperator> conds;
  double expected = 0.0;
  for (std::size_t e = 0; e < 3; ++e) expected += std::max({p[0][e], p[1][e], p[2][e]});
  for (std::size_t x = 0; x < 3; ++x) {
    const double total = p[x][0] + p[x][1] + p[x][2];
    px.push_back(total);
    Matrix m = Matrix::Zero(3, 3);
    for (std::size_t e = 0; e < 3; ++e) m(e, e) = p[x][e] / total;
    conds.emplace_back(m, Dims{3});
  }
  const CqState cq(px, conds);
  const auto cert = guessing_probability(cq);
  check_certificate(cert);
  CHECK(cert.value == doctest::Approx(expected).epsilon(1e-8));
  CHECK(min_entropy(cq) == doctest::Approx(-std::log2(expected)).epsilon(1e-7));
}

TEST_CASE("trivial side information gives -log2 max p") {
  const CqState cq({0.5, 0.25, 0.125, 0.125}, std::vector<DensityOperator>(4, maximally_mixed(1)));
  CHECK(min_entropy(cq) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("property: solver certificates on random cq states") {
  Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t alphabet = 2 + trial % 5;
    const std::size_t side = 2 + trial % 3;
    const auto cq = random_cq(rng, alphabet, {side}, 1 + trial % side);
    const auto cert = guessing_probability(cq);
    check_certificate(cert);
    // Every POVM, including the pretty-good one, is below the optimum.
    const double pgm = povm_guess_probability(Povm(pretty_good_measurement(cq.weighted_all()), {side}), cq);
    CHECK(pgm <= cert.value + 1e-9);
    CHECK(povm_guess_probability(cert.povm({side}), cq) == doctest::Approx(cert.value).epsilon(1e-9));
    // Trivial bounds 1/|X| <= P_guess <= min(1, d * max p).
    CHECK(cert.value >= 1.0 / double(alphabet) - 1e-12);
    CHECK(cert.value <= 1.0 + 1e-12);
  }
}

TEST_CASE("property: min-entropy data processing on the side register") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto cq = random_cq(rng, 3, {3});
    const auto ch = random_channel(rng, {3}, {2}, 2);
    std::vector<Matrix> processed;
    for (const auto& w : cq.weighted_all()) processed.push_back(ch.apply(w));
    const auto after = CqState::from_weighted(processed, {2});
    CHECK(min_entropy(after) >= min_entropy(cq) - 1e-7);
  }
}

TEST_CASE("superdense state: two bits hidden from B, none from BC") {
  const auto cq = superdense_cqq();
  CHECK(min_entropy(trace_side_tail(cq, 1)) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(std::abs(min_entropy(cq)) < 1e-7);
  const auto report = verify_chain_rule(cq, 0.0, AdversaryFamily::unbounded());
  CHECK(report.ell == doctest::Approx(1.0));
  CHECK(std::abs(report.slack) < 1e-7);
  CHECK(report.holds);
}

TEST_CASE("smooth min-entropy lower bound") {
  Rng rng(4);
  for (int trial = 0; trial < 15; ++trial) {
    const auto cq = random_cq(rng, 4, {2});
    const double h = min_entropy(cq);
    double prev = h - 1e-9;
    for (double eps : {0.0, 0.05, 0.1, 0.3}) {
      const auto s = smooth_min_entropy_lower(cq, eps);
      CHECK(s.value >= prev - 1e-9);  // non-decreasing in epsilon
      CHECK(s.candidate_distance <= eps + 1e-9);
      prev = s.value;
      // The candidate is a valid witness: recompute its min-entropy and distance.
      const auto cand = CqState::from_weighted(s.candidate, {2});
      CHECK(min_entropy(cand) == doctest::Approx(s.value).epsilon(1e-6));
      // sqrt(1 - F) has a floor near 1.5e-8 from rounding in F.
      CHECK(purified_distance_blocks(s.candidate, cq.weighted_all()) <= eps + 1e-7);
    }
    CHECK(smooth_min_entropy_lower(cq, 0.0).value == doctest::Approx(h).epsilon(1e-9));
  }
}

TEST_CASE("clipping a uniform classical distribution") {
  const CqState cq({0.5, 0.5}, std::vector<DensityOperator>(2, maximally_mixed(1)));
  const auto clipped = clip_blocks(cq.weighted_all(), 0.4);
  CHECK(clipped[0](0, 0).real() == doctest::Approx(0.4));
  // Root fidelity of commuting diagonal blocks: sum sqrt(0.5 * 0.4); the original has trace one.
  const double root = 2.0 * std::sqrt(0.5 * 0.4);
  CHECK(purified_distance_blocks(clipped, cq.weighted_all()) ==
        doctest::Approx(std::sqrt(1.0 - root * root)).epsilon(1e-12));
}

TEST_CASE("unpredictability interval is ordered and shrinks with the family") {
  Rng rng(5);
  const auto cq = random_cq(rng, 4, {2});
  const double h = min_entropy(cq);
  const auto unb = unpredictability_interval(cq, 0.0, AdversaryFamily::unbounded());
  CHECK(unb.family_complete);
  CHECK(unb.lower == doctest::Approx(h).epsilon(1e-7));
  CHECK(unb.upper == doctest::Approx(h).epsilon(1e-7));

  const auto small = unpredictability_interval(cq, 0.0, AdversaryFamily::enumerate_circuits(1, 1));
  const auto big = unpredictability_interval(cq, 0.0, AdversaryFamily::enumerate_circuits(1, 4));
  CHECK_FALSE(small.family_complete);
  CHECK(small.lower <= small.upper);
  // Stronger adversaries can only lower the upper end (monotonicity in s).
  CHECK(big.upper <= small.upper + 1e-12);
  CHECK(big.upper >= h - 1e-9);
  // The constants-only upper end is -log2 max p.
  double pmax = 0.0;
  for (double p : cq.probs()) pmax = std::max(pmax, p);
  const auto consts = unpredictability_interval(cq, 0.0, AdversaryFamily::constants_only());
  CHECK(consts.upper == doctest::Approx(-std::log2(pmax)).epsilon(1e-12));
}

TEST_CASE("von Neumann quantities") {
  const auto bell = maximally_entangled(2).density();
  CHECK(von_neumann_entropy(bell) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(conditional_entropy(bell, {1}) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(von_neumann_entropy(maximally_mixed(4)) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("property: strong subadditivity on random tripartite states") {
  Rng rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const auto rho = random_density(rng, {2, 2, 2}, 1 + trial % 8);
    const double v = cmi(rho, {0}, {1}, {2});
    CHECK(v >= -1e-9);
    // I(A:B|C) <= 2 log2 dA
    CHECK(v <= 2.0 + 1e-9);
  }
}

TEST_CASE("CMI of a Markov chain and of a GHZ state") {
  // rho_A (x) rho_B (x) rho_C is Markov.
  Rng rng(7);
  const auto prod = tensor(tensor(random_density(rng, {2}), random_density(rng, {2})), random_density(rng, {2}));
  CHECK(std::abs(cmi(prod, {0}, {1}, {2})) < 1e-10);
  // GHZ: I(A:B|C) = 1.
  Vector ghz = Vector::Zero(8);
  ghz(0) = ghz(7) = 1.0 / std::sqrt(2.0);
  const auto g = pure_state(ghz, {2, 2, 2});
  CHECK(cmi(g, {0}, {1}, {2}) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("property: extension keeps the purified distance") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rho_ab = random_density(rng, {2, 3});
    const auto rho_a = partial_trace(rho_ab, {0});
    const auto sigma_a = random_density(rng, {2});
    const auto ext = extend_state(sigma_a, rho_ab);
    CHECK((partial_trace(ext, {0}).matrix() - sigma_a.matrix()).norm() < 1e-8);
    CHECK(purified_distance(ext, rho_ab) <= purified_distance(sigma_a, rho_a) + 1e-8);
  }
}

TEST_CASE("property: chain rule soundness on random cqq states") {
  Rng rng(9);
  for (int trial = 0; trial < 25; ++trial) {
    const auto cq = random_cq(rng, 2 + trial % 4, {2, 2});
    for (double eps : {0.0, 0.1}) {
      const auto r = verify_chain_rule(cq, eps, AdversaryFamily::unbounded());
      CHECK(r.slack >= -1e-7);
      CHECK(r.holds);
    }
  }
}

TEST_CASE("chain rule with a finite family reports an interval form") {
  const auto cq = superdense_cqq();
  const auto r = verify_chain_rule(cq, 0.0, AdversaryFamily::enumerate_circuits(2, 2));
  REQUIRE(r.interval_slack.has_value());
  CHECK_FALSE(r.family_complete);
  CHECK(*r.interval_slack >= -1e-7);
}

TEST_CASE("certificate audit sees every solve") {
  Rng rng(10);
  CertificateAudit audit;
  for (int i = 0; i < 5; ++i) (void)guessing_probability(random_cq(rng, 3, {2}));
  const auto entries = audit.entries();
  CHECK(entries.size() >= 5);
  for (const auto& e : entries) {
    CHECK(e.gap <= 1e-7);
    CHECK(e.min_dual_eigenvalue >= -1e-8);
  }
}
