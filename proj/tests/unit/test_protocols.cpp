#include <doctest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "unplab/entropy.hpp"
#include "unplab/protocols.hpp"
#include "unplab/random.hpp"

using namespace unplab;

TEST_CASE("ensemble views of independent uniform sources") {
  const std::size_t n = 2;
  const CqState sources(std::vector<double>(16, 1.0 / 16), std::vector<DensityOperator>(16, maximally_mixed(1)), 4);
  const auto ens = SourceEnsemble::from_cq(sources, n);
  CHECK(ens.entries().size() == 16);
  CHECK(ens.dim_e() == 1);
  CHECK(min_entropy(ens.view(Source::A)) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(min_entropy(ens.view(Source::B)) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(std::abs(ens.cmi()) < 1e-10);
}

TEST_CASE("ensemble leakage matches the cq-level channel") {
  // Two-bit sources, E a maximally mixed qubit purified into R.
  const CqState sources(std::vector<double>(16, 1.0 / 16), std::vector<DensityOperator>(16, maximally_mixed(2)), 4);
  auto ens = SourceEnsemble::from_cq(sources, 2);
  const auto before = ens.view(Source::A);
  const auto chan = LeakageChannel::superdense();
  const auto expected = apply_leakage(chan, before);
  ens.apply_leakage(Source::A, chan);
  const auto after = ens.view(Source::A);
  REQUIRE(after.alphabet_size() == expected.alphabet_size());
  for (std::size_t a = 0; a < 4; ++a) CHECK((after.weighted(a) - expected.weighted(a)).norm() < 1e-10);
  CHECK(std::abs(ens.cmi()) < 1e-9);
  // B is untouched: the leak reads only A and keeps E's marginal.
  CHECK(min_entropy(ens.view(Source::B)) == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("environment compression keeps the views") {
  const CqState sources(std::vector<double>(16, 1.0 / 16), std::vector<DensityOperator>(16, maximally_mixed(2)), 4);
  auto ens = SourceEnsemble::from_cq(sources, 2);
  ens.apply_leakage(Source::A, LeakageChannel::superdense_bits(4, 2, 0));
  ens.apply_leakage(Source::B, LeakageChannel::classical_copy(4, ens.dim_e(), 1));
  const auto a = ens.view(Source::A);
  const double cmi = ens.cmi();
  ens.compress_environment(1);
  const auto a2 = ens.view(Source::A);
  for (std::size_t x = 0; x < 4; ++x) CHECK((a.weighted(x) - a2.weighted(x)).norm() < 1e-10);
  CHECK(ens.cmi() == doctest::Approx(cmi).epsilon(1e-9));
}

TEST_CASE("alternating 4 rounds meet the per-round bounds") {
  const auto cfg = protocol_preset("alternating-4round");
  const auto t = run_alternating(cfg);
  REQUIRE(t.rounds.size() == 4);
  CHECK(t.k == doctest::Approx(5.0).epsilon(1e-9));
  for (const auto& r : t.rounds) {
    CHECK(r.h_a_after >= r.alt_bound_a - 1e-7);
    CHECK(r.h_b_after >= r.alt_bound_b - 1e-7);
    CHECK(r.cmi <= 1e-8);
    CHECK(r.degradation_slack >= -1e-7);
    CHECK(r.hypothesis_met);
    CHECK(check_extraction_quality(t, r.round).holds);
  }
  // Active roles alternate, B first.
  CHECK(t.rounds[0].active == Source::B);
  CHECK(t.rounds[1].active == Source::A);
  CHECK(check_markov_preservation(t).ok);
  for (std::size_t i = 1; i <= 4; ++i) {
    const auto c = cumulative_distance_bound(t, i);
    CHECK(c.bound == doctest::Approx(double(i) * (2.0 * t.epsilon + t.eps_ext)));
    CHECK(c.measured <= c.bound + 1e-7);
  }
}

TEST_CASE("alternating bound formula") {
  const auto t = run_alternating(protocol_preset("alternating-2round"));
  // i = 1: A gets k - (1 + 1 + 2) lambda, B gets k - (1 - 1 + 2) lambda.
  CHECK(t.rounds[0].alt_bound_a == doctest::Approx(t.k - 4.0 * t.lambda));
  CHECK(t.rounds[0].alt_bound_b == doctest::Approx(t.k - 2.0 * t.lambda));
  // i = 2: A gets k - (1 - 1 + 4) lambda, B gets k - (1 + 1 + 4) lambda.
  CHECK(t.rounds[1].alt_bound_a == doctest::Approx(t.k - 4.0 * t.lambda));
  CHECK(t.rounds[1].alt_bound_b == doctest::Approx(t.k - 6.0 * t.lambda));
}

TEST_CASE("fresh-seed 3 rounds: delta bounds and passive monotonicity") {
  const auto t = run_alternating(protocol_preset("fresh-3round"));
  REQUIRE(t.rounds.size() == 3);
  std::size_t da = 0, db = 0;
  for (const auto& r : t.rounds) {
    (r.active == Source::A ? da : db) += 1;
    CHECK(r.delta_a == da);
    CHECK(r.delta_b == db);
    CHECK(r.fresh_bound_a == doctest::Approx(t.k - double(da) * 2.0 * t.lambda));
    CHECK(r.fresh_bound_b == doctest::Approx(t.k - double(db) * 2.0 * t.lambda));
    CHECK(r.h_a_after >= r.fresh_bound_a - 1e-7);
    CHECK(r.h_b_after >= r.fresh_bound_b - 1e-7);
    CHECK(r.passive_change >= -1e-7);
    CHECK(r.cmi <= 1e-8);
  }
  // Budget decays by the fixed per-round amount.
  REQUIRE(t.budget.has_value());
  for (const auto& r : t.rounds) {
    CHECK(*r.budget_after == *t.budget - int(r.round + 1) * t.budget_decay_per_round);
  }
}

TEST_CASE("cumulative bound refuses rounds past an unmet hypothesis") {
  const auto t = run_alternating(protocol_preset("fresh-3round"));
  CHECK(t.rounds[0].hypothesis_met);
  CHECK(t.rounds[1].hypothesis_met);
  CHECK_FALSE(t.rounds[2].hypothesis_met);
  CHECK_NOTHROW(cumulative_distance_bound(t, 2));
  CHECK_THROWS_AS(cumulative_distance_bound(t, 4), Error);
  const auto q = check_extraction_quality(t, 2);
  CHECK_FALSE(q.hypothesis_met);
  CHECK(q.holds);  // vacuous
}

TEST_CASE("a leak that writes into E breaks the Markov condition") {
  // After round 0, (L, E) holds a Bell state indexed by two bits of B. XOR-ing
  // a bit of A into L keeps A's own view (E is maximally mixed given a) but
  // ties A to B given E.
  auto cfg = protocol_preset("alternating-2round");
  cfg.validate = false;
  cfg.channels[1].kind = ChannelSpec::Kind::xor_into_e;
  cfg.channels[1].bit = 0;
  cfg.channels[1].target = 0;
  const auto t = run_alternating(cfg);
  CHECK(t.rounds[0].validation.ok);
  const auto& v = t.rounds[1].validation;
  CHECK_FALSE(v.ok);
  CHECK(v.failed_clause() == "passive marginal invariance");
  const auto m = check_markov_preservation(t);
  CHECK_FALSE(m.ok);
  REQUIRE(m.first_violation.has_value());
  CHECK(*m.first_violation == 1);
  CHECK(m.worst > markov_tolerance);

  cfg.validate = true;
  CHECK_THROWS_AS(run_alternating(cfg), ValidationError);
}

TEST_CASE("initial states must be Markov") {
  // A = B uniform, trivial E.
  ProtocolConfig cfg = protocol_preset("alternating-2round");
  std::vector<double> p(1024, 0.0);
  for (std::size_t v = 0; v < 32; ++v) p[(v << 5) | v] = 1.0 / 32;
  cfg.sources = CqState(p, std::vector<DensityOperator>(1024, maximally_mixed(1)), 10);
  cfg.env_factors = 0;
  CHECK_THROWS_AS(run_alternating(cfg), ValidationError);
}

TEST_CASE("chained seeds are restricted to one round") {
  const auto t = run_alternating(protocol_preset("chained-1round"));
  CHECK(t.variant == SeedVariant::chained);
  CHECK(t.rounds.size() == 1);
  auto cfg = protocol_preset("chained-1round");
  cfg.rounds = 2;
  cfg.channels.resize(2);
  CHECK_THROWS_AS(run_alternating(cfg), Error);
}

TEST_CASE("variant names round trip") {
  for (auto v : {SeedVariant::chained, SeedVariant::fresh}) CHECK(parse_variant(variant_name(v)) == v);
  CHECK_THROWS(parse_variant("bogus"));
  CHECK(protocol_preset_names().size() == 4);
  CHECK_THROWS(protocol_preset("bogus"));
}
