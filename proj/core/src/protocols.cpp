#include "unplab/protocols.hpp"

#include <cmath>

#include "unplab/entropy.hpp"
#include "unplab/linalg.hpp"

namespace unplab {

namespace {

double entropy_of(const CqState& view, double epsilon) {
  return epsilon == 0.0 ? min_entropy(view) : smooth_min_entropy_lower(view, epsilon).value;
}

double parity_sign(std::size_t j) { return j % 2 == 0 ? 1.0 : -1.0; }

// Uniform n-bit A and B. With `bell_side` E_0 is one qubit maximally
// entangled with a one-qubit R_0; otherwise E_0 is trivial.
CqState uniform_sources(std::size_t n, bool bell_side) {
  const std::size_t count = std::size_t{1} << (2 * n);
  std::vector<double> probs(count, 1.0 / static_cast<double>(count));
  DensityOperator side = bell_side ? maximally_entangled(2).density()
                                   : DensityOperator::trusted(Matrix::Identity(1, 1), {1});
  return CqState(std::move(probs), std::vector<DensityOperator>(count, side), 2 * n);
}

ExtractorSpec one_bit_spec(std::size_t n, double eps_ext) {
  ExtractorSpec spec;
  spec.n = n;
  spec.m = 1;
  spec.eps_ext = eps_ext;
  spec.design = build_weak_design(n, 1);
  return spec;
}

// View of the passive source after the pre-processing step alone, computed on
// a copy of the ensemble.
CqState passive_after_pre_process(const SourceEnsemble& ens, Source active, const LeakageChannel& chan) {
  LeakageChannel pre_only = chan;
  pre_only.dim_l = 1;
  pre_only.lambda = 0.0;
  pre_only.leaks.assign(chan.dim_a(), KrausChannel::identity({chan.dim_e_out()}));
  SourceEnsemble copy = ens;
  copy.apply_leakage(active, pre_only);
  return copy.view(active == Source::A ? Source::B : Source::A);
}

// sum_t || Tr_L sigma_t - rho_t ||_1 over weighted blocks, L the leading factor of E.
double passive_invariance_residual(const CqState& after, const CqState& reference, std::size_t dim_l) {
  const std::size_t de = reference.side_dim();
  double residual = 0.0;
  for (std::size_t t = 0; t < reference.alphabet_size(); ++t) {
    const Matrix traced = linalg::partial_trace(after.weighted(t), {dim_l, de}, {1});
    residual += linalg::trace_norm_hermitian(traced - reference.weighted(t));
  }
  return residual;
}

ChannelSpec leak(ChannelSpec::Kind kind, std::size_t bit) {
  ChannelSpec c;
  c.kind = kind;
  c.bit = bit;
  return c;
}

}  // namespace

std::string variant_name(SeedVariant v) { return v == SeedVariant::chained ? "chained-seed" : "fresh-seed"; }

SeedVariant parse_variant(const std::string& s) {
  if (s == "chained-seed" || s == "chained") return SeedVariant::chained;
  if (s == "fresh-seed" || s == "fresh") return SeedVariant::fresh;
  throw ValidationError("unknown seed variant '" + s + "'");
}

LeakageChannel ChannelSpec::resolve(std::size_t dim_a, std::size_t dim_e) const {
  switch (kind) {
    case Kind::identity:
      return LeakageChannel::identity(dim_a, dim_e);
    case Kind::classical_copy:
      return LeakageChannel::classical_copy(dim_a, dim_e, bit);
    case Kind::superdense:
      return LeakageChannel::superdense_bits(dim_a, dim_e, bit);
    case Kind::xor_into_e:
      return LeakageChannel::xor_into_e(dim_a, dim_e, bit, target);
    case Kind::custom:
      if (!custom) throw ValidationError("custom channel spec without a channel");
      if (custom->dim_a() < dim_a || custom->dim_e() != dim_e) {
        throw DimensionError("custom channel does not match the current A and E sizes");
      }
      return *custom;
  }
  throw ValidationError("unknown channel kind");
}

std::string ChannelSpec::label() const {
  switch (kind) {
    case Kind::identity:
      return "identity";
    case Kind::classical_copy:
      return "classical-copy:" + std::to_string(bit);
    case Kind::superdense:
      return "superdense:" + std::to_string(bit);
    case Kind::xor_into_e:
      return "xor-into-e:" + std::to_string(bit) + ":" + std::to_string(target);
    case Kind::custom:
      return custom ? custom->name : "custom";
  }
  return "unknown";
}

ProtocolTranscript run_alternating(const ProtocolConfig& config) {
  if (config.extractor.n != config.n) throw DimensionError("extractor source length differs from the source size");
  if (config.sources.alphabet_bits() != 2 * config.n) throw DimensionError("sources must be indexed by (a << n) | b");
  if (config.lambda < 0.0) throw ValidationError("lambda must be non-negative");
  if (config.variant == SeedVariant::chained && config.rounds > 1 &&
      config.extractor.m < config.extractor.design.d) {
    throw ValidationError("chained seeds need output length >= seed length (" + std::to_string(config.extractor.m) +
                          " < " + std::to_string(config.extractor.design.d) + "); use the fresh-seed variant");
  }

  auto ens = SourceEnsemble::from_cq(config.sources, config.n, config.env_factors);
  ProtocolTranscript tr;
  tr.name = config.name;
  tr.variant = config.variant;
  tr.n = config.n;
  tr.lambda = config.lambda;
  tr.epsilon = config.epsilon;
  tr.eps_ext = config.extractor.eps_ext;
  tr.k_ext = composed_k_required(config.extractor);
  tr.cmi0 = ens.cmi();
  if (tr.cmi0 > 1e-9) {
    throw ValidationError("sources are not conditionally independent given E_0 R_0 (I = " + std::to_string(tr.cmi0) + ")");
  }
  tr.h_a0 = entropy_of(ens.view(Source::A), config.epsilon);
  tr.h_b0 = entropy_of(ens.view(Source::B), config.epsilon);
  tr.k = std::min(tr.h_a0, tr.h_b0);
  tr.budget = config.budget;
  tr.budget_decay_per_round = config.adversary_round_cost + 2 * static_cast<int>(std::ceil(config.lambda));

  const std::size_t dim_a = std::size_t{1} << config.n;
  const double cap = std::exp2(config.lambda);
  double h_a = tr.h_a0, h_b = tr.h_b0;
  std::size_t delta_a = 0, delta_b = 0;

  for (std::size_t i = 0; i < config.rounds; ++i) {
    RoundRecord rec;
    rec.round = i;
    rec.active = i % 2 == 0 ? Source::B : Source::A;
    const Source passive = rec.active == Source::A ? Source::B : Source::A;
    const ChannelSpec spec = i < config.channels.size() ? config.channels[i] : ChannelSpec{};
    const LeakageChannel chan = spec.resolve(dim_a, ens.dim_e());
    rec.channel = spec.label();
    rec.lambda = std::log2(static_cast<double>(chan.dim_l));
    if (static_cast<double>(chan.dim_l) > cap * (1.0 + 1e-12)) {
      throw ValidationError("round " + std::to_string(i) + " channel writes more than lambda qubits");
    }

    const CqState before = ens.view(rec.active);
    rec.validation = validate_leakage_channel(chan, before);
    if (!rec.validation.ok && config.validate) {
      throw ValidationError("round " + std::to_string(i) + " leakage channel rejected: clause '" +
                            rec.validation.failed_clause() + "' failed");
    }
    rec.h_a_before = h_a;
    rec.h_b_before = h_b;
    const double h_active_before = rec.active == Source::A ? h_a : h_b;
    const double h_passive_before = rec.active == Source::A ? h_b : h_a;
    rec.k_required = tr.k_ext + 2.0 * config.lambda;
    rec.hypothesis_met = h_active_before >= rec.k_required - 1e-9;

    const CqState passive_ref = passive_after_pre_process(ens, rec.active, chan);

    std::optional<double> pushed;
    if (rec.validation.ok && config.epsilon > 0.0) {
      pushed = measure_chain_degradation(before, chan, config.epsilon).h_after;
    }
    ens.apply_leakage(rec.active, chan);
    {
      const double residual = passive_invariance_residual(ens.view(passive), passive_ref, chan.dim_l);
      const bool ok = residual <= invariance_tolerance;
      rec.validation.clauses.push_back({"passive marginal invariance", ok, residual,
                                        "sum_t ||Tr_L of the passive view after the leak - view after pre-process||_1"});
      if (!ok) {
        rec.validation.ok = false;
        if (config.validate) {
          throw ValidationError("round " + std::to_string(i) +
                                " leakage channel rejected: clause 'passive marginal invariance' failed");
        }
      }
    }
    ens.compress_environment(config.env_cap);

    CqState after_active = ens.view(rec.active);
    double h_active_after = entropy_of(after_active, config.epsilon);
    if (pushed) h_active_after = std::max(h_active_after, *pushed);
    const double h_passive_after = entropy_of(ens.view(passive), config.epsilon);
    (rec.active == Source::A ? h_a : h_b) = h_active_after;
    (rec.active == Source::A ? h_b : h_a) = h_passive_after;
    rec.h_a_after = h_a;
    rec.h_b_after = h_b;
    rec.degradation_slack = h_active_after - (h_active_before - 2.0 * rec.lambda);
    rec.passive_change = h_passive_after - h_passive_before;

    (rec.active == Source::A ? delta_a : delta_b) += 1;
    rec.delta_a = delta_a;
    rec.delta_b = delta_b;
    const std::size_t next = i + 1;
    const double lam = config.lambda;
    rec.alt_bound_a = tr.k - (1.0 + parity_sign(next + 1) + 2.0 * static_cast<double>(next)) * lam;
    rec.alt_bound_b = tr.k - (1.0 + parity_sign(next) + 2.0 * static_cast<double>(next)) * lam;
    rec.fresh_bound_a = tr.k - static_cast<double>(delta_a) * 2.0 * lam;
    rec.fresh_bound_b = tr.k - static_cast<double>(delta_b) * 2.0 * lam;

    rec.cmi = ens.cmi();
    rec.output_distance = composed_output_distance(config.extractor, after_active);
    rec.distance_bound = config.extractor.eps_ext + 2.0 * config.epsilon;
    if (config.budget) rec.budget_after = *config.budget - static_cast<int>(next) * tr.budget_decay_per_round;
    rec.dim_e = ens.dim_e();
    rec.dim_r = ens.dim_r();
    rec.output_state = std::move(after_active);
    tr.rounds.push_back(std::move(rec));
  }
  return tr;
}

MarkovCheck check_markov_preservation(const ProtocolTranscript& transcript) {
  MarkovCheck out;
  out.worst = transcript.cmi0;
  for (const auto& r : transcript.rounds) {
    out.worst = std::max(out.worst, r.cmi);
    if (r.cmi > markov_tolerance && out.ok) {
      out.ok = false;
      out.first_violation = r.round;
    }
  }
  return out;
}

ExtractionQuality check_extraction_quality(const ProtocolTranscript& transcript, std::size_t round) {
  if (round >= transcript.rounds.size()) throw ValidationError("round index past the end of the transcript");
  const auto& r = transcript.rounds[round];
  ExtractionQuality q;
  q.round = round;
  q.hypothesis_met = r.hypothesis_met;
  q.active_entropy = r.active == Source::A ? r.h_a_before : r.h_b_before;
  q.required = r.k_required;
  q.distance = r.output_distance;
  q.bound = r.distance_bound;
  q.holds = !q.hypothesis_met || q.distance <= q.bound + 1e-7;
  return q;
}

CumulativeDistance cumulative_distance_bound(const ProtocolTranscript& transcript, std::size_t i) {
  if (i > transcript.rounds.size()) throw ValidationError("round count past the end of the transcript");
  CumulativeDistance c;
  c.rounds = i;
  c.bound = static_cast<double>(i) * (2.0 * transcript.epsilon + transcript.eps_ext);
  for (std::size_t j = 0; j < i; ++j) {
    const auto& r = transcript.rounds[j];
    if (!r.hypothesis_met) {
      c.hypotheses_met = false;
      throw HypothesisError("round " + std::to_string(j) + " does not meet its entropy hypothesis");
    }
    c.measured += r.output_distance;
  }
  c.holds = c.measured <= c.bound + 1e-7;
  return c;
}

std::vector<std::string> protocol_preset_names() {
  return {"alternating-2round", "alternating-4round", "fresh-3round", "chained-1round"};
}

ProtocolConfig protocol_preset(const std::string& name) {
  using K = ChannelSpec::Kind;
  ProtocolConfig c;
  c.name = name;
  c.lambda = 1.0;
  c.variant = SeedVariant::fresh;
  if (name == "alternating-2round") {
    // Quantum leak first: E_0 is half of a Bell pair held with R_0.
    c.n = 5;
    c.sources = uniform_sources(5, true);
    c.env_factors = 1;
    c.rounds = 2;
    c.extractor = one_bit_spec(5, 0.5);
    c.channels = {leak(K::superdense, 0), leak(K::classical_copy, 0)};
  } else if (name == "alternating-4round") {
    // eps_ext = 2^{-1/2} puts k_ext + 2 lambda at 4, so all four rounds meet the hypothesis.
    c.n = 5;
    c.sources = uniform_sources(5, false);
    c.rounds = 4;
    c.extractor = one_bit_spec(5, std::sqrt(0.5));
    c.channels = {leak(K::classical_copy, 0), leak(K::classical_copy, 0), leak(K::classical_copy, 1),
                  leak(K::classical_copy, 1)};
  } else if (name == "fresh-3round") {
    c.n = 5;
    c.sources = uniform_sources(5, true);
    c.env_factors = 1;
    c.rounds = 3;
    c.extractor = one_bit_spec(5, 0.5);
    c.channels = {leak(K::superdense, 0), leak(K::classical_copy, 2), leak(K::classical_copy, 2)};
    c.budget = 64;
    c.adversary_round_cost = 2;
  } else if (name == "chained-1round") {
    c.n = 5;
    c.sources = uniform_sources(5, false);
    c.rounds = 1;
    c.variant = SeedVariant::chained;
    c.extractor = one_bit_spec(5, 0.5);
    c.channels = {leak(K::classical_copy, 0)};
  } else {
    throw ValidationError("unknown protocol preset '" + name + "'");
  }
  return c;
}

}  // namespace unplab
