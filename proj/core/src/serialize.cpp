#include "unplab/serialize.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <type_traits>

namespace unplab {

namespace {

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <typename T>
T field_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  const auto& v = j.at(key);
  if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
    // nlohmann converts -3 to a huge unsigned value without complaint.
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
  }
  return v.get<T>();
}

json encode_optional(const std::optional<double>& v) { return v ? encode_number(*v) : json(nullptr); }
json encode_optional(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

// Converts nlohmann type errors into ConfigError.
template <typename F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

// Decimal symbol key; std::stoull alone accepts "12abc" prefixes and throws
// std::invalid_argument on "".
std::size_t symbol_index(const std::string& key) {
  const bool digits = !key.empty() && std::all_of(key.begin(), key.end(), [](unsigned char c) { return std::isdigit(c); });
  if (!digits) throw ConfigError("symbol keys must be decimal integers, got '" + key + "'");
  try {
    return static_cast<std::size_t>(std::stoull(key));
  } catch (const std::out_of_range&) {
    throw ConfigError("symbol key '" + key + "' is out of range");
  }
}

Indices decode_indices(const json& j) {
  Indices out;
  for (const auto& v : j) out.push_back(v.get<std::size_t>());
  return out;
}

const char* kind_name(ChannelSpec::Kind k) {
  switch (k) {
    case ChannelSpec::Kind::identity:
      return "identity";
    case ChannelSpec::Kind::classical_copy:
      return "classical-copy";
    case ChannelSpec::Kind::superdense:
      return "superdense";
    case ChannelSpec::Kind::xor_into_e:
      return "xor-into-e";
    case ChannelSpec::Kind::custom:
      return "custom";
  }
  return "unknown";
}

}  // namespace

json encode_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double decode_number(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ConfigError("expected a number, got " + j.dump());
}

// ---------------------------------------------------------------- matrices and states

json encode(const Matrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json rr = json::array(), ri = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      rr.push_back(m(i, k).real());
      ri.push_back(m(i, k).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return {{"re", std::move(re)}, {"im", std::move(im)}};
}

Matrix decode_matrix(const json& j) {
  return guarded("matrix", [&] {
    const auto& re = require(j, "re");
    if (!re.is_array()) throw ConfigError("'re' must be an array of rows");
    const auto rows = static_cast<Eigen::Index>(re.size());
    const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(re.at(0).size());
    Matrix m = Matrix::Zero(rows, cols);
    const bool has_im = j.contains("im");
    for (Eigen::Index i = 0; i < rows; ++i) {
      const auto& row = re.at(static_cast<std::size_t>(i));
      if (static_cast<Eigen::Index>(row.size()) != cols) throw ConfigError("ragged matrix rows");
      for (Eigen::Index k = 0; k < cols; ++k) {
        const double im = has_im ? j.at("im").at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k)).get<double>() : 0.0;
        m(i, k) = Complex(row.at(static_cast<std::size_t>(k)).get<double>(), im);
      }
    }
    return m;
  });
}

json encode(const DensityOperator& rho) {
  json j = encode(rho.matrix());
  j["dims"] = rho.dims();
  if (!rho.is_normalized()) j["normalization"] = "subnormalized";
  return j;
}

DensityOperator decode_state(const json& j) {
  return guarded("state", [&] {
    Matrix m = decode_matrix(j);
    Dims dims = j.contains("dims") ? require(j, "dims").get<Dims>() : Dims{static_cast<std::size_t>(m.rows())};
    const auto norm = field_or<std::string>(j, "normalization", "normalized") == "subnormalized"
                          ? Normalization::subnormalized
                          : Normalization::normalized;
    return DensityOperator(std::move(m), std::move(dims), norm);
  });
}

json encode(const CqState& state) {
  json probs = json::object(), conds = json::object();
  for (std::size_t x = 0; x < state.alphabet_size(); ++x) {
    probs[std::to_string(x)] = state.prob(x);
    conds[std::to_string(x)] = encode(state.conditional(x));
  }
  return {{"bits", state.alphabet_bits()}, {"probs", std::move(probs)}, {"conditionals", std::move(conds)}};
}

CqState decode_cq(const json& j) {
  return guarded("cq state", [&] {
    const auto& probs_j = require(j, "probs");
    const auto& conds_j = require(j, "conditionals");
    if (!probs_j.is_array() && !probs_j.is_object()) throw ConfigError("'probs' must be an array or an object");
    if (!conds_j.is_array() && !conds_j.is_object()) throw ConfigError("'conditionals' must be an array or an object");
    const auto index_of = symbol_index;
    std::size_t count = probs_j.size();
    std::vector<double> probs(count, -1.0);
    if (probs_j.is_array()) {
      for (std::size_t x = 0; x < count; ++x) probs[x] = probs_j.at(x).get<double>();
    } else {
      for (const auto& [key, v] : probs_j.items()) {
        const auto x = index_of(key);
        if (x >= count) throw ConfigError("symbol " + key + " out of range");
        probs[x] = v.get<double>();
      }
    }
    for (std::size_t x = 0; x < count; ++x) {
      if (probs[x] < 0.0) throw ConfigError("missing or negative probability for symbol " + std::to_string(x));
    }
    std::vector<std::optional<DensityOperator>> conds(count);
    if (conds_j.is_array()) {
      if (conds_j.size() != count) throw ConfigError("conditionals and probs differ in length");
      for (std::size_t x = 0; x < count; ++x) conds[x] = decode_state(conds_j.at(x));
    } else {
      for (const auto& [key, v] : conds_j.items()) {
        const auto x = index_of(key);
        if (x >= count) throw ConfigError("symbol " + key + " out of range");
        conds[x] = decode_state(v);
      }
    }
    std::vector<DensityOperator> out;
    for (std::size_t x = 0; x < count; ++x) {
      if (!conds[x]) throw ConfigError("missing conditional state for symbol " + std::to_string(x));
      out.push_back(*conds[x]);
    }
    std::optional<std::size_t> bits;
    if (j.contains("bits")) bits = j.at("bits").get<std::size_t>();
    return CqState(std::move(probs), std::move(out), bits);
  });
}

// ---------------------------------------------------------------- designs, channels, families

json encode(const WeakDesign& design) {
  return {{"t", design.t}, {"r", design.r}, {"d", design.d}, {"sets", design.sets}};
}

WeakDesign decode_design(const json& j) {
  return guarded("design", [&] {
    WeakDesign d;
    d.t = require(j, "t").get<std::size_t>();
    d.r = field_or<double>(j, "r", 1.0);
    d.d = require(j, "d").get<std::size_t>();
    for (const auto& s : require(j, "sets")) d.sets.push_back(decode_indices(s));
    return d;
  });
}

json encode(const KrausChannel& chan) {
  json ops = json::array();
  for (const auto& k : chan.ops()) ops.push_back(encode(k));
  return {{"in_dims", chan.in_dims()}, {"out_dims", chan.out_dims()}, {"ops", std::move(ops)}};
}

KrausChannel decode_kraus(const json& j) {
  return guarded("kraus channel", [&] {
    std::vector<Matrix> ops;
    for (const auto& k : require(j, "ops")) ops.push_back(decode_matrix(k));
    return KrausChannel(std::move(ops), require(j, "in_dims").get<Dims>(), require(j, "out_dims").get<Dims>());
  });
}

json encode(const LeakageChannel& chan) {
  json leaks = json::array();
  for (const auto& l : chan.leaks) leaks.push_back(encode(l));
  return {{"name", chan.name},
          {"lambda", encode_number(chan.lambda)},
          {"dim_l", chan.dim_l},
          {"pre_gate_cost", encode_optional(chan.pre_gate_cost)},
          {"pre_process", encode(chan.pre_process)},
          {"leaks", std::move(leaks)}};
}

LeakageChannel decode_leakage(const json& j) {
  return guarded("leakage channel", [&] {
    LeakageChannel c;
    c.name = field_or<std::string>(j, "name", "custom");
    c.dim_l = require(j, "dim_l").get<std::size_t>();
    c.lambda = j.contains("lambda") ? decode_number(j.at("lambda")) : std::log2(static_cast<double>(c.dim_l));
    if (j.contains("pre_gate_cost") && !j.at("pre_gate_cost").is_null()) c.pre_gate_cost = j.at("pre_gate_cost").get<int>();
    c.pre_process = decode_kraus(require(j, "pre_process"));
    for (const auto& l : require(j, "leaks")) c.leaks.push_back(decode_kraus(l));
    return c;
  });
}

json encode(const AdversaryFamily& family) {
  return {{"descriptor", family.descriptor()},
          {"unbounded", family.is_unbounded()},
          {"budget", encode_optional(family.budget())},
          {"strategies", family.strategies().size()}};
}

AdversaryFamily family_from_descriptor(const std::string& descriptor, std::size_t side_dim) {
  if (descriptor == "unbounded") return AdversaryFamily::unbounded();
  if (descriptor == "constants") return AdversaryFamily::constants_only();
  auto parse_int = [&](const std::string& s) {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size() || v < 0) throw ConfigError("bad family descriptor '" + descriptor + "'");
    return v;
  };
  try {
    if (descriptor.rfind("budget:", 0) == 0) {
      const int s = parse_int(descriptor.substr(7));
      AdversaryFamily f(s);
      f.add(Strategy::basis_measurement(0));
      int qubits = 0;
      while ((std::size_t{1} << qubits) < side_dim) ++qubits;
      if ((std::size_t{1} << qubits) == side_dim && qubits >= 1 && qubits <= 3) {
        const auto circuits = AdversaryFamily::enumerate_circuits(qubits, std::min(s, 6));
        for (const auto& c : circuits.strategies()) {
          if (c.kind == StrategyKind::circuit && c.gate_cost <= s) f.add(c);
        }
      }
      f.set_descriptor(descriptor);
      return f;
    }
    if (descriptor.rfind("enumerate:", 0) == 0) {
      const auto rest = descriptor.substr(10);
      const auto colon = rest.find(':');
      if (colon == std::string::npos) throw ConfigError("bad family descriptor '" + descriptor + "'");
      return AdversaryFamily::enumerate_circuits(parse_int(rest.substr(0, colon)), parse_int(rest.substr(colon + 1)));
    }
  } catch (const std::invalid_argument&) {
    throw ConfigError("bad family descriptor '" + descriptor + "'");
  } catch (const std::out_of_range&) {
    throw ConfigError("bad family descriptor '" + descriptor + "'");
  }
  throw ConfigError("unknown family descriptor '" + descriptor + "'");
}

json encode(const ExtractorSpec& spec) {
  return {{"n", spec.n}, {"m", spec.m}, {"eps_ext", encode_number(spec.eps_ext)}, {"design", encode(spec.design)}};
}

ExtractorSpec decode_extractor(const json& j) {
  return guarded("extractor", [&] {
    ExtractorSpec s;
    s.n = require(j, "n").get<std::size_t>();
    s.m = field_or<std::size_t>(j, "m", 1);
    s.eps_ext = decode_number(require(j, "eps_ext"));
    s.design = j.contains("design") ? decode_design(j.at("design"))
                                    : build_weak_design(s.n, s.m, field_or<std::uint64_t>(j, "design_seed", 0));
    return s;
  });
}

// ---------------------------------------------------------------- reports

json encode(const GuessCertificate& c) {
  return {{"value", encode_number(c.value)},
          {"dual_value", encode_number(c.dual_value)},
          {"gap", encode_number(c.gap)},
          {"min_dual_eigenvalue", encode_number(c.min_dual_eigenvalue)},
          {"iterations", c.iterations},
          {"method", c.method},
          {"converged", c.converged}};
}

json encode(const EntropyInterval& r) {
  return {{"lower", encode_number(r.lower)},
          {"upper", encode_number(r.upper)},
          {"family_complete", r.family_complete},
          {"upper_witness", r.upper_witness}};
}

json encode(const SmoothResult& r) {
  return {{"value", encode_number(r.value)},
          {"epsilon", encode_number(r.epsilon)},
          {"candidate_distance", encode_number(r.candidate_distance)},
          {"clip_level", encode_number(r.clip_level)},
          {"certificate", encode(r.certificate)}};
}

json encode(const ChainRuleReport& r) {
  return {{"epsilon", encode_number(r.epsilon)},
          {"ell", encode_number(r.ell)},
          {"h_xb", encode_number(r.h_xb)},
          {"h_xbc", encode_number(r.h_xbc)},
          {"slack", encode_number(r.slack)},
          {"holds", r.holds},
          {"interval_upper_xbc", encode_optional(r.interval_upper_xbc)},
          {"interval_slack", encode_optional(r.interval_slack)},
          {"family_complete", r.family_complete}};
}

json encode(const LeakageValidation& r) {
  json clauses = json::array();
  for (const auto& c : r.clauses) {
    clauses.push_back({{"clause", c.clause}, {"ok", c.ok}, {"residual", encode_number(c.residual)}, {"detail", c.detail}});
  }
  return {{"ok", r.ok},
          {"invariance_residual", encode_number(r.invariance_residual)},
          {"failed_clause", r.failed_clause()},
          {"clauses", std::move(clauses)}};
}

json encode(const DegradationReport& r) {
  return {{"epsilon", encode_number(r.epsilon)},
          {"lambda", encode_number(r.lambda)},
          {"h_before", encode_number(r.h_before)},
          {"h_after_pre", encode_number(r.h_after_pre)},
          {"h_after", encode_number(r.h_after)},
          {"slack", encode_number(r.slack)},
          {"holds", r.holds},
          {"validation", encode(r.validation)},
          {"shifted_budget", encode_optional(r.shifted_budget)},
          {"interval_upper_after", encode_optional(r.interval_upper_after)},
          {"interval_slack", encode_optional(r.interval_slack)}};
}

json encode(const DesignCheck& r) {
  return {{"ok", r.ok},
          {"violating_index", r.violating_index ? json(*r.violating_index) : json(nullptr)},
          {"worst_sum", encode_number(r.worst_sum)},
          {"bound", encode_number(r.bound)},
          {"message", r.message}};
}

json encode(const IpExtractorReport& r) {
  return {{"n", r.n},
          {"eps_ext", encode_number(r.eps_ext)},
          {"distance", encode_number(r.distance)},
          {"min_entropy", encode_number(r.min_entropy)},
          {"k_required", encode_number(r.k_required)},
          {"hypothesis_met", r.hypothesis_met},
          {"holds", r.holds}};
}

json encode(const ComposedExtractorReport& r) {
  return {{"n", r.n},
          {"m", r.m},
          {"d", r.d},
          {"active_seed_bits", r.active_seed_bits},
          {"eps_ext", encode_number(r.eps_ext)},
          {"distance", encode_number(r.distance)},
          {"min_entropy", encode_number(r.min_entropy)},
          {"k_required", encode_number(r.k_required)},
          {"bound", encode_number(r.bound)},
          {"hypothesis_met", r.hypothesis_met},
          {"holds", r.holds}};
}

json encode(const ProtocolTranscript& t) {
  json rounds = json::array();
  for (const auto& r : t.rounds) {
    rounds.push_back({{"round", r.round},
                      {"active", std::string(1, source_name(r.active))},
                      {"channel", r.channel},
                      {"lambda", encode_number(r.lambda)},
                      {"validation", encode(r.validation)},
                      {"h_a_before", encode_number(r.h_a_before)},
                      {"h_b_before", encode_number(r.h_b_before)},
                      {"h_a_after", encode_number(r.h_a_after)},
                      {"h_b_after", encode_number(r.h_b_after)},
                      {"degradation_slack", encode_number(r.degradation_slack)},
                      {"passive_change", encode_number(r.passive_change)},
                      {"alt_bound_a", encode_number(r.alt_bound_a)},
                      {"alt_bound_b", encode_number(r.alt_bound_b)},
                      {"delta_a", r.delta_a},
                      {"delta_b", r.delta_b},
                      {"fresh_bound_a", encode_number(r.fresh_bound_a)},
                      {"fresh_bound_b", encode_number(r.fresh_bound_b)},
                      {"cmi", encode_number(r.cmi)},
                      {"hypothesis_met", r.hypothesis_met},
                      {"k_required", encode_number(r.k_required)},
                      {"output_distance", encode_number(r.output_distance)},
                      {"distance_bound", encode_number(r.distance_bound)},
                      {"budget_after", encode_optional(r.budget_after)},
                      {"dim_e", r.dim_e},
                      {"dim_r", r.dim_r}});
  }
  return {{"name", t.name},
          {"variant", variant_name(t.variant)},
          {"n", t.n},
          {"lambda", encode_number(t.lambda)},
          {"epsilon", encode_number(t.epsilon)},
          {"eps_ext", encode_number(t.eps_ext)},
          {"k", encode_number(t.k)},
          {"k_ext", encode_number(t.k_ext)},
          {"h_a0", encode_number(t.h_a0)},
          {"h_b0", encode_number(t.h_b0)},
          {"cmi0", encode_number(t.cmi0)},
          {"budget", encode_optional(t.budget)},
          {"budget_decay_per_round", t.budget_decay_per_round},
          {"rounds", std::move(rounds)}};
}

json encode(const MarkovCheck& r) {
  return {{"ok", r.ok},
          {"first_violation", r.first_violation ? json(*r.first_violation) : json(nullptr)},
          {"worst", encode_number(r.worst)}};
}

json encode(const ExtractionQuality& r) {
  return {{"round", r.round},
          {"hypothesis_met", r.hypothesis_met},
          {"active_entropy", encode_number(r.active_entropy)},
          {"required", encode_number(r.required)},
          {"distance", encode_number(r.distance)},
          {"bound", encode_number(r.bound)},
          {"holds", r.holds}};
}

json encode(const CumulativeDistance& r) {
  return {{"rounds", r.rounds},
          {"hypotheses_met", r.hypotheses_met},
          {"bound", encode_number(r.bound)},
          {"measured", encode_number(r.measured)},
          {"holds", r.holds}};
}

// ---------------------------------------------------------------- protocol configs

json encode(const ChannelSpec& spec) {
  json j = {{"kind", kind_name(spec.kind)}, {"bit", spec.bit}};
  if (spec.kind == ChannelSpec::Kind::xor_into_e) j["target"] = spec.target;
  if (spec.kind == ChannelSpec::Kind::custom && spec.custom) j["channel"] = encode(*spec.custom);
  return j;
}

ChannelSpec decode_channel_spec(const json& j) {
  return guarded("channel spec", [&] {
    ChannelSpec s;
    const auto kind = j.is_string() ? j.get<std::string>() : require(j, "kind").get<std::string>();
    if (kind == "identity") {
      s.kind = ChannelSpec::Kind::identity;
    } else if (kind == "classical-copy") {
      s.kind = ChannelSpec::Kind::classical_copy;
    } else if (kind == "superdense") {
      s.kind = ChannelSpec::Kind::superdense;
    } else if (kind == "xor-into-e") {
      s.kind = ChannelSpec::Kind::xor_into_e;
    } else if (kind == "custom") {
      s.kind = ChannelSpec::Kind::custom;
      s.custom = decode_leakage(require(j, "channel"));
    } else {
      throw ConfigError("unknown channel kind '" + kind + "'");
    }
    if (j.is_object()) {
      s.bit = field_or<std::size_t>(j, "bit", 0);
      s.target = field_or<std::size_t>(j, "target", 0);
    }
    return s;
  });
}

ProtocolConfig decode_protocol_config(const json& j) {
  return guarded("protocol config", [&] {
    if (!j.is_object()) throw ConfigError("protocol config must be an object");
    ProtocolConfig c;
    if (j.contains("preset")) {
      try {
        c = protocol_preset(j.at("preset").get<std::string>());
      } catch (const ValidationError& e) {
        throw ConfigError(e.what());
      }
    }
    c.name = field_or<std::string>(j, "name", c.name);
    const std::size_t old_n = c.n;
    c.n = field_or<std::size_t>(j, "n", c.n);
    if (c.n == 0) throw ConfigError("protocol config needs 'n' or a preset");
    c.rounds = field_or<std::size_t>(j, "rounds", c.rounds);
    if (j.contains("lambda")) c.lambda = decode_number(j.at("lambda"));
    if (j.contains("epsilon")) c.epsilon = decode_number(j.at("epsilon"));
    if (j.contains("variant")) {
      try {
        c.variant = parse_variant(j.at("variant").get<std::string>());
      } catch (const ValidationError& e) {
        throw ConfigError(e.what());
      }
    }
    if (j.contains("budget")) c.budget = j.at("budget").is_null() ? std::nullopt : std::optional<int>(j.at("budget").get<int>());
    c.adversary_round_cost = field_or<int>(j, "adversary_round_cost", c.adversary_round_cost);
    c.validate = field_or<bool>(j, "validate", c.validate);
    c.env_cap = field_or<std::size_t>(j, "env_cap", c.env_cap);

    if (j.contains("sources")) {
      c.sources = decode_cq(j.at("sources"));
      c.env_factors = field_or<std::size_t>(j, "env_factors", 0);
    } else if (c.n != old_n) {
      const std::size_t count = std::size_t{1} << (2 * c.n);
      c.sources = CqState(std::vector<double>(count, 1.0 / static_cast<double>(count)),
                          std::vector<DensityOperator>(count, DensityOperator::trusted(Matrix::Identity(1, 1), {1})),
                          2 * c.n);
      c.env_factors = 0;
    }
    if (j.contains("extractor")) {
      c.extractor = decode_extractor(j.at("extractor"));
    } else if (c.extractor.n != c.n || j.contains("eps_ext") || j.contains("m")) {
      const double eps = j.contains("eps_ext") ? decode_number(j.at("eps_ext"))
                                               : (c.extractor.eps_ext > 0.0 ? c.extractor.eps_ext : 0.5);
      const std::size_t m = field_or<std::size_t>(j, "m", c.extractor.m == 0 ? 1 : c.extractor.m);
      c.extractor.n = c.n;
      c.extractor.m = m;
      c.extractor.eps_ext = eps;
      c.extractor.design = build_weak_design(c.n, m);
    }
    if (j.contains("channels")) {
      c.channels.clear();
      for (const auto& s : j.at("channels")) c.channels.push_back(decode_channel_spec(s));
    }
    return c;
  });
}

json encode(const ProtocolConfig& c) {
  json channels = json::array();
  for (const auto& s : c.channels) channels.push_back(encode(s));
  return {{"name", c.name},
          {"n", c.n},
          {"rounds", c.rounds},
          {"lambda", encode_number(c.lambda)},
          {"epsilon", encode_number(c.epsilon)},
          {"variant", variant_name(c.variant)},
          {"budget", encode_optional(c.budget)},
          {"adversary_round_cost", c.adversary_round_cost},
          {"validate", c.validate},
          {"env_cap", c.env_cap},
          {"env_factors", c.env_factors},
          {"extractor", encode(c.extractor)},
          {"channels", std::move(channels)},
          {"sources", encode(c.sources)}};
}

std::string format_csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string transcript_csv(const ProtocolTranscript& t) {
  std::ostringstream out;
  out << "round,active,channel,lambda,valid,h_a_before,h_b_before,h_a_after,h_b_after,alt_bound_a,alt_bound_b,"
         "delta_a,delta_b,fresh_bound_a,fresh_bound_b,degradation_slack,passive_change,cmi,hypothesis_met,"
         "k_required,output_distance,distance_bound,budget_after,dim_e,dim_r\n";
  const auto f = format_csv_number;
  for (const auto& r : t.rounds) {
    out << r.round << ',' << source_name(r.active) << ',' << r.channel << ',' << f(r.lambda) << ','
        << (r.validation.ok ? 1 : 0) << ',' << f(r.h_a_before) << ',' << f(r.h_b_before) << ',' << f(r.h_a_after)
        << ',' << f(r.h_b_after) << ',' << f(r.alt_bound_a) << ',' << f(r.alt_bound_b) << ',' << r.delta_a << ','
        << r.delta_b << ',' << f(r.fresh_bound_a) << ',' << f(r.fresh_bound_b) << ',' << f(r.degradation_slack)
        << ',' << f(r.passive_change) << ',' << f(r.cmi) << ',' << (r.hypothesis_met ? 1 : 0) << ','
        << f(r.k_required) << ',' << f(r.output_distance) << ',' << f(r.distance_bound) << ','
        << (r.budget_after ? std::to_string(*r.budget_after) : std::string()) << ',' << r.dim_e << ',' << r.dim_r
        << '\n';
  }
  return out.str();
}

}  // namespace unplab
