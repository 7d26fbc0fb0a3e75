#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "unplab/entropy.hpp"
#include "unplab/linalg.hpp"
#include "unplab/metrics.hpp"
#include "unplab/random.hpp"
#include "unplab/reconstruct.hpp"
#include "unplab_cli.hpp"

namespace unplab::cli {

namespace {

constexpr double default_tolerance = 1e-7;

double tolerance(const Options& opts) { return opts.tolerance.value_or(default_tolerance); }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) && !j.at(key).is_null() ? j.at(key).get<T>() : fallback;
}

double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? decode_number(j.at(key)) : fallback;
}

// Minimal CSV for flat JSON objects with a shared key order.
std::string rows_csv(const std::vector<std::string>& columns, const json& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      const auto& v = r.at(columns[i]);
      out << (i ? "," : "");
      if (v.is_number_float()) {
        out << format_csv_number(v.get<double>());
      } else if (v.is_string()) {
        out << v.get<std::string>();
      } else if (v.is_boolean()) {
        out << (v.get<bool>() ? 1 : 0);
      } else if (!v.is_null()) {
        out << v.dump();
      }
    }
    out << '\n';
  }
  return out.str();
}

// Flattens a report object into one CSV row of its scalar fields.
std::string object_csv(const json& j) {
  std::vector<std::string> cols;
  json row = json::object();
  for (const auto& [k, v] : j.items()) {
    if (v.is_primitive()) {
      cols.push_back(k);
      row[k] = v;
    }
  }
  return rows_csv(cols, json::array({row}));
}

Result finish(json report, int code, const Options& opts, const std::string& what) {
  report["exit_code"] = code;
  Result r;
  r.exit_code = code;
  r.body = opts.format == "csv" ? object_csv(report) : dump(report);
  r.summary = what + (code == exit_ok ? ": ok" : code == exit_hypothesis_unmet ? ": hypothesis unmet" : ": violation");
  return r;
}

bool certificate_ok(const GuessCertificate& c, double tol) {
  return c.gap <= tol && c.min_dual_eigenvalue >= -tol::dual_feasibility;
}

LeakageChannel channel_from_json(const json& j, std::size_t dim_a, std::size_t dim_e) {
  if (j.is_object() && j.value("kind", "") == "cnot-copy") {
    auto c = LeakageChannel::cnot_copy_attack(j.at("k").get<std::size_t>());
    if (c.dim_a() != dim_a || c.dim_e() != dim_e) throw ConfigError("cnot-copy size does not match the state");
    return c;
  }
  if (j.is_object() && j.contains("leaks")) return decode_leakage(j);
  return decode_channel_spec(j).resolve(dim_a, dim_e);
}

}  // namespace

// ---------------------------------------------------------------- entropy

Result cmd_entropy(const json& config, const Options& opts) {
  const double tol = tolerance(opts);
  json report;
  int code = exit_ok;
  if (config.contains("state")) {
    const CqState state = decode_cq(config.at("state"));
    const double eps = number_or(config, "epsilon", 0.0);
    const auto family = family_from_descriptor(get_or<std::string>(config, "family", "unbounded"), state.side_dim());
    const auto cert = guessing_probability(state);
    report["min_entropy"] = encode_number(min_entropy_from_guess(cert.value));
    report["certificate"] = encode(cert);
    if (!certificate_ok(cert, tol)) code = exit_violation;
    if (eps > 0.0) report["smooth"] = encode(smooth_min_entropy_lower(state, eps));
    report["family"] = encode(family);
    try {
      report["interval"] = encode(unpredictability_interval(state, eps, family));
    } catch (const Error& e) {
      report["interval_error"] = e.what();
      code = exit_violation;
    }
    if (state.alphabet_size() == 2) {
      const double td = trace_distance(state.conditional(0), state.conditional(1));
      const double weighted = 0.5 * linalg::trace_norm_hermitian(state.weighted(0) - state.weighted(1));
      report["binary"] = {{"trace_distance", encode_number(td)},
                          {"helstrom_success", encode_number(0.5 * state.total_weight() + weighted)}};
    }
  }
  if (config.contains("cmi")) {
    const auto& c = config.at("cmi");
    const auto rho = decode_state(c.at("state"));
    const double v = unplab::cmi(rho, c.at("a").get<Indices>(), c.at("b").get<Indices>(), get_or<Indices>(c, "c", {}));
    report["cmi"] = encode_number(v);
    if (v < -tol) code = exit_violation;
  }
  if (report.empty()) throw ConfigError("entropy config needs 'state' or 'cmi'");
  report["seed"] = opts.seed;
  return finish(std::move(report), code, opts, "entropy");
}

// ---------------------------------------------------------------- extract

Result cmd_extract(const json& config, const Options& opts) {
  const std::string mode = get_or<std::string>(config, "mode", "ip");
  const double eps = decode_number(config.at("eps_ext"));
  std::optional<CqState> state;
  if (config.contains("state")) {
    state = decode_cq(config.at("state"));
  } else if (config.contains("random")) {
    const auto& r = config.at("random");
    Rng rng(opts.seed);
    state = random_noisy_source(rng, r.at("n").get<std::size_t>(), get_or<std::size_t>(r, "side_dim", 2),
                                number_or(r, "side_weight", 0.3), number_or(r, "bias", 0.2));
  } else {
    throw ConfigError("extract config needs 'state' or 'random'");
  }
  json report;
  int code = exit_ok;
  if (mode == "ip") {
    const auto r = ip_extractor_test(*state, eps);
    report = encode(r);
    code = !r.hypothesis_met ? exit_hypothesis_unmet : r.holds ? exit_ok : exit_violation;
  } else if (mode == "composed") {
    ExtractorSpec spec;
    spec.n = state->alphabet_bits();
    spec.m = get_or<std::size_t>(config, "m", 1);
    spec.eps_ext = eps;
    spec.design = config.contains("design") ? decode_design(config.at("design"))
                                            : build_weak_design(spec.n, spec.m, get_or<std::uint64_t>(config, "design_seed", opts.seed));
    const auto r = composed_extractor_test(spec, *state);
    report = encode(r);
    report["design"] = encode(spec.design);
    code = !r.hypothesis_met ? exit_hypothesis_unmet : r.holds ? exit_ok : exit_violation;
  } else {
    throw ConfigError("unknown extract mode '" + mode + "'");
  }
  report["mode"] = mode;
  report["seed"] = opts.seed;
  return finish(std::move(report), code, opts, "extract");
}

// ---------------------------------------------------------------- design

Result cmd_design(const json& config, const Options& opts) {
  const auto t = get_or<std::size_t>(config, "t", 4);
  const auto m = get_or<std::size_t>(config, "m", 8);
  const auto seed = get_or<std::uint64_t>(config, "seed", opts.seed);
  const auto design = build_weak_design(t, m, seed);
  const auto check = verify_weak_design(design);
  const std::size_t expected = design_seed_length(t, m);
  json report = {{"design", encode(design)}, {"check", encode(check)}, {"expected_d", expected}, {"seed", seed}};
  const int code = check.ok && design.d == expected ? exit_ok : exit_violation;
  if (opts.format == "csv") {
    json rows = json::array();
    for (std::size_t i = 0; i < design.sets.size(); ++i) {
      std::string members;
      for (auto e : design.sets[i]) members += (members.empty() ? "" : " ") + std::to_string(e);
      rows.push_back({{"set", i}, {"t", t}, {"d", design.d}, {"members", members}});
    }
    Result r;
    r.exit_code = code;
    r.body = rows_csv({"set", "t", "d", "members"}, rows);
    r.summary = std::string("design: ") + (code == exit_ok ? "ok" : "violation");
    return r;
  }
  return finish(std::move(report), code, opts, "design");
}

// ---------------------------------------------------------------- reconstruct

Result cmd_reconstruct(const json& config, const Options& opts) {
  const std::string oracle_kind = get_or<std::string>(config, "oracle", "ideal");
  if (oracle_kind != "ideal" && oracle_kind != "biased") throw ConfigError("oracle must be 'ideal' or 'biased'");
  const bool ideal = oracle_kind == "ideal";
  const auto ns = get_or<std::vector<std::size_t>>(config, "n", {2, 3, 4});
  std::vector<double> epsilons{0.5};
  if (!ideal) epsilons = get_or<std::vector<double>>(config, "epsilon", {0.1, 0.2, 0.3, 0.4});
  const double tol = opts.tolerance.value_or(ideal ? 1e-9 : 1e-6);

  struct Task {
    std::size_t n;
    double eps;
    json rows = json::array();
    bool ok = true;
  };
  std::vector<Task> tasks;
  for (auto n : ns) {
    for (double e : epsilons) tasks.push_back({n, e});
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(tasks.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      auto& task = tasks[i];
      try {
        const auto oracle = ideal ? make_ideal_ip_predictor(task.n) : make_biased_predictor(task.n, task.eps);
        const auto circuit = build_reconstructor(oracle);
        const double required = ideal ? 1.0 : 4.0 * task.eps * task.eps;
        for (std::uint64_t x = 0; x < (std::uint64_t{1} << task.n); ++x) {
          const double p = run_reconstruction(circuit, x, basis_side_info(task.n, x));
          const bool ok = p >= required - tol;
          task.ok = task.ok && ok;
          task.rows.push_back({{"oracle", oracle_kind},
                               {"n", task.n},
                               {"epsilon", ideal ? 0.5 : task.eps},
                               {"x", x},
                               {"success", p},
                               {"required", required},
                               {"ok", ok},
                               {"gate_count", circuit.gate_count},
                               {"qubits", circuit.total_qubits()}});
        }
      } catch (const std::exception& e) {
        errors[i] = e.what();
        task.ok = false;
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), static_cast<unsigned>(tasks.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (!e.empty()) throw Error(e);
  }

  // Ordered by the parameter tuple, independent of completion order.
  json rows = json::array();
  bool ok = true;
  for (const auto& t : tasks) {
    ok = ok && t.ok;
    for (const auto& r : t.rows) rows.push_back(r);
  }
  const int code = ok ? exit_ok : exit_violation;
  Result r;
  r.exit_code = code;
  if (opts.format == "json") {
    r.body = dump({{"rows", rows}, {"tolerance", tol}, {"exit_code", code}});
  } else {
    r.body = rows_csv({"oracle", "n", "epsilon", "x", "success", "required", "ok", "gate_count", "qubits"}, rows);
  }
  r.summary = std::string("reconstruct: ") + (ok ? "ok" : "violation");
  return r;
}

// ---------------------------------------------------------------- chain

Result cmd_chain(const json& config, const Options& opts) {
  const double tol = tolerance(opts);
  const std::string mode = get_or<std::string>(config, "mode", "chain-rule");
  const CqState state = decode_cq(config.at("state"));
  const double eps = number_or(config, "epsilon", 0.0);
  json report;
  int code = exit_ok;
  if (mode == "chain-rule") {
    const auto family = family_from_descriptor(get_or<std::string>(config, "family", "unbounded"), state.side_dim());
    const auto r = verify_chain_rule(state, eps, family);
    report = encode(r);
    if (r.slack < -tol || (r.interval_slack && *r.interval_slack < -tol)) code = exit_violation;
  } else if (mode == "degradation" || mode == "attack") {
    const auto chan = channel_from_json(config.at("channel"), state.alphabet_size(), state.side_dim());
    const auto validation = validate_leakage_channel(chan, state);
    report["validation"] = encode(validation);
    report["channel"] = chan.name;
    report["lambda"] = encode_number(chan.lambda);
    if (mode == "attack") {
      const auto after = apply_leakage_unchecked(chan, state);
      const double before_h = min_entropy(state);
      const double after_h = min_entropy(after);
      report["h_before"] = encode_number(before_h);
      report["h_after_unchecked"] = encode_number(after_h);
      report["slack_unchecked"] = encode_number(after_h - (before_h - 2.0 * chan.lambda));
      // The model only has to exclude channels that break the bound.
      if (validation.ok && after_h < before_h - 2.0 * chan.lambda - tol) code = exit_violation;
    } else if (!validation.ok) {
      code = exit_violation;
    } else {
      const auto family = family_from_descriptor(get_or<std::string>(config, "family", "unbounded"), state.side_dim());
      const auto r = measure_chain_degradation(state, chan, eps, family);
      report["degradation"] = encode(r);
      if (r.slack < -tol || (r.interval_slack && *r.interval_slack < -tol)) code = exit_violation;
    }
  } else {
    throw ConfigError("unknown chain mode '" + mode + "'");
  }
  report["mode"] = mode;
  report["seed"] = opts.seed;
  return finish(std::move(report), code, opts, "chain");
}

// ---------------------------------------------------------------- ocl-sim

Result cmd_ocl_sim(const json& config, const Options& opts) {
  const double tol = tolerance(opts);
  const ProtocolConfig pc = decode_protocol_config(config);
  const auto transcript = run_alternating(pc);
  json report = encode(transcript);

  bool violation = false, unmet = false;
  json checks = json::array();
  for (const auto& r : transcript.rounds) {
    const auto q = check_extraction_quality(transcript, r.round);
    const bool bounds_ok = r.h_a_after >= r.alt_bound_a - tol && r.h_b_after >= r.alt_bound_b - tol &&
                           r.h_a_after >= r.fresh_bound_a - tol && r.h_b_after >= r.fresh_bound_b - tol;
    const bool passive_ok = r.passive_change >= -tol;
    const bool markov_ok = r.cmi <= markov_tolerance;
    violation = violation || !bounds_ok || !passive_ok || !markov_ok || !q.holds;
    unmet = unmet || !q.hypothesis_met;
    checks.push_back({{"round", r.round},
                      {"entropy_bounds", bounds_ok},
                      {"passive_non_decreasing", passive_ok},
                      {"markov", markov_ok},
                      {"extraction", encode(q)}});
  }
  report["checks"] = std::move(checks);
  report["markov"] = encode(check_markov_preservation(transcript));
  std::size_t met = 0;
  while (met < transcript.rounds.size() && transcript.rounds[met].hypothesis_met) ++met;
  if (met > 0) {
    const auto c = cumulative_distance_bound(transcript, met);
    report["cumulative"] = encode(c);
    violation = violation || !c.holds;
  }
  report["seed"] = opts.seed;
  const int code = violation ? exit_violation : unmet ? exit_hypothesis_unmet : exit_ok;
  report["exit_code"] = code;

  Result r;
  r.exit_code = code;
  const std::string csv = transcript_csv(transcript);
  if (opts.format == "csv") {
    r.body = csv;
  } else {
    r.body = dump(report);
    r.companion = csv;
  }
  r.summary = std::string("ocl-sim: ") + (code == exit_ok ? "ok" : code == exit_hypothesis_unmet ? "hypothesis unmet" : "violation");
  return r;
}

// ---------------------------------------------------------------- dispatch

Result run(const Options& opts, const std::optional<json>& file_config) {
  try {
    json config = json::object();
    std::optional<std::string> preset = opts.preset;
    if (file_config) {
      if (!file_config->is_object()) throw ConfigError("config must be a JSON object");
      if (!preset && file_config->contains("preset") && opts.subcommand != "ocl-sim") {
        preset = file_config->at("preset").get<std::string>();
      }
    }
    if (preset) config = preset_config(opts.subcommand, *preset);
    if (file_config) {
      for (const auto& [k, v] : file_config->items()) {
        if (k != "preset" || opts.subcommand == "ocl-sim") config[k] = v;
      }
    }
    const auto& s = opts.subcommand;
    if (s == "entropy") return cmd_entropy(config, opts);
    if (s == "extract") return cmd_extract(config, opts);
    if (s == "design") return cmd_design(config, opts);
    if (s == "reconstruct") return cmd_reconstruct(config, opts);
    if (s == "chain") return cmd_chain(config, opts);
    if (s == "ocl-sim") return cmd_ocl_sim(config, opts);
    throw ConfigError("unknown subcommand '" + s + "'");
  } catch (const ConfigError& e) {
    return {exit_usage, {}, std::nullopt, std::string("malformed config: ") + e.what()};
  } catch (const json::exception& e) {
    return {exit_usage, {}, std::nullopt, std::string("malformed config: ") + e.what()};
  } catch (const HypothesisError& e) {
    return {exit_hypothesis_unmet, {}, std::nullopt, std::string("hypothesis unmet: ") + e.what()};
  } catch (const Error& e) {
    return {exit_violation, {}, std::nullopt, std::string("error: ") + e.what()};
  } catch (const std::exception& e) {
    return {exit_violation, {}, std::nullopt, std::string("internal error: ") + e.what()};
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"unplab: computational unpredictability entropy laboratory"};
  Options opts;
  std::string config_path, preset, out_path, seed_text;
  double tol = 0.0;
  app.add_option("subcommand", opts.subcommand, "entropy | extract | design | reconstruct | chain | ocl-sim")
      ->required()
      ->check(CLI::IsMember(subcommands()));
  auto* config_opt = app.add_option("--config", config_path, "JSON config file");
  auto* preset_opt = app.add_option("--preset", preset, "built-in configuration");
  app.add_option("--seed", opts.seed, "64-bit RNG seed");
  auto* out_opt = app.add_option("--out", out_path, "output path (stdout when omitted)");
  app.add_option("--format", opts.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  auto* tol_opt = app.add_option("--tolerance", tol, "slack tolerance override");
  bool list = false;
  app.add_flag("--list-presets", list, "print the presets of the subcommand");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_usage;
  }
  if (list) {
    for (const auto& p : preset_names(opts.subcommand)) out << p << '\n';
    return exit_ok;
  }
  if (*preset_opt) opts.preset = preset;
  if (*out_opt) opts.out = out_path;
  if (*tol_opt) opts.tolerance = tol;

  std::optional<json> file_config;
  if (*config_opt) {
    opts.config_path = config_path;
    std::ifstream in(config_path);
    if (!in) {
      err << "malformed config: cannot read " << config_path << '\n';
      return exit_usage;
    }
    try {
      file_config = json::parse(in);
    } catch (const json::exception& e) {
      err << "malformed config: " << e.what() << '\n';
      return exit_usage;
    }
  } else if (!opts.preset && opts.subcommand != "design") {
    err << "usage: unplab " << opts.subcommand << " needs --config or --preset\n" << app.help();
    return exit_usage;
  }

  const Result r = run(opts, file_config);
  if (!r.body.empty()) {
    if (opts.out) {
      std::ofstream f(*opts.out, std::ios::binary);
      f << r.body;
      if (r.companion) {
        std::ofstream c(*opts.out + ".csv", std::ios::binary);
        c << *r.companion;
      }
      if (!f) {
        err << "error: cannot write " << *opts.out << '\n';
        return exit_violation;
      }
    } else {
      out << r.body;
    }
  }
  err << r.summary << '\n';
  return r.exit_code;
}

}  // namespace unplab::cli
