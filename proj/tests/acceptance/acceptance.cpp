// Acceptance checks 1 to 15. Prints one line per criterion:
//   criterion <N> PASS|FAIL: <summary> (<details>)
// Usage: unplab_acceptance [--criterion N] [--work-dir DIR]

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "unplab/entropy.hpp"
#include "unplab/extractors.hpp"
#include "unplab/guessing.hpp"
#include "unplab/leakage.hpp"
#include "unplab/metrics.hpp"
#include "unplab/protocols.hpp"
#include "unplab/random.hpp"
#include "unplab/reconstruct.hpp"
#include "unplab_cli.hpp"

using namespace unplab;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string summary;
  std::function<Outcome()> run;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

CqState uniform_with_side(std::size_t bits, const DensityOperator& side) {
  const std::size_t count = std::size_t{1} << bits;
  return CqState(std::vector<double>(count, 1.0 / double(count)), std::vector<DensityOperator>(count, side), bits);
}

json run_preset(const std::string& sub, const std::string& preset, int* code = nullptr) {
  cli::Options o;
  o.subcommand = sub;
  o.preset = preset;
  const auto r = cli::run(o, std::nullopt);
  if (code) *code = r.exit_code;
  if (r.body.empty()) throw Error(sub + " " + preset + ": " + r.summary);
  return json::parse(r.body);
}

Outcome c1_helstrom() {
  const double d = trace_distance(maximally_mixed(2), basis_state({2}, 0));
  return {std::abs(d - 0.5) <= 1e-10, "d = " + fmt(d)};
}

Outcome c2_pinching() {
  Rng rng(2002);
  double worst = 0.0;
  int failures = 0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t da = 1 + i % 4, db = 1 + (i / 4) % 4;
    const auto rho = random_density(rng, {da, db}, 1 + (i / 16) % (da * db));
    const auto rho_a = partial_trace(rho, {0});
    const Matrix rhs = double(db * db) * tensor(rho_a, maximally_mixed(db)).matrix();
    const auto check = operator_leq(rho.matrix(), rhs, 1e-9);
    worst = std::min(worst, check.min_eigenvalue);
    if (!check.holds || check.min_eigenvalue < -1e-9) ++failures;
  }
  return {failures == 0, "200 states, min eigenvalue " + fmt(worst)};
}

Outcome c3_chain_tightness() {
  const auto sd = run_preset("chain", "superdense");
  const auto cl = run_preset("chain", "classical-leak");
  const double h_xb = sd.at("h_xb"), h_xbc = sd.at("h_xbc"), slack = sd.at("slack");
  const double cl_slack = cl.at("slack");
  const bool ok = std::abs(h_xb - 2.0) <= 1e-6 && std::abs(h_xbc) <= 1e-6 && std::abs(slack) <= 1e-7 &&
                  cl_slack >= 1.0 - 1e-7;
  char buf[160];
  std::snprintf(buf, sizeof buf, "superdense H(X|B)=%.6f H(X|BC)=%.6f slack=%.2g; classical slack=%.6f", h_xb,
                std::abs(h_xbc), slack, cl_slack);
  return {ok, buf};
}

Outcome c4_chain_soundness() {
  Rng rng(4004);
  int violations = 0;
  double worst = 1e9;
  for (int i = 0; i < 100; ++i) {
    const std::size_t alphabet = 2 + i % 4, db = 1 + (i / 4) % 3;
    const auto cq = random_cq(rng, alphabet, {db, 2});
    const auto r = verify_chain_rule(cq, 0.0, AdversaryFamily::unbounded());
    worst = std::min(worst, r.slack);
    if (r.slack < -1e-7) ++violations;
  }
  return {violations == 0, "100 states, min slack " + fmt(worst) + ", violations " + std::to_string(violations)};
}

Outcome c5_cnot_attack() {
  int code = 0;
  const auto j = run_preset("chain", "cnot-attack", &code);
  const double before = j.at("h_before"), after = j.at("h_after_unchecked");
  const std::string clause = j.at("validation").at("failed_clause");
  const bool ok = std::abs(before - 6.0) <= 1e-9 && after <= 1e-7 && clause == "marginal invariance";
  return {ok, "H before " + fmt(before) + ", after " + fmt(after) + ", rejected on '" + clause + "'"};
}

Outcome c6_design() {
  const auto w = build_weak_design(4, 8);
  const auto check = verify_weak_design(w);
  return {w.d == 120 && check.ok,
          "d = " + std::to_string(w.d) + ", worst sum " + fmt(check.worst_sum) + " <= " + fmt(check.bound)};
}

Outcome c7_reconstruct_exact() {
  double worst = 0.0;
  int count = 0;
  for (std::size_t n = 2; n <= 6; ++n) {
    const auto c = build_reconstructor(make_ideal_ip_predictor(n));
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x, ++count) {
      worst = std::max(worst, std::abs(run_reconstruction(c, x, basis_side_info(n, x)) - 1.0));
    }
  }
  return {worst <= 1e-9, std::to_string(count) + " runs, max |p - 1| = " + fmt(worst)};
}

Outcome c8_reconstruct_approx() {
  double worst = 1e9;
  int count = 0;
  for (std::size_t n : {3u, 4u, 5u}) {
    for (double eps : {0.1, 0.2, 0.3, 0.4}) {
      const auto c = build_reconstructor(make_biased_predictor(n, eps));
      for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x, ++count) {
        worst = std::min(worst, run_reconstruction(c, x, basis_side_info(n, x)) - 4.0 * eps * eps);
      }
    }
  }
  return {worst >= -1e-6, std::to_string(count) + " runs, min (p - 4 eps^2) = " + fmt(worst)};
}

Outcome c9_ip_extractor() {
  Rng rng(9009);
  int accepted = 0, drawn = 0, violations = 0;
  double worst = 0.0;
  while (accepted < 50 && drawn < 1000) {
    ++drawn;
    const std::size_t n = 5 + drawn % 4;
    const auto cq = random_noisy_source(rng, n, 2, 0.3, 0.15);
    const auto r = ip_extractor_test(cq, 0.25);
    if (!r.hypothesis_met) continue;
    ++accepted;
    worst = std::max(worst, r.distance);
    if (r.distance > 0.25 + 1e-9) ++violations;
  }
  return {accepted == 50 && violations == 0,
          std::to_string(accepted) + " sources (" + std::to_string(drawn) + " drawn), max distance " + fmt(worst)};
}

Outcome c10_distinguish_predict() {
  Rng rng(10010);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto cq = random_cq(rng, 2, {2 + std::size_t(i % 3)});
    const auto r = distinguish_equals_predict(cq, AdversaryFamily::unbounded());
    const double d = oracle::trace_distance(cq.weighted(0), cq.weighted(1));
    worst = std::max({worst, std::abs(r.predictor_success - (0.5 + d)), std::abs(r.interval.upper - d)});
  }
  return {worst <= 1e-10, "100 states, max deviation " + fmt(worst)};
}

Outcome c11_hybrid() {
  Rng rng(11011);
  int instances = 0, failures = 0;
  double worst = 1e9;
  for (int i = 0; i < 60; ++i) {
    const std::size_t m = 1 + i % 4;
    const auto cq = random_cq(rng, std::size_t{1} << m, {2});
    const auto r = hybrid_locate_bit(cq, 0.0);
    if (!r) continue;
    ++instances;
    const double margin = r->gap - r->total_distance / double(m);
    worst = std::min(worst, margin);
    if (margin < -1e-9) ++failures;
  }
  return {instances > 0 && failures == 0,
          std::to_string(instances) + " instances, min (gap - D/m) = " + fmt(worst)};
}

Outcome c12_alternating() {
  const auto t = run_alternating(protocol_preset("alternating-4round"));
  bool ok = t.rounds.size() == 4;
  double slack = 1e9, cmi = 0.0, margin = 1e9;
  for (const auto& r : t.rounds) {
    const double s = (r.active == Source::A ? r.h_a_after - r.alt_bound_a : r.h_b_after - r.alt_bound_b);
    slack = std::min(slack, s);
    cmi = std::max(cmi, r.cmi);
    if (!r.hypothesis_met) ok = false;
  }
  for (std::size_t i = 1; i <= t.rounds.size() && ok; ++i) {
    const auto c = cumulative_distance_bound(t, i);
    margin = std::min(margin, c.bound - c.measured);
  }
  ok = ok && slack >= -1e-7 && cmi <= 1e-8 && margin >= -1e-7 && check_markov_preservation(t).ok;
  return {ok, "min entropy slack " + fmt(slack) + ", max CMI " + fmt(cmi) + ", min cumulative margin " + fmt(margin)};
}

Outcome c13_fresh() {
  const auto t = run_alternating(protocol_preset("fresh-3round"));
  bool ok = t.rounds.size() == 3;
  double slack = 1e9, passive = 1e9;
  for (const auto& r : t.rounds) {
    slack = std::min({slack, r.h_a_after - r.fresh_bound_a, r.h_b_after - r.fresh_bound_b});
    passive = std::min(passive, r.passive_change);
    const double ka = t.k - double(r.delta_a) * 2.0 * t.lambda, kb = t.k - double(r.delta_b) * 2.0 * t.lambda;
    if (std::abs(ka - r.fresh_bound_a) > 1e-12 || std::abs(kb - r.fresh_bound_b) > 1e-12) ok = false;
  }
  ok = ok && slack >= -1e-7 && passive >= -1e-7;
  return {ok, "min bound slack " + fmt(slack) + ", min passive change " + fmt(passive)};
}

// Runs every determinism-relevant CLI preset twice into files and compares bytes.
Outcome c15_determinism(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  int compared = 0, mismatches = 0;
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };
  for (const auto& sub : cli::subcommands()) {
    for (const auto& preset : cli::preset_names(sub)) {
      for (const std::string format : {"json", "csv"}) {
        std::string files[2];
        for (int k = 0; k < 2; ++k) {
          const auto path = dir / (sub + "_" + preset + "_" + std::to_string(k) + "." + format);
          std::vector<std::string> args = {"unplab", sub, "--preset", preset, "--seed", "7",
                                           "--format", format, "--out", path.string()};
          std::vector<const char*> argv;
          for (const auto& a : args) argv.push_back(a.c_str());
          std::ostringstream out, err;
          cli::main_entry(int(argv.size()), argv.data(), out, err);
          files[k] = slurp(path);
          if (std::filesystem::exists(path.string() + ".csv")) files[k] += slurp(path.string() + ".csv");
        }
        ++compared;
        if (files[0] != files[1] || files[0].empty()) ++mismatches;
      }
    }
  }
  return {mismatches == 0, std::to_string(compared) + " command pairs, mismatches " + std::to_string(mismatches)};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  std::filesystem::path work = std::filesystem::temp_directory_path() / "unplab_acceptance";
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else if (a == "--work-dir" && i + 1 < argc) {
      work = argv[++i];
    } else {
      std::cerr << "usage: unplab_acceptance [--criterion N] [--work-dir DIR]\n";
      return 64;
    }
  }

  const std::vector<Criterion> solver_runs = {
      {1, "trace distance of I/2 and a pure qubit is 1/2", c1_helstrom},
      {2, "pinching inequality on 200 random states", c2_pinching},
      {3, "chain rule tight on superdense, slack 1 on a classical leak", c3_chain_tightness},
      {4, "chain rule holds on 100 random cqq states", c4_chain_soundness},
      {5, "CNOT copy drives H_min to 0 and fails invariance", c5_cnot_attack},
      {6, "weak design (4, 8) has d = 120 and verifies", c6_design},
      {7, "ideal predictor reconstructs every x", c7_reconstruct_exact},
      {8, "biased predictor reconstructs with probability >= 4 eps^2", c8_reconstruct_approx},
      {9, "inner-product extractor within eps_ext on 50 sources", c9_ip_extractor},
      {10, "unbounded distinguishing equals predicting", c10_distinguish_predict},
      {11, "hybrid argument finds a bit with gap >= D/m", c11_hybrid},
      {12, "alternating extraction, 4 rounds", c12_alternating},
      {13, "fresh-seed extraction, 3 rounds", c13_fresh},
  };

  bool all = true;
  auto report = [&](int id, const std::string& summary, const Outcome& o) {
    all = all && o.pass;
    std::cout << "criterion " << id << (o.pass ? " PASS: " : " FAIL: ") << summary << " (" << o.detail << ")\n"
              << std::flush;
  };
  auto guarded = [](const std::function<Outcome()>& f) {
    try {
      return f();
    } catch (const std::exception& e) {
      return Outcome{false, std::string("exception: ") + e.what()};
    }
  };

  // Every certificate produced by criteria 1 to 13 is audited for criterion 14.
  auto audit = std::make_unique<CertificateAudit>();
  for (const auto& c : solver_runs) {
    if (only == 0 || only == c.id) {
      report(c.id, c.summary, guarded(c.run));
    } else if (only == 14) {
      (void)guarded(c.run);
    }
  }
  if (only == 0 || only == 14) {
    const auto entries = audit->entries();
    double worst_gap = 0.0, worst_dual = 0.0;
    for (const auto& e : entries) {
      worst_gap = std::max(worst_gap, e.gap);
      worst_dual = std::min(worst_dual, e.min_dual_eigenvalue);
    }
    const bool ok = !entries.empty() && worst_gap <= 1e-7 && worst_dual >= -1e-8;
    report(14, "solver certificates are tight and dual feasible",
           {ok, std::to_string(entries.size()) + " certificates, max gap " + fmt(worst_gap) + ", min dual eigenvalue " +
                    fmt(worst_dual)});
  }
  audit.reset();
  if (only == 0 || only == 15) {
    report(15, "CLI outputs are byte-identical across runs", guarded([&] { return c15_determinism(work); }));
  }
  return all ? 0 : 1;
}
