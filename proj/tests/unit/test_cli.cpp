#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "unplab_cli.hpp"

using namespace unplab;
using namespace unplab::cli;

namespace {

Options preset_opts(std::string sub, std::string preset, std::string format = "json") {
  Options o;
  o.subcommand = std::move(sub);
  o.preset = std::move(preset);
  o.format = std::move(format);
  return o;
}

int invoke(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "unplab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = main_entry(int(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("unplab_cli_test_" + name);
}

}  // namespace

TEST_CASE("every preset of every subcommand runs with a documented exit code") {
  for (const auto& sub : subcommands()) {
    for (const auto& p : preset_names(sub)) {
      CAPTURE(sub);
      CAPTURE(p);
      const auto r = run(preset_opts(sub, p), std::nullopt);
      const bool documented = r.exit_code == exit_ok || r.exit_code == exit_hypothesis_unmet;
      CHECK(documented);
      CHECK_FALSE(r.body.empty());
    }
  }
}

TEST_CASE("chain superdense preset reports zero slack") {
  const auto r = run(preset_opts("chain", "superdense"), std::nullopt);
  REQUIRE(r.exit_code == exit_ok);
  const auto j = json::parse(r.body);
  CHECK(std::abs(j.at("slack").get<double>()) < 1e-7);
  CHECK(j.at("h_xb").get<double>() == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("design preset gives d = 120") {
  const auto r = run(preset_opts("design", "t4-m8"), std::nullopt);
  REQUIRE(r.exit_code == exit_ok);
  const auto j = json::parse(r.body);
  CHECK(j.at("design").at("d").get<std::size_t>() == 120);
  CHECK(j.at("check").at("ok").get<bool>());
}

TEST_CASE("attack preset: validation rejects the CNOT copy") {
  const auto r = run(preset_opts("chain", "cnot-attack"), std::nullopt);
  CHECK(r.exit_code == exit_ok);
  const auto j = json::parse(r.body);
  CHECK(j.at("validation").at("failed_clause").get<std::string>() == "marginal invariance");
  CHECK(j.at("h_after_unchecked").get<double>() <= 1e-7);
}

TEST_CASE("unmet hypothesis maps to exit 2") {
  Options o = preset_opts("extract", "ip-uniform");
  const json cfg = {{"eps_ext", 0.01}};
  const auto r = run(o, std::optional<json>(cfg));
  CHECK(r.exit_code == exit_hypothesis_unmet);
  CHECK(json::parse(r.body).at("hypothesis_met") == false);
}

TEST_CASE("violations map to exit 1") {
  // An invalid channel in degradation mode counts as a violation.
  Options o;
  o.subcommand = "chain";
  const json cfg = json::parse(R"({"mode": "degradation",
    "state": {"probs": [0.5, 0.5], "conditionals": [
      {"dims": [2], "re": [[1, 0], [0, 0]], "im": [[0, 0], [0, 0]]},
      {"dims": [2], "re": [[1, 0], [0, 0]], "im": [[0, 0], [0, 0]]}]},
    "channel": {"kind": "xor-into-e", "bit": 0, "target": 0}})");
  const auto r = run(o, std::optional<json>(cfg));
  CHECK(r.exit_code == exit_violation);
}

TEST_CASE("malformed configs map to exit 64") {
  Options o;
  o.subcommand = "entropy";
  CHECK(run(o, std::optional<json>(json::array())).exit_code == exit_usage);
  CHECK(run(o, std::optional<json>(json{{"state", {{"probs", "nope"}}}})).exit_code == exit_usage);
  CHECK(run(o, std::optional<json>(json::object())).exit_code == exit_usage);
  CHECK(run(o, std::optional<json>(json{{"state", {{"probs", {0.5, 0.5}}, {"conditionals", "oops"}}}})).exit_code ==
        exit_usage);
  CHECK(run(o, std::optional<json>(json{{"state", {{"probs", {{"1x", 1.0}}}, {"conditionals", json::object()}}}}))
            .exit_code == exit_usage);
  o.subcommand = "ocl-sim";
  CHECK(run(o, std::optional<json>(json{{"preset", "alternating-2round"}, {"rounds", -3}})).exit_code == exit_usage);
  CHECK(run(preset_opts("design", "nope"), std::nullopt).exit_code == exit_usage);

  CHECK(invoke({"teleport"}) == exit_usage);
  CHECK(invoke({"entropy"}) == exit_usage);
  CHECK(invoke({"entropy", "--config", temp_path("missing.json").string()}) == exit_usage);
  const auto bad = temp_path("bad.json");
  std::ofstream(bad) << "{ not json";
  CHECK(invoke({"entropy", "--config", bad.string()}) == exit_usage);
  CHECK(invoke({"entropy", "--preset", "helstrom", "--format", "xml"}) == exit_usage);
  std::filesystem::remove(bad);
}

TEST_CASE("config file overrides preset values") {
  const auto cfg = temp_path("override.json");
  std::ofstream(cfg) << R"({"preset": "t4-m8", "t": 3, "m": 2})";
  std::string out;
  CHECK(invoke({"design", "--config", cfg.string()}, &out) == exit_ok);
  const auto j = json::parse(out);
  CHECK(j.at("design").at("t").get<std::size_t>() == 3);
  CHECK(j.at("expected_d").get<std::size_t>() == 3 * 5 * 3);
  std::filesystem::remove(cfg);
}

TEST_CASE("output files are byte-identical across runs") {
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"entropy", "helstrom"}, {"extract", "ip-random"}, {"design", "t4-m8"},
      {"reconstruct", "approximate"}, {"chain", "superdense"}, {"ocl-sim", "alternating-2round"}};
  for (const auto& [sub, preset] : cases) {
    for (const std::string format : {"json", "csv"}) {
      const auto a = temp_path(sub + "_a." + format), b = temp_path(sub + "_b." + format);
      const int ca = invoke({sub, "--preset", preset, "--seed", "42", "--format", format, "--out", a.string()});
      const int cb = invoke({sub, "--preset", preset, "--seed", "42", "--format", format, "--out", b.string()});
      CHECK(ca == cb);
      CHECK(read_file(a) == read_file(b));
      CHECK_FALSE(read_file(a).empty());
      std::filesystem::remove(a);
      std::filesystem::remove(b);
      std::filesystem::remove(a.string() + ".csv");
      std::filesystem::remove(b.string() + ".csv");
    }
  }
}

TEST_CASE("seed changes random inputs") {
  Options o = preset_opts("extract", "ip-random");
  o.seed = 1;
  const auto r1 = run(o, std::nullopt);
  o.seed = 2;
  const auto r2 = run(o, std::nullopt);
  CHECK(r1.body != r2.body);
}

TEST_CASE("ocl-sim writes a CSV companion next to the JSON transcript") {
  const auto out = temp_path("ocl.json");
  CHECK(invoke({"ocl-sim", "--preset", "alternating-4round", "--out", out.string()}) == exit_ok);
  const auto csv = read_file(out.string() + ".csv");
  CHECK(csv.rfind("round,", 0) == 0);
  const auto j = json::parse(read_file(out));
  CHECK(j.at("rounds").size() == 4);
  CHECK(j.at("cumulative").at("holds").get<bool>());
  std::filesystem::remove(out);
  std::filesystem::remove(out.string() + ".csv");
}

TEST_CASE("reconstruct CSV rows are ordered by parameters") {
  const auto r = run(preset_opts("reconstruct", "approximate", "csv"), std::nullopt);
  REQUIRE(r.exit_code == exit_ok);
  std::istringstream in(r.body);
  std::string line;
  std::getline(in, line);
  CHECK(line == "oracle,n,epsilon,x,success,required,ok,gate_count,qubits");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == (8 + 16 + 32) * 4);
}

TEST_CASE("tolerance flag is honored") {
  Options o = preset_opts("reconstruct", "exact");
  o.tolerance = 1e-3;
  const auto j = json::parse(run(o, std::nullopt).body);
  CHECK(j.at("tolerance").get<double>() == 1e-3);
}
