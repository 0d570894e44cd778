#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "metriclab/cli.hpp"

using namespace metriclab;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / "metriclab_cli_tests";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string write(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json strip_time(nlohmann::json j) {
  j.erase("wall_ms");
  j["manifest"].erase("wall_ms");
  return j;
}

}  // namespace

TEST_CASE("gallery commands") {
  CHECK(run({"gallery", "run", "kamran123"}).code == kExitOk);
  const Run list = run({"gallery", "list"});
  CHECK(list.code == kExitOk);
  CHECK(list.out.find("lp_perturbed") != std::string::npos);
  CHECK(run({"gallery", "run", "nawab_nat_inf"}).code == kExitCheckFailed);
  CHECK(run({"gallery", "run", "nope"}).code == kExitUsage);
  const std::string out = (scratch() / "quartic.json").string();
  CHECK(run({"gallery", "run", "samreen_pow4", "--out", out}).code == kExitOk);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j["facts"].size() == 2);
  CHECK(j["manifest"]["outcome"] == "pass");
}

TEST_CASE("check-axioms reports a witness for D on the C([0,1]) space") {
  const std::string cfg = write("cab.json", R"J({"gallery": "cab_perturbed"})J");
  const std::string out = (scratch() / "cab_report.json").string();
  const Run r = run({"check-axioms", "--config", cfg, "--family", "extended_b", "--budget", "200", "--seed", "3",
                     "--out", out});
  CHECK(r.code == kExitCheckFailed);
  CHECK(r.err.find("repro: metriclab check-axioms") != std::string::npos);
  CHECK_FALSE(fs::exists(out + ".tmp"));
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j["family"] == "extended_b");
  CHECK(j["status"] == "fail");
  bool found = false;
  for (const auto& a : j["axioms"]) {
    if (a["name"] == "identity") {
      found = true;
      CHECK(a["status"] == "fail");
      CHECK(a["coverage"] == "statistical");
      CHECK(a["witness"].size() == 2);
      CHECK(a["witness"][0] == a["witness"][1]);
    }
  }
  CHECK(found);
  CHECK(j["manifest"]["seed"] == 3);
  CHECK(j["manifest"]["budget"] == 200);
  CHECK(j["manifest"]["config_hash"].get<std::string>().size() == 16);
  CHECK(j["manifest"]["tool_version"] == "0.3.0");

  CHECK(run({"check-axioms", "--config", cfg, "--family", "perturbed_extended_b", "--budget", "200"}).code ==
        kExitOk);
}

TEST_CASE("reports are byte-identical apart from wall time") {
  const std::string cfg = write("lp.json", R"J({"gallery": "lp_perturbed", "dim": 4})J");
  const Run a = run({"check-axioms", "--config", cfg, "--family", "perturbed_b", "--s", "4", "--budget", "3000",
                     "--workers", "1"});
  const Run b = run({"check-axioms", "--config", cfg, "--family", "perturbed_b", "--s", "4", "--budget", "3000",
                     "--workers", "1"});
  const Run c = run({"check-axioms", "--config", cfg, "--family", "perturbed_b", "--s", "4", "--budget", "3000",
                     "--workers", "4"});
  REQUIRE(a.code == kExitOk);
  CHECK(strip_time(nlohmann::json::parse(a.out)).dump() == strip_time(nlohmann::json::parse(b.out)).dump());
  auto ja = strip_time(nlohmann::json::parse(a.out)), jc = strip_time(nlohmann::json::parse(c.out));
  ja.erase("repro");
  jc.erase("repro");
  CHECK(ja == jc);
}

TEST_CASE("custom configs") {
  const std::string euclid = write("euclid.json", R"J({
    "carrier": {"kind": "integers", "from": 0, "to": 6},
    "D": "abs(x - y)"
  })J");
  CHECK(run({"check-axioms", "--config", euclid, "--family", "metric"}).code == kExitOk);
  const Run mc = run({"min-coefficient", "--config", euclid});
  CHECK(mc.code == kExitOk);
  CHECK(nlohmann::json::parse(mc.out)["s_star"] == 1.0);

  const std::string sq = write("sq.json", R"J({"carrier": {"kind": "integers", "from": 0, "to": 4}, "D": "(x-y)^2"})J");
  CHECK(run({"min-coefficient", "--config", sq, "--expect-max", "1.5"}).code == kExitCheckFailed);
  CHECK(run({"min-coefficient", "--config", sq, "--expect-max", "2"}).code == kExitOk);

  const std::string s = write("s.json", R"J({
    "carrier": {"kind": "finite", "points": [0, 1, 2, 3]},
    "mode": "s_mode",
    "D": "abs(x - z) + abs(y - z)"
  })J");
  CHECK(run({"check-axioms", "--config", s, "--family", "s_metric"}).code == kExitOk);
  CHECK(run({"check-axioms", "--config", s, "--family", "metric"}).code == kExitUsage);

  const std::string sampled = write("sampled.json", R"J({
    "carrier": {"kind": "sampled", "dim": 3, "lo": -1, "hi": [1, 2, 3]},
    "D": "max_i(abs(x[i] - y[i]))", "seed": 4
  })J");
  CHECK(run({"check-axioms", "--config", sampled, "--family", "metric", "--budget", "500"}).code == kExitOk);
}

TEST_CASE("failure paths map to exit codes") {
  const std::string cfg = write("k.json", R"J({"gallery": "kamran123"})J");
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"check-axioms", "--config", cfg}).code == kExitUsage);
  CHECK(run({"check-axioms", "--config", cfg, "--family", "hyper_metric"}).code == kExitUsage);
  CHECK(run({"check-axioms", "--config", cfg, "--family", "metric", "--budget", "many"}).code == kExitUsage);
  CHECK(run({"check-axioms", "--config", (scratch() / "missing.json").string(), "--family", "metric"}).code ==
        kExitUsage);
  CHECK(run({"check-axioms", "--config", write("bad.json", "{\"carrier\": "), "--family", "metric"}).code ==
        kExitUsage);
  CHECK(run({"check-axioms", "--config", write("arr.json", "[1, 2]"), "--family", "metric"}).code == kExitUsage);
  CHECK(run({"check-axioms", "--config", write("big.json", R"J({"carrier": {"kind": "integers", "from": 0,
    "to": 3}, "D": "abs(x - y)", "zeta": 1e999})J"),
             "--family", "metric"})
            .code == kExitUsage);
  // three-point zeta without the flag
  CHECK(run({"check-axioms", "--config", write("z3.json", R"J({"carrier": {"kind": "integers", "from": 0,
    "to": 3}, "D": "abs(x - y)", "zeta": "1 + z"})J"),
             "--family", "extended_b"})
            .code == kExitUsage);
  const Run parse_err = run({"check-axioms", "--config", write("pe.json", R"J({"carrier": {"kind": "integers",
    "from": 0, "to": 3}, "D": "abs(x - y"})J"),
                             "--family", "metric"});
  CHECK(parse_err.code == kExitUsage);
  CHECK(parse_err.err.find("offset 9") != std::string::npos);

  const Run eval = run({"check-axioms", "--config", write("div.json", R"J({"carrier": {"kind": "integers",
    "from": 0, "to": 3}, "D": "1 / (x - y)"})J"),
                        "--family", "metric"});
  CHECK(eval.code == kExitEvaluation);
  CHECK(eval.err.find("(0, 0)") != std::string::npos);
  CHECK(eval.err.find("repro: metriclab check-axioms") != std::string::npos);

  CHECK(run({"--help"}).code == kExitOk);
  CHECK(run({"--version"}).out == "0.3.0\n");
}

TEST_CASE("parse command") {
  const std::string good = write("good.txt", "# comment\n1 + 2 * 3\n\nabs(x - y)^3 if x != y else 1\n");
  const Run g = run({"parse", good});
  CHECK(g.code == kExitOk);
  CHECK(g.out == "(1 + (2 * 3))\n((abs((x - y)) ^ 3) if x != y else 1)\n");

  const std::string bad = write("bad.txt", "1 + 2\n(1 + 2\n");
  const Run b = run({"parse", bad});
  CHECK(b.code == kExitUsage);
  CHECK(b.out == "(1 + 2)\n");
  CHECK(b.err.find("bad.txt:2:6:") != std::string::npos);

  CHECK(run({"parse", write("ar.txt", "z\n")}).code == kExitUsage);
  CHECK(run({"parse", write("ar3.txt", "z\n"), "--arity", "3"}).code == kExitOk);
  CHECK(run({"parse", (scratch() / "nothing.txt").string()}).code == kExitUsage);
}

TEST_CASE("picard command") {
  const std::string cfg = write("lp4.json", R"J({"gallery": "lp_perturbed", "dim": 4})J");
  const std::string out = (scratch() / "trace.json").string(), csv = (scratch() / "trace.csv").string();
  const Run r = run({"picard", "--config", cfg, "--map", "x[i] / 32", "--v0", "[1, 1, 1, 1]", "--out", out,
                     "--csv", csv});
  CHECK(r.code == kExitOk);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j["stop_reason"] == "converged");
  CHECK(j["hypothesis"]["satisfied"] == true);
  CHECK(j["envelope"]["geometric"].size() == j["steps_D"].size());
  CHECK(j["envelope"]["daleth"].size() == j["iterates"].size());
  CHECK(j["chained_bound"]["status"] == "pass");
  CHECK(j["series_bound_literal"]["status"] == "fail");
  CHECK(j["fixed_point"]["is_fixed"] == true);
  const std::string rows = slurp(csv);
  CHECK(rows.rfind("n,step_D,step_d,geometric_n,daleth_n\n", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(rows.begin(), rows.end(), '\n')) == j["steps_D"].size() + 1);

  const Run div = run({"picard", "--config", cfg, "--map", "x[i] + 1", "--v0", "[0, 0, 0, 0]"});
  CHECK(div.code == kExitCheckFailed);
  CHECK(nlohmann::json::parse(div.out)["stop_reason"] == "diverged");

  const std::string sam = write("sam.json", R"J({"gallery": "samreen_pow4"})J");
  const Run one = run({"picard", "--config", sam, "--map", "1", "--v0", "5"});
  CHECK(one.code == kExitOk);
  CHECK(nlohmann::json::parse(one.out)["iterates"].back() == 1.0);

  CHECK(run({"picard", "--config", cfg, "--map", "x[i] / 32", "--v0", "[1, 1]"}).code == kExitUsage);
  CHECK(run({"picard", "--config", cfg, "--map", "x[i] / 32", "--v0", "[1, 1"}).code == kExitUsage);
  CHECK(run({"picard", "--config", cfg, "--map", "x[i] / ", "--v0", "[1, 1, 1, 1]"}).code == kExitUsage);
  CHECK(run({"picard", "--config", cfg, "--map", "x[i]", "--v0", "[1, 1, 1, 1]", "--c", "2"}).code == kExitUsage);
  const Run ev = run({"picard", "--config", cfg, "--map", "1 / (x[i] - 1)", "--v0", "[2, 2, 2, 2]"});
  CHECK(ev.code == kExitEvaluation);
  CHECK(nlohmann::json::parse(ev.out)["stop_reason"] == "evaluation_error");
}
