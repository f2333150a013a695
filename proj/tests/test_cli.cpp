#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "aztec/experiments.hpp"
#include "aztec/finite.hpp"
#include "aztec/sampler.hpp"

using namespace aztec;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  fs::path d = fs::temp_directory_path() / "aztec_cli_tests";
  fs::create_directories(d);
  return d;
}

std::size_t count(const std::string& s, const std::string& pat) {
  std::size_t c = 0;
  for (auto p = s.find(pat); p != std::string::npos; p = s.find(pat, p + 1)) ++c;
  return c;
}

}  // namespace

TEST_CASE("config loading and overrides") {
  const fs::path p = scratch_dir() / "cfg.json";
  std::ofstream(p) << R"({"n": 5, "R": 1.5, "mode": "joint_cdf"})";
  json c = load_config(p.string(), {"n=7", "mode=stay_below", "levels=[1,2]"});
  CHECK(c["n"] == 7);
  CHECK(c["R"] == 1.5);
  CHECK(c["mode"] == "stay_below");
  CHECK(c["levels"] == json::array({1, 2}));
  CHECK_THROWS_AS(load_config((scratch_dir() / "missing.json").string()), ConfigError);
  CHECK_THROWS_AS(load_config("", {"novalue"}), ConfigError);
  std::ofstream(scratch_dir() / "bad.json") << "{ not json";
  CHECK_THROWS_AS(load_config((scratch_dir() / "bad.json").string()), ConfigError);
}

TEST_CASE("barrier specs from JSON") {
  BarrierSpec g = barrier_from_json({{"kind", "parabola_with_point"}, {"R", 1}, {"u", 0}, {"t0", 0}, {"L", -1}, {"M", 1}});
  CHECK(g.pinned);
  CHECK(g.value(0) == doctest::Approx(0.0));
  BarrierSpec tl = barrier_from_json(
      {{"kind", "tilted_linear"}, {"pieces", {{{"a", -1}, {"b", 0}, {"h0", 0.2}, {"h1", 1.0}}}}});
  CHECK(tl.value(-0.5) == doctest::Approx(0.25 + 0.6));
  CHECK_THROWS_AS(barrier_from_json({{"kind", "zigzag"}}), ConfigError);
  CHECK_THROWS_AS(barrier_from_json({{"kind", "parabola"}, {"R", 1}}), ConfigError);
  CHECK_THROWS_AS(barrier_from_json({{"kind", "parabola"}, {"R", "x"}, {"L", 0}, {"M", 1}}), ConfigError);
}

TEST_CASE("tiling JSON round trip and SVG") {
  RngStream r(4, 0);
  Tiling t = sample_uniform(6, r);
  json j = tiling_to_json(t);
  CHECK(j["dominoes"].size() == t.dominoes.size());
  CHECK(tiling_key(tiling_from_json(j)) == tiling_key(t));
  j["dominoes"].erase(0);
  CHECK_THROWS_AS(tiling_from_json(j), ConfigError);

  Tiling one = enumerate_tilings(1).front();
  std::string svg = render_svg(one);
  CHECK(count(svg, "class=\"domino ") == 2);
  CHECK(svg.find("rotate(-45)") != std::string::npos);
  RenderOptions debug;
  debug.rotate45 = false;
  debug.R = 1;
  std::string s2 = render_svg(t, debug);
  CHECK(s2.find("rotate(-45)") == std::string::npos);
  CHECK(count(s2, "class=\"cut\"") == 1);
}

TEST_CASE("sample command writes distinct streams") {
  const fs::path out = scratch_dir() / "s.jsonl", svg = scratch_dir() / "s.svg";
  json rep = cmd_sample({{"n", 8}, {"replicas", 40}, {"seed", 9}, {"out", out.string()}, {"svg", svg.string()}});
  CHECK(rep["ok"] == true);
  CHECK(rep["records"] == 40);
  CHECK(rep["config"]["seed"] == 9);
  std::ifstream f(out);
  std::string line;
  std::set<long> streams;
  long lines = 0;
  while (std::getline(f, line)) {
    json rec = json::parse(line);
    streams.insert(rec["stream"].get<long>());
    CHECK(rec["seed"] == 9);
    ++lines;
  }
  CHECK(lines == 40);
  CHECK(streams.size() == 40);
  CHECK(fs::exists(svg));

  // Same seed, same records.
  const fs::path out2 = scratch_dir() / "s2.jsonl";
  cmd_sample({{"n", 8}, {"replicas", 40}, {"seed", 9}, {"out", out2.string()}});
  std::ifstream a(out), b(out2);
  std::string la, lb;
  while (std::getline(a, la) && std::getline(b, lb)) CHECK(la == lb);

  json rend = cmd_render({{"input", out.string()}, {"index", 3}, {"out", (scratch_dir() / "r.svg").string()}});
  CHECK(rend["ok"] == true);
  CHECK(rend["dominoes"] == 72);
  CHECK_THROWS_AS(cmd_sample({{"replicas", 2}}), ConfigError);
}

TEST_CASE("dist and tacnode commands") {
  json d = cmd_dist({{"n", 4}, {"mode", "joint_cdf"}, {"times", {2, 4, 6}}, {"levels", {1, 1, 0}}});
  CHECK(d["result"]["value"].get<double>() == doctest::Approx(3.0 / 32));
  CHECK(d["result"]["route"] == "fredholm");
  const fs::path csv = scratch_dir() / "scan.csv";
  json s = cmd_dist({{"n", 4}, {"mode", "joint_cdf"}, {"times", {4}}, {"levels", {0}},
                     {"scan", {{"key", "levels"}, {"from", -1}, {"to", 3}, {"step", 1}}}, {"csv", csv.string()}});
  const auto table = s["table"].get<std::vector<std::pair<double, double>>>();
  REQUIRE(table.size() == 5);
  for (std::size_t i = 1; i < table.size(); ++i) CHECK(table[i].second >= table[i - 1].second - 1e-12);
  CHECK(table.back().second == doctest::Approx(1.0));
  CHECK(fs::exists(csv));
  CHECK_THROWS_AS(cmd_dist({{"n", 4}, {"mode", "bogus"}}), ConfigError);
  CHECK_THROWS_AS(cmd_dist({{"n", 4}, {"times", {3}}, {"levels", {0}}}), ConfigError);

  json t = cmd_tacnode({{"quantity", "gue"}, {"s", 0}});
  CHECK(t["result"]["value"].get<double>() == doctest::Approx(0.969372828355263).epsilon(1e-12));
  for (const char* k : {"value", "error_estimate", "nodes", "X_max", "slices", "params", "route"})
    CHECK(t["result"].contains(k));
  json f = cmd_tacnode({{"quantity", "tacnode_findim"}, {"R", 1}, {"times", {0}}, {"levels", {0}}});
  CHECK(f["result"]["value"].get<double>() == doctest::Approx(0.981644652568).epsilon(1e-11));
  CHECK_THROWS_AS(cmd_tacnode({{"quantity", "tacnode_findim"}, {"R", 1}, {"times", {0}}, {"levels", {2}}}),
                  ConfigError);
}

TEST_CASE("convergence report") {
  json rep = cmd_convergence({{"ns", {20, 30}}, {"R", 1}, {"levels", {-1.0}}, {"samples", 300},
                              {"mc_ns", {20}}, {"seed", 3}});
  const json& lv = rep["levels"][0];
  CHECK(lv["rows"].size() == 2);
  CHECK(lv["rows"][0].contains("mc"));
  CHECK(lv["rows"][0]["mc_vs_finite"].contains("pass"));
  CHECK(lv["trend"].contains("monotone"));
  CHECK(lv["target"]["route"] == "tacnode-findim");
  json partial = cmd_convergence({{"ns", {20, 30}}, {"R", 1}, {"levels", {0}}, {"budget_seconds", 0}});
  CHECK(partial["partial"] == true);
  CHECK(partial["ok"] == false);
}

TEST_CASE("selftest honours tolerance overrides and detects corruption") {
  json ok = cmd_selftest({{"quick", true}});
  CHECK(ok["ok"] == true);
  json strict = cmd_selftest({{"quick", true}, {"tolerances", {{"walk.moments", -1.0}}}});
  CHECK(strict["ok"] == false);
  json bad = cmd_selftest({{"quick", true}, {"corrupt_q", {{"n", 5}, {"s", 2}, {"y", 1}}}});
  CHECK(bad["ok"] == false);
  bool shift_failed = false;
  for (const auto& c : bad["checks"])
    if (c["name"] == "finite.shift_identity") shift_failed = !c["pass"].get<bool>();
  CHECK(shift_failed);
  krawtchouk_mutable(5).corrupt_q(2, 1, -1e-6L);
}
