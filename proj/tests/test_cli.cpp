#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

using namespace fraclab::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("fraclab_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

int cli(std::vector<std::string> args, std::string* out = nullptr, std::string* err = nullptr) {
  args.insert(args.begin(), "fraclab");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream o, e;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return code;
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> r;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) r.push_back(cell);
    rows.push_back(r);
  }
  return rows;
}

int manifests(const fs::path& dir) {
  int n = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.path().filename() == "manifest.json") ++n;
  return n;
}

}  // namespace

TEST_CASE("sha256") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("verify") {
  std::string out;
  CHECK(cli({"verify", "--suite", "constants"}, &out) == exit_ok);
  auto rows = csv(out);
  REQUIRE(rows.size() > 1);
  CHECK(rows[0] == std::vector<std::string>{"name", "computed", "expected", "abs_err", "pass"});
  bool found = false;
  for (const auto& r : rows)
    if (r[0] == "C[n=1;s=0.5]") {
      found = true;
      CHECK(std::stod(r[3]) < 1e-8);
      CHECK(r[4] == "true");
    }
  CHECK(found);
  std::string err;
  CHECK(cli({"verify", "--suite", "unknown"}, &out, &err) == exit_usage);
  CHECK(err.find("unknown suite") != std::string::npos);
  CHECK(cli({"verify"}, &out, &err) == exit_usage);
  CHECK(cli({"frobnicate"}, &out, &err) == exit_usage);
  // an impossible tolerance turns passing rows into failures
  CHECK(cli({"verify", "--suite", "constants", "--tol", "1e-300"}, &out) == exit_check_failed);

  auto dir = scratch("verify");
  CHECK(cli({"verify", "--suite", "all", "--out", dir.string()}, &out) == exit_ok);
  CHECK(manifests(dir) == 1);
  auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(m["version"] == tool_version);
  CHECK(m["checks"].size() + 1 == csv(out).size());
  CHECK(m["config_sha256"].get<std::string>().size() == 64);
}

TEST_CASE("config schema errors are line anchored") {
  auto dir = scratch("schema");
  auto path = (dir / "c.json").string();
  std::string err;
  spit(path, "{\n  \"task\": \"walk\",\n  \"params\": {},\n  \"colour\": 3\n}\n");
  CHECK(cli({"run", "--config", path}, nullptr, &err) == exit_usage);
  CHECK(err.find(path + ":4:") == 0);

  spit(path, "{\n  \"task\": \"teleport\",\n  \"params\": {}\n}\n");
  CHECK(cli({"run", "--config", path}, nullptr, &err) == exit_usage);
  CHECK(err.find(path + ":2:") == 0);

  spit(path, "{\n  \"task\": \"walk\",\n  \"params\": {\n    \"s\": 0.5,\n    \"steps\": \"ten\"\n  }\n}\n");
  CHECK(cli({"run", "--config", path}, nullptr, &err) == exit_usage);
  CHECK(err.find(path + ":5: params.steps") == 0);

  spit(path, "{\n  \"task\": \"walk\",\n  \"params\": {\n    \"s\": 1.5\n  }\n}\n");
  CHECK(cli({"run", "--config", path}, nullptr, &err) == exit_usage);
  CHECK(err.find(path + ":4: params.s") == 0);

  spit(path, "{\n  \"task\": \"walk\",\n  \"params\": {\n    \"s\": 0.5,\n  }\n}\n");
  CHECK(cli({"run", "--config", path}, nullptr, &err) == exit_usage);
  CHECK(err.find(path + ":5: invalid JSON") == 0);

  spit(path, "{\n  \"task\": \"walk\",\n  \"params\": {},\n  \"seed\": -4\n}\n");
  CHECK(cli({"run", "--config", path}, nullptr, &err) == exit_usage);
  CHECK(err.find(path + ":4:") == 0);

  CHECK(cli({"run", "--config", (dir / "missing.json").string()}, nullptr, &err) == exit_usage);
  CHECK_THROWS_AS(parse_config("[1, 2]"), ConfigError);
  CHECK_THROWS_AS(parse_config("{\"params\": {}}"), ConfigError);
}

TEST_CASE("run: dislocations") {
  auto dir = scratch("disl");
  auto cfg = dir / "c.json";
  spit(cfg, R"({"task": "dislocation", "params": {"x": [-0.5, 0.5], "xi": [1, -1], "s": 0.5, "gamma": 1, "T": 1},
               "out_dir": ")" + (dir / "out").string() + "\"}");
  std::string out;
  CHECK(cli({"run", "--config", cfg.string()}, &out) == exit_ok);
  auto ev = csv(slurp(dir / "out" / "events.csv"));
  REQUIRE(ev.size() == 2);
  CHECK(ev[0] == std::vector<std::string>{"i", "j", "t"});
  CHECK(std::fabs(std::stod(ev[1][2]) - 0.25) < 1e-6);
  CHECK(manifests(dir / "out") == 1);
  auto m = nlohmann::json::parse(slurp(dir / "out" / "manifest.json"));
  CHECK(m["config_sha256"] == sha256_hex(slurp(cfg)));
  CHECK(m["files"].size() == 2);
  // running again into the same directory still leaves a single manifest
  CHECK(cli({"run", "--config", cfg.string()}, &out) == exit_ok);
  CHECK(manifests(dir / "out") == 1);
}

TEST_CASE("run: walk determinism and the empty walk") {
  auto dir = scratch("walk");
  auto cfg = dir / "c.json";
  spit(cfg, R"({"task": "walk", "params": {"s": 0.5, "h": 0.05, "steps": 40, "walkers": 5000, "points": 128, "period": 16}, "seed": 9})");
  CHECK(cli({"run", "--config", cfg.string(), "--out", (dir / "a").string()}) == exit_ok);
  CHECK(cli({"run", "--config", cfg.string(), "--out", (dir / "b").string()}) == exit_ok);
  CHECK(cli({"run", "--config", cfg.string(), "--out", (dir / "c").string(), "--seed", "10"}) == exit_ok);
  auto a = slurp(dir / "a" / "histogram.csv");
  CHECK(!a.empty());
  CHECK(a == slurp(dir / "b" / "histogram.csv"));
  CHECK(a != slurp(dir / "c" / "histogram.csv"));
  CHECK(nlohmann::json::parse(slurp(dir / "c" / "manifest.json"))["seed"] == 10);

  spit(cfg, R"({"task": "walk", "params": {"steps": 0, "walkers": 100, "points": 64, "period": 8}})");
  CHECK(cli({"run", "--config", cfg.string(), "--out", (dir / "z").string()}) == exit_ok);
  auto rows = csv(slurp(dir / "z" / "histogram.csv"));
  int nonzero = 0;
  CHECK(rows[0] == std::vector<std::string>{"bin_center", "mass"});
  for (std::size_t k = 1; k < rows.size(); ++k) nonzero += std::stod(rows[k][1]) != 0.0;
  CHECK(nonzero == 1);
}

TEST_CASE("run: other tasks") {
  auto dir = scratch("tasks");
  auto go = [&](const std::string& name, const std::string& json) {
    auto cfg = dir / (name + ".json");
    spit(cfg, json);
    std::string out, err;
    int code = cli({"run", "--config", cfg.string(), "--out", (dir / name).string()}, &out, &err);
    CAPTURE(name);
    CAPTURE(out);
    CAPTURE(err);
    CHECK(code == exit_ok);
    CHECK(manifests(dir / name) == 1);
    return code;
  };
  go("heat", R"({"task": "heat", "params": {"s": 0.5, "t": 0.2}})");
  go("dirichlet", R"({"task": "dirichlet", "params": {"a": 0, "b": 1, "cells": 128, "s": 0.5, "exterior": {"power": 0.5}}})");
  go("gs", R"({"task": "groundstate", "params": {"s": 0.5, "p": 2, "period": 400, "points": 8192}})");
  go("per", R"({"task": "perimeter", "params": {"s": 0.3, "intervals": [[0, 1], [2, "inf"]], "window": [-3, 3]}})");
  go("ext", R"({"task": "extend", "params": {"s": 0.4, "y": 0.5}})");
  go("pn", R"({"task": "pn", "params": {"eps": 0.05, "s": 0.5, "centers": [-0.25, 0.25], "points": 2048}})");
  auto sol = csv(slurp(dir / "dirichlet" / "solution.csv"));
  double worst = 0.0;
  for (std::size_t k = 1; k < sol.size(); ++k) worst = std::max(worst, std::fabs(std::stod(sol[k][1]) - std::sqrt(std::stod(sol[k][0]))));
  CHECK(worst < 2e-2);

  auto cfg = dir / "sup.json";
  std::string err;
  spit(cfg, "{\n \"task\": \"groundstate\",\n \"params\": {\"s\": 0.25,\n  \"p\": 5}\n}");
  CHECK(cli({"run", "--config", cfg.string(), "--out", (dir / "sup").string()}, nullptr, &err) == exit_usage);
  CHECK(err.find(cfg.string() + ":4: params.p") == 0);
}

TEST_CASE("binary exit codes") {
  const char* exe = std::getenv("FRACLAB_CLI");
  if (!exe) return;
  auto status = [&](const std::string& args) {
    int r = std::system((std::string(exe) + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(r);
  };
  CHECK(status("verify --suite ball") == 0);
  CHECK(status("verify --suite nope") == 2);
  CHECK(status("--threads 1 verify --suite constants --tol 1e-300") == 1);
  CHECK(status("run") == 2);
}
