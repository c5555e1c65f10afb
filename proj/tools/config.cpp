#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <regex>
#include <sstream>

#include "cli.hpp"
#include "fraclab/field.hpp"

namespace fraclab::cli {

using nlohmann::json;

CheckRow check_abs(std::string name, double computed, double expected, double tol) {
  double e = std::fabs(computed - expected);
  return {std::move(name), computed, expected, e, tol, false, e <= tol};
}

CheckRow check_rel(std::string name, double computed, double expected, double tol) {
  double e = std::fabs(computed - expected);
  return {std::move(name), computed, expected, e, tol, true, e <= tol * std::fabs(expected)};
}

CheckRow check_ge(std::string name, double computed, double expected, double tol) {
  double e = std::max(0.0, expected - computed);
  return {std::move(name), computed, expected, e, tol, false, computed >= expected - tol};
}

void write_rows_csv(const std::vector<CheckRow>& rows, std::ostream& out) {
  out << "name,computed,expected,abs_err,pass\n";
  for (const auto& r : rows)
    out << r.name << "," << format_double(r.computed) << "," << format_double(r.expected) << ","
        << format_double(r.abs_err) << "," << (r.pass ? "true" : "false") << "\n";
}

const std::vector<std::string>& task_names() {
  static const std::vector<std::string> t{"walk", "heat", "dislocation", "pn", "dirichlet", "groundstate", "perimeter", "extend"};
  return t;
}

int line_of_key(const std::string& text, const std::string& key) {
  std::regex re("\"" + std::regex_replace(key, std::regex(R"([.^$|()\[\]{}*+?\\])"), R"(\$&)") + "\"\\s*:");
  std::smatch m;
  if (!std::regex_search(text, m, re)) return 1;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + m.position(0), '\n'));
}

namespace {

[[noreturn]] void fail_at(const std::string& source, int line, const std::string& msg) {
  throw ConfigError(source + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

Config parse_config(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t upto = std::min<std::size_t>(e.byte ? e.byte - 1 : 0, text.size());
    int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + upto, '\n'));
    std::string what = e.what();
    auto p = what.find("syntax error");
    fail_at(source, line, "invalid JSON: " + (p == std::string::npos ? what : what.substr(p)));
  }
  if (!j.is_object()) fail_at(source, 1, "config must be a JSON object");
  Config c;
  c.text = text;
  c.source = source;
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "task" && it.key() != "params" && it.key() != "seed" && it.key() != "out_dir")
      fail_at(source, line_of_key(text, it.key()), "unknown key \"" + it.key() + "\"");
  if (!j.contains("task")) fail_at(source, 1, "missing required key \"task\"");
  if (!j["task"].is_string()) fail_at(source, line_of_key(text, "task"), "\"task\" must be a string");
  c.task = j["task"].get<std::string>();
  const auto& names = task_names();
  if (std::find(names.begin(), names.end(), c.task) == names.end()) {
    std::string all;
    for (const auto& n : names) all += (all.empty() ? "" : "|") + n;
    fail_at(source, line_of_key(text, "task"), "unknown task \"" + c.task + "\" (expected " + all + ")");
  }
  if (j.contains("params")) {
    if (!j["params"].is_object()) fail_at(source, line_of_key(text, "params"), "\"params\" must be an object");
    c.params = j["params"];
  } else {
    fail_at(source, 1, "missing required key \"params\"");
  }
  if (j.contains("seed")) {
    const auto& s = j["seed"];
    if (!(s.is_number_unsigned() || (s.is_number_integer() && s.get<long long>() >= 0)))
      fail_at(source, line_of_key(text, "seed"), "\"seed\" must be a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }
  if (j.contains("out_dir")) {
    if (!j["out_dir"].is_string() || j["out_dir"].get<std::string>().empty())
      fail_at(source, line_of_key(text, "out_dir"), "\"out_dir\" must be a non-empty string");
    c.out_dir = j["out_dir"].get<std::string>();
  }
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

// ---- params ----

Params::Params(const Config& c) : c_(c) {}

void Params::fail(const std::string& key, const std::string& msg) const {
  fail_at(c_.source, line_of_key(c_.text, key), "params." + key + ": " + msg);
}

bool Params::has(const std::string& key) const { return c_.params.contains(key); }

const json& Params::raw(const std::string& key) const {
  if (!has(key)) fail_at(c_.source, line_of_key(c_.text, "params"), "params." + key + ": required");
  return c_.params[key];
}

double Params::number(const std::string& key) const {
  const auto& v = raw(key);
  if (!v.is_number()) fail(key, "must be a number");
  double x = v.get<double>();
  if (!std::isfinite(x)) fail(key, "must be finite");
  return x;
}

double Params::number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

long Params::integer(const std::string& key, long fallback) const {
  if (!has(key)) return fallback;
  const auto& v = c_.params[key];
  if (!v.is_number_integer()) fail(key, "must be an integer");
  return v.get<long>();
}

std::vector<double> Params::numbers(const std::string& key) const {
  const auto& v = raw(key);
  if (!v.is_array()) fail(key, "must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) fail(key, "must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<double> Params::numbers(const std::string& key, std::vector<double> fallback) const {
  return has(key) ? numbers(key) : fallback;
}

void Params::only(const std::vector<std::string>& allowed) const {
  for (auto it = c_.params.begin(); it != c_.params.end(); ++it)
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      fail(it.key(), "unknown parameter for task " + c_.task);
}

// ---- manifest ----

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr))
    throw std::runtime_error("sha256 failed");
  std::ostringstream ss;
  for (unsigned int i = 0; i < len; ++i) ss << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return ss.str();
}

json to_json(const RunManifest& m) {
  json checks = json::array();
  for (const auto& r : m.checks)
    checks.push_back({{"name", r.name}, {"computed", r.computed}, {"expected", r.expected}, {"abs_err", r.abs_err},
                      {"tol", r.tol}, {"pass", r.pass}});
  return {{"command", m.command}, {"config_sha256", m.config_digest}, {"seed", m.seed}, {"version", m.version},
          {"wall_time_s", m.wall_time}, {"checks", checks}, {"files", m.files}};
}

void write_manifest(const RunManifest& m, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::ofstream out(std::filesystem::path(out_dir) / "manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest in " + out_dir);
  out << to_json(m).dump(2) << "\n";
}

}  // namespace fraclab::cli
