#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace fraclab::cli {

inline constexpr const char* tool_version = "0.1.0";

// Exit codes
inline constexpr int exit_ok = 0;
inline constexpr int exit_check_failed = 1;
inline constexpr int exit_usage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CheckRow {
  std::string name;
  double computed = 0.0;
  double expected = 0.0;
  double abs_err = 0.0;
  double tol = 0.0;
  bool relative = false;  // bound is tol |expected|
  bool pass = false;
};

// |computed - expected| <= tol
CheckRow check_abs(std::string name, double computed, double expected, double tol);
// |computed - expected| <= tol |expected|
CheckRow check_rel(std::string name, double computed, double expected, double tol);
// computed >= expected - tol
CheckRow check_ge(std::string name, double computed, double expected, double tol);

void write_rows_csv(const std::vector<CheckRow>& rows, std::ostream& out);

// ---- verify ----
const std::vector<std::string>& suite_names();  // without "all"
// Throws UsageError for an unknown suite. tol_override > 0 replaces every pinned tolerance.
std::vector<CheckRow> run_suite(const std::string& suite, double tol_override = 0.0);

// ---- config ----
struct Config {
  std::string task;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::string text;    // raw bytes the digest is taken over
  std::string source;  // file name for messages
};

// Line-anchored error: "<source>:<line>: <message>"
struct ConfigError : UsageError {
  using UsageError::UsageError;
};

Config parse_config(const std::string& text, const std::string& source = "config");
Config load_config(const std::string& path);
const std::vector<std::string>& task_names();

// Typed parameter access with line-anchored errors.
class Params {
 public:
  Params(const Config& c);
  double number(const std::string& key, double fallback) const;
  double number(const std::string& key) const;
  long integer(const std::string& key, long fallback) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const;
  bool has(const std::string& key) const;
  const nlohmann::json& raw(const std::string& key) const;
  // Rejects keys outside `allowed`.
  void only(const std::vector<std::string>& allowed) const;
  [[noreturn]] void fail(const std::string& key, const std::string& msg) const;

 private:
  const Config& c_;
};

int line_of_key(const std::string& text, const std::string& key);

// ---- run ----
struct TaskOutput {
  std::vector<CheckRow> checks;
  std::vector<std::string> files;  // relative to out_dir
};

TaskOutput run_task(const Config& cfg);

// ---- manifest ----
std::string sha256_hex(const std::string& bytes);

struct RunManifest {
  std::string command;
  std::string config_digest;
  std::uint64_t seed = 0;
  std::string version = tool_version;
  double wall_time = 0.0;
  std::vector<CheckRow> checks;
  std::vector<std::string> files;
};

nlohmann::json to_json(const RunManifest& m);
void write_manifest(const RunManifest& m, const std::string& out_dir);

// Entry point; returns the exit code.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace fraclab::cli
