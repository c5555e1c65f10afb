#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cli.hpp"
#include "fraclab/common.hpp"

namespace fraclab::cli {

namespace {

std::string joined(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
  return s;
}

bool all_pass(const std::vector<CheckRow>& rows) {
  for (const auto& r : rows)
    if (!r.pass) return false;
  return true;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"fraclab: fractional Laplacian numerics"};
  app.require_subcommand(1);
  app.fallthrough();  // subcommands inherit this, so global flags may follow them
  std::string suite, config_path, out_dir;
  std::int64_t seed = -1;
  int nthreads = -1;
  double tol = 0.0;
  app.add_option("--threads", nthreads, "worker cap (default FRACLAB_THREADS or all cores)")->check(CLI::NonNegativeNumber);
  app.add_option("--tol", tol, "override tolerances")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "seed override")->check(CLI::NonNegativeNumber);
  auto* verify = app.add_subcommand("verify", "run an identity suite and print CSV");
  verify->add_option("--suite", suite, "constants|halfline|ball|coarea|extension|perimeter|all")->required();
  auto* run = app.add_subcommand("run", "run a task from a JSON config");
  run->add_option("--config", config_path, "config path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  if (nthreads >= 0) set_threads(nthreads);
  const auto start = std::chrono::steady_clock::now();
  RunManifest m;
  m.command = joined(argc, argv);
  try {
    if (*verify) {
      m.checks = run_suite(suite, tol);
      write_rows_csv(m.checks, out);
      nlohmann::json canon{{"suite", suite}, {"tol", tol}};
      m.config_digest = sha256_hex(canon.dump());
      m.seed = seed < 0 ? 0 : static_cast<std::uint64_t>(seed);
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream f(std::filesystem::path(out_dir) / "verify.csv");
        write_rows_csv(m.checks, f);
        m.files.push_back("verify.csv");
      }
    } else {
      Config c = load_config(config_path);
      if (seed >= 0) c.seed = static_cast<std::uint64_t>(seed);
      if (!out_dir.empty()) c.out_dir = out_dir;
      if (tol > 0.0 && (c.task == "dislocation" || c.task == "groundstate") && !c.params.contains("tol")) c.params["tol"] = tol;
      m.config_digest = sha256_hex(c.text);
      m.seed = c.seed;
      auto res = run_task(c);
      m.checks = res.checks;
      m.files = res.files;
      out_dir = c.out_dir;
      write_rows_csv(m.checks, out);
    }
  } catch (const UsageError& e) {
    err << e.what() << "\n";
    return exit_usage;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    err << "failed: " << e.what() << "\n";
    return exit_check_failed;
  }
  m.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!out_dir.empty()) write_manifest(m, out_dir);
  return all_pass(m.checks) ? exit_ok : exit_check_failed;
}

}  // namespace fraclab::cli
