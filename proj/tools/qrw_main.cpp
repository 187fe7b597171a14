#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "qrw/config.hpp"
#include "qrw/experiments.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfigError = 2;

qrw::ExperimentConfig load_or_die(const std::string& path) {
  return qrw::load_config(path);
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << body;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum random walk convergence toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string which = "Psi";

  CLI::App* cmd_check =
      app.add_subcommand("check", "run the self-check suite on a config");
  cmd_check->add_option("config", config_path, "config file (JSON)")
      ->required();

  CLI::App* cmd_converge = app.add_subcommand(
      "converge", "sweep the step-size grid and write CSV reports");
  cmd_converge->add_option("config", config_path, "config file (JSON)")
      ->required();
  cmd_converge->add_option("--out", out_dir, "output directory for CSVs")
      ->required();

  CLI::App* cmd_thermal = app.add_subcommand(
      "thermal", "report noise-dimension count and gauge residual");
  cmd_thermal->add_option("config", config_path, "config file (JSON)")
      ->required();

  CLI::App* cmd_dump = app.add_subcommand(
      "dump-generator", "print a generator matrix as CSV");
  cmd_dump->add_option("config", config_path, "config file (JSON)")
      ->required();
  cmd_dump
      ->add_option("--which", which,
                   "which generator: Psi, psi, F, or G (default Psi)")
      ->check(CLI::IsMember({"Psi", "psi", "F", "G"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitPass : kExitConfigError;
  }

  try {
    if (cmd_check->parsed()) {
      const qrw::ExperimentConfig cfg = load_or_die(config_path);
      const qrw::CheckReport rep = qrw::run_checks(cfg);
      std::cout << qrw::format_checks(rep);
      return rep.pass ? kExitPass : kExitFail;
    }
    if (cmd_converge->parsed()) {
      const qrw::ExperimentConfig cfg = load_or_die(config_path);
      const qrw::ConvergeResult res = qrw::run_converge(cfg);
      const std::filesystem::path dir{out_dir};
      std::filesystem::create_directories(dir);
      write_file(dir / "convergence.csv", res.convergence_csv);
      write_file(dir / "rates.csv", res.rates_csv);
      write_file(dir / "summary.csv", res.summary_csv);
      std::cout << res.summary_csv;
      return res.pass ? kExitPass : kExitFail;
    }
    if (cmd_thermal->parsed()) {
      const qrw::ExperimentConfig cfg = load_or_die(config_path);
      const qrw::ThermalReport rep = qrw::run_thermal(cfg);
      std::printf("noise_count %d\nnoise_bound %d\ngauge_residual %.16e\n%s\n",
                  rep.count, rep.bound, rep.gauge_residual,
                  rep.pass ? "pass" : "FAIL");
      return rep.pass ? kExitPass : kExitFail;
    }
    if (cmd_dump->parsed()) {
      const qrw::ExperimentConfig cfg = load_or_die(config_path);
      std::cout << qrw::format_matrix_csv(qrw::dump_generator(cfg, which));
      return kExitPass;
    }
  } catch (const qrw::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitConfigError;
}
