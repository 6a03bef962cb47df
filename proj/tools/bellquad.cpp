#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "bellquad/cli.hpp"

int main(int argc, char** argv) {
  using namespace bellquad::cli;

  CLI::App app{"Joint quadruple distributions for EPR experiments and Bell-CHSH checks"};
  std::string mode;
  std::string params_path;
  std::string output_path;
  double tolerance = 0;
  RunConfig cfg;

  app.add_option("--mode", mode, "probs | construct3 | construct4 | chsh | oracle | sweep | mc-verify")
      ->required()
      ->check(CLI::IsMember({"probs", "construct3", "construct4", "chsh", "oracle", "sweep", "mc-verify"}));
  app.add_option("--input", cfg.input_path, "JSON input file")->required();
  auto* params_opt = app.add_option("--params", params_path, "JSON file with free-parameter positions t");
  app.add_option("--seed", cfg.seed, "seed for the mt19937_64 generator (mc-verify)");
  app.add_option("--samples", cfg.samples, "number of Monte Carlo samples (mc-verify)")
      ->check(CLI::PositiveNumber);
  app.add_option("--grid", cfg.grid, "grid points per free parameter (sweep)")->check(CLI::PositiveNumber);
  app.add_option("--experiments", cfg.experiments, "3 or 4 measured experiments (sweep, mc-verify)")
      ->check(CLI::IsMember({3, 4}));
  auto* tol_opt = app.add_option("--tolerance", tolerance, "CHSH and LP decision tolerance")
                      ->check(CLI::NonNegativeNumber);
  app.add_option("--output", output_path, "report file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  cfg.mode = parse_mode(mode);
  if (*params_opt) cfg.params_path = params_path;
  if (*tol_opt) cfg.tolerance = tolerance;

  const RunOutcome outcome = run(cfg);
  const std::string text = render(outcome.report);
  if (output_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(output_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write '" << output_path << "'\n";
      return 2;
    }
    out << text;
  }
  if (outcome.exit_code != 0)
    std::cerr << "error: " << outcome.report["error"]["message"].get<std::string>() << "\n";
  return outcome.exit_code;
}
