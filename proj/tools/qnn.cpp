#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "dispatch.hpp"

int main(int argc, char** argv) {
  using qnn::cli::RunConfig;
  using qnn::cli::Subcommand;

  CLI::App app{"Statistically gated polynomial-regression / chi-squared pipeline with simulated Grover pivot search"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string output;
  std::string strategy;
  app.add_option("--output,-o", output, "Write the JSON report here instead of stdout");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "RNG seed (recorded in the report)");
    sub->add_option("--output,-o", output, "Write the JSON report here instead of stdout");
  };
  auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--strategy", strategy, "Pivot search: classical | grover")
        ->check(CLI::IsMember({"classical", "grover"}));
    sub->add_option("--tol", cfg.tol, "Pivot tolerance (default 1e-10, or $QNN_TOL)");
  };

  auto* fit = app.add_subcommand("fit", "Polynomial least-squares fit gated by the F-ratio");
  fit->add_option("--input", cfg.input, "CSV with header x1,...,xn,y")->required();
  fit->add_option("--degree", cfg.degree, "Maximum total degree N")->required();
  fit->add_option("--vars", cfg.vars, "Number of x-columns (checked against the header)");
  fit->add_option("--alpha", cfg.alpha, "Gate level alpha (default 0.05)");
  add_solver(fit);
  add_common(fit);

  auto* rref = app.add_subcommand("rref", "Reduced row echelon form, rank and null space");
  rref->add_option("--input", cfg.input, "Headerless numeric CSV matrix")->required();
  add_solver(rref);
  add_common(rref);

  auto* chi2 = app.add_subcommand("chi2", "Chi-squared gate on a contingency table");
  chi2->add_option("--observed", cfg.observed, "Observed counts (headerless CSV)")->required();
  chi2->add_option("--expected", cfg.expected, "Expected counts; derived from marginals if omitted");
  chi2->add_option("--alpha", cfg.alpha, "Gate level alpha (default 0.05)");
  add_common(chi2);

  auto* quantile = app.add_subcommand("quantile", "Upper-alpha quantile of chi2(df) or F(d1,d2)");
  quantile->add_option("--dist", cfg.dist, "chi2 | f")->required()->check(CLI::IsMember({"chi2", "f"}));
  quantile->add_option("--df", cfg.df, "Degrees of freedom: df, or d1,d2")->required()->delimiter(',');
  quantile->add_option("--alpha", cfg.alpha, "Level alpha (default 0.05)");
  quantile->add_option("--statistic", cfg.statistic, "Optional statistic to gate against the quantile");
  add_common(quantile);

  auto* grover = app.add_subcommand("grover", "Repeated simulated Grover searches");
  grover->add_option("--size", cfg.size, "Search space size M (power of two)")->required();
  grover->add_option("--marked", cfg.marked, "Marked indices i[,j,...] (may be empty)")->required();
  grover->add_option("--iterations", cfg.iterations, "Grover rounds (default: optimal for the marked count)");
  grover->add_option("--repeat", cfg.repeat, "Number of independently seeded runs");
  add_common(grover);

  auto* pipeline = app.add_subcommand("pipeline", "Run a layered gate pipeline from a config file");
  pipeline->add_option("--config", cfg.config, "Pipeline description file")->required();
  add_solver(pipeline);
  add_common(pipeline);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return qnn::cli::kInputError;
  }

  if (*fit) cfg.subcommand = Subcommand::Fit;
  else if (*rref) cfg.subcommand = Subcommand::Rref;
  else if (*chi2) cfg.subcommand = Subcommand::Chi2;
  else if (*quantile) cfg.subcommand = Subcommand::Quantile;
  else if (*grover) cfg.subcommand = Subcommand::Grover;
  else cfg.subcommand = Subcommand::Pipeline;
  if (!strategy.empty()) cfg.strategy = strategy;

  const auto outcome = qnn::cli::dispatch(cfg);
  const std::string text = outcome.report.dump(2) + "\n";
  if (outcome.report.contains("error")) {
    std::cerr << "qnn " << outcome.report["subcommand"].get<std::string>() << ": "
              << outcome.report["error"]["message"].get<std::string>() << "\n";
  }
  if (output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(output, std::ios::binary);
    if (!out) {
      std::cerr << "qnn: cannot write " << output << "\n";
      return qnn::cli::kInputError;
    }
    out << text;
  }
  return outcome.exit_code;
}
