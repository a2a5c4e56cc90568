#include "reachdec/commands.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Decomposed reachability analysis for linear time-invariant systems"};
  app.require_subcommand(1, 1);

  reachdec::CommandOptions options;
  std::string format = "csv";
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"discretize", "write Phi and the bounds of the initial and input sets"},
      {"reach", "compute the decomposed reach tube"},
      {"check", "check the scenario's safety property"},
      {"compare", "compare the decomposed tube with the non-decomposed reference"},
      {"bounds", "print the analytic decomposition error bounds next to empirical gaps"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--scenario", options.scenario, "scenario JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", options.out_dir, "output directory")->capture_default_str();
    sub->add_option("--format", format, "tube output format")
        ->check(CLI::IsMember({"csv", "svg", "both"}))
        ->capture_default_str();
    sub->add_option("--scheme", options.scheme, "approximation scheme: box or eps:<value>");
    sub->add_option("--seed", options.seed, "seed for sampled directions");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error:cli:usage: " << e.what() << std::endl;
    return reachdec::kExitInputError;
  }

  options.format = format == "svg"    ? reachdec::OutputFormat::Svg
                   : format == "both" ? reachdec::OutputFormat::Both
                                      : reachdec::OutputFormat::Csv;
  const std::string command = app.get_subcommands().front()->get_name();
  return reachdec::run_command(command, options, std::cout, std::cerr);
}
