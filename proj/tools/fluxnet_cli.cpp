#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "fluxnet/core/errors.hpp"
#include "fluxnet/harness/commands.hpp"

namespace {

using namespace fluxnet;
using namespace fluxnet::harness;

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kNumerical = 3;

struct Args {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  bool reuse = false;
};

int run(const std::string& command, const Args& a) {
  const ExperimentConfig config = load_config(a.config, a.seed);
  const CommandOptions opts{!a.quiet, a.reuse};
  if (command == "gen-data") {
    cmd_gen_data(config, a.out, opts);
  } else if (command == "train") {
    cmd_train(config, a.out, opts);
  } else if (command == "eval-apriori") {
    for (const FluxError& e : cmd_eval_apriori(config, a.out, opts).errors)
      std::cout << e.label << " relative_l1=" << e.total << '\n';
  } else if (command == "simulate") {
    int code = kOk;
    for (const RunOutcome& o : cmd_simulate(config, a.out, opts)) {
      if (o.result.completed()) {
        std::cout << o.name << " completed t=" << o.result.final_state.time << '\n';
      } else {
        std::cout << o.name << " failed t=" << o.result.failure->time << ": " << o.result.failure->reason << '\n';
        code = kNumerical;
      }
    }
    return code;
  } else if (command == "compare") {
    for (const ComparisonSummary& s : cmd_compare(config, a.out, opts))
      std::cout << s.run << " vs " << s.reference << " t=" << s.time << " relative_l1=" << s.relative_l1
                << " max_abs=" << s.max_linf << '\n';
  } else if (command == "gradcheck") {
    const GradcheckReport r = cmd_gradcheck(config, a.out, opts);
    std::cout << "max_relative_error=" << r.max_relative_error << " tolerance=" << r.tolerance << '\n';
    if (!r.passed()) return kNumerical;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural-network surrogate numerical fluxes: data, training and finite-volume experiments"};
  app.require_subcommand(1);
  Args a;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"gen-data", "Sample face states and write train/test CSVs"},
      {"train", "Train the configured surrogate models"},
      {"eval-apriori", "Flux errors of models and baselines on the test set"},
      {"simulate", "Run finite-volume simulations"},
      {"compare", "Error fields between simulation runs"},
      {"gradcheck", "Backpropagation vs finite differences"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", a.config, "Configuration JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", a.out, "Output directory");
    sub->add_option("--seed", a.seed, "Override the configuration seed");
    sub->add_flag("--quiet", a.quiet, "No progress output");
    if (name == "train") sub->add_flag("--reuse", a.reuse, "Keep existing models with a matching config hash");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, a);
  } catch (const ConfigError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const FormatError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const DimensionError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const DivergenceError& e) {
    std::cerr << "numerical failure: " << e.what() << " (epoch " << e.epoch() << ")\n";
    return kNumerical;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  }
}
