#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "periparab/config.hpp"
#include "periparab/errors.hpp"
#include "periparab/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIdentify = 4;
constexpr int kExitContradiction = 5;

int run_command(const std::string& command, const std::string& config_path,
                const std::string& out_dir) {
  using namespace periparab;
  try {
    const RunConfig config = parse_config_file(config_path, command);
    if (command == "solve") {
      const SolveOutcome outcome = run_solve(config, out_dir);
      std::printf("wrote %s\n", outcome.summary_path.c_str());
    } else if (command == "choose-k") {
      const ChooseKOutcome outcome = run_choose_k(config, out_dir);
      std::printf("wrote %s\n", outcome.summary_path.c_str());
    } else if (command == "identify") {
      const IdentifyOutcome outcome = run_identify(config, out_dir);
      std::printf("wrote %s\n", outcome.result_path.c_str());
    } else {
      const Example34Outcome outcome = run_example34(config, out_dir);
      std::printf("wrote %s\n", outcome.report_path.c_str());
    }
    return kExitOk;
  } catch (const ValidationError& err) {
    std::fprintf(stderr, "configuration error: %s\n", err.what());
    return kExitConfig;
  } catch (const ScenarioContradictionError& err) {
    std::fprintf(stderr, "scenario contradiction: %s\n", err.what());
    return kExitContradiction;
  } catch (const IllPosedObservationError& err) {
    std::fprintf(stderr, "identification error: %s\n", err.what());
    return kExitIdentify;
  } catch (const ContractionBudgetError& err) {
    std::fprintf(stderr, "identification error: %s\n", err.what());
    return kExitIdentify;
  } catch (const Error& err) {
    // Contraction, conditioning, budget, and integration failures: solver
    // class, except under identify where they abort the identification.
    const int code = command == "identify" ? kExitIdentify : kExitSolver;
    std::fprintf(stderr, "solver error: %s\n", err.what());
    return code;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "unexpected error: %s\n", err.what());
    return kExitSolver;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral solver for time-periodic perturbed parabolic "
               "problems on an interval"};
  app.require_subcommand(1);

  struct CommandSpec {
    const char* name;
    const char* description;
  };
  const CommandSpec specs[] = {
      {"solve", "construct a periodic solution and write its artifacts"},
      {"choose-k", "scan split indices for a contractive tail map"},
      {"identify", "recover the perturbation and head from observations"},
      {"example34", "run the built-in neutral-mode resonance scenario"},
  };

  std::string config_path;
  std::string out_dir = ".";
  for (const CommandSpec& spec : specs) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.description);
    sub->add_option("--config,-c", config_path, "configuration JSON path")
        ->required();
    sub->add_option("--out-dir,-o", out_dir, "output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  return run_command(app.get_subcommands().front()->get_name(), config_path,
                     out_dir);
}
