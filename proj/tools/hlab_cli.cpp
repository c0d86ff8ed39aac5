#include <iostream>

#include "CLI11.hpp"
#include "hlab/pipeline.hpp"

namespace {

void print_catalog(bool as_json) {
  if (as_json) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& e : hlab::builtin_catalog())
      out.push_back({{"name", e.name}, {"description", e.description}});
    std::cout << out.dump(2) << "\n";
    return;
  }
  for (const auto& e : hlab::builtin_catalog()) std::cout << e.name << "  " << e.description << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Runs scenarios through the solver and the inequality checks."};
  app.require_subcommand(1);

  hlab::RunOptions opt;
  std::string out_dir;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "output directory (default: the config's output_dir)");
    sub->add_flag("--dump-fields", opt.dump_fields, "write binary field dumps with JSON sidecars");
    sub->add_flag("--dump-surfaces", opt.dump_surfaces, "write OBJ level-set surfaces");
    sub->add_option("--tolerance-scale", opt.tolerance_scale, "multiply every check tolerance")
        ->check(CLI::PositiveNumber);
  };

  std::string config;
  auto* run = app.add_subcommand("run", "run one scenario (a JSON path or builtin:<name>)");
  run->add_option("config", config)->required();
  add_common(run);

  std::vector<int> resolutions;
  auto* study = app.add_subcommand("study", "convergence study over several resolutions");
  study->add_option("config", config)->required();
  study->add_option("--resolutions", resolutions, "cells per axis, e.g. 16,32,64")
      ->delimiter(',')
      ->required();
  add_common(study);

  bool as_json = false;
  auto* list = app.add_subcommand("list", "list the built-in scenarios");
  list->add_flag("--json", as_json, "machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return hlab::kExitConfig;
  }

  if (!out_dir.empty()) opt.out_dir = out_dir;
  if (*list) {
    print_catalog(as_json);
    return hlab::kExitPass;
  }
  if (*run) return hlab::run_command(config, opt, std::cout);
  return hlab::study_command(config, resolutions, opt, std::cout);
}
