// Command-line front end: one subcommand per experiment, a shared config
// file and override flags for the most common knobs.
#include "camr/config.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  int rule = 0;
  std::uint64_t seed = 0;
  double g_b = 0.0;
  double lrs = 0.0;
  double parasitic = 0.0;
  std::string dataset;

  CLI::Option* config_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* rule_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* gb_opt = nullptr;
  CLI::Option* lrs_opt = nullptr;
  CLI::Option* parasitic_opt = nullptr;
  CLI::Option* dataset_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  flags.config_opt = cmd->add_option("--config", flags.config_path,
                                     "key=value configuration file");
  flags.out_opt = cmd->add_option("--out", flags.out_dir, "artifact directory");
  flags.rule_opt =
      cmd->add_option("--rule", flags.rule, "rule number 0-255")->check(CLI::Range(0, 255));
  flags.seed_opt = cmd->add_option("--seed", flags.seed, "device sampling seed");
  flags.gb_opt = cmd->add_option("--gb", flags.g_b, "threshold conductance in S");
  flags.lrs_opt = cmd->add_option("--lrs", flags.lrs, "LRS nominal conductance in S");
  flags.parasitic_opt = cmd->add_option(
      "--parasitic", flags.parasitic, "enabled level-0 device conductance in S");
}

camr::RunConfig assemble(const CommonFlags& flags, camr::Experiment experiment) {
  camr::RunConfig config;
  if (*flags.config_opt) {
    config = camr::load_config(flags.config_path);
  }
  config.experiment = experiment;
  if (*flags.out_opt) config.out_dir = flags.out_dir;
  if (*flags.rule_opt) config.rule = flags.rule;
  if (*flags.seed_opt) config.device.seed = flags.seed;
  if (*flags.gb_opt) config.g_b = flags.g_b;
  if (*flags.lrs_opt) config.device.lrs_nominal = flags.lrs;
  if (*flags.parasitic_opt) config.device.parasitic_enabled = flags.parasitic;
  if (flags.dataset_opt && *flags.dataset_opt) config.dataset_path = flags.dataset;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "camr: elementary-cellular-automaton reservoir with a memristive "
      "crossbar readout"};
  app.require_subcommand(1);

  CommonFlags verify_flags, sweep_flags, xor_flags, ttest_flags, train_flags;
  CLI::App* verify =
      app.add_subcommand("verify", "check the reservoir against the reference");
  add_common(verify, verify_flags);
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "read the bank under every possible input");
  add_common(sweep_cmd, sweep_flags);
  CLI::App* xor_cmd =
      app.add_subcommand("xor", "classify the four states of an input pair");
  add_common(xor_cmd, xor_flags);
  CLI::App* ttest_cmd = app.add_subcommand(
      "ttest", "compare the conductance levels of two programmed elements");
  add_common(ttest_cmd, ttest_flags);
  CLI::App* train_cmd =
      app.add_subcommand("train", "fit and quantize a programming plan");
  add_common(train_cmd, train_flags);
  train_flags.dataset_opt =
      train_cmd->add_option("--dataset", train_flags.dataset, "labeled dataset file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      return camr::run(assemble(verify_flags, camr::Experiment::verify));
    }
    if (sweep_cmd->parsed()) {
      return camr::run(assemble(sweep_flags, camr::Experiment::sweep));
    }
    if (xor_cmd->parsed()) {
      return camr::run(assemble(xor_flags, camr::Experiment::xor_gate));
    }
    if (ttest_cmd->parsed()) {
      return camr::run(assemble(ttest_flags, camr::Experiment::ttest));
    }
    if (train_cmd->parsed()) {
      return camr::run(assemble(train_flags, camr::Experiment::train));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
