// Run configuration: a flat key=value file shared by all experiments, plus
// the dispatcher that turns a config into artifacts on disk.
#pragma once

#include "camr/bank.hpp"
#include "camr/train.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace camr {

enum class Experiment { verify, sweep, xor_gate, ttest, train };

std::string to_string(Experiment experiment);
Experiment experiment_from_string(const std::string& name);

struct RunConfig {
  Experiment experiment = Experiment::verify;
  int rule = 60;
  Eigen::Index n = 8;
  Eigen::Index m = 7;
  DeviceParams device;      // carries the seed
  double g_b = 1.2e-3;
  std::vector<Write> writes;  // devices programmed before sweep/xor/ttest
  int bit_a = 5;              // xor input cell pair
  int bit_b = 7;
  std::string fixed_bits;     // remaining-cell values for xor; empty = zeros
  Address address_a{2, 7};    // ttest element pair
  Address address_b{4, 7};
  TrainOptions train_options;
  std::string dataset_path;
  std::string out_dir = ".";

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses a flat key=value document. Unknown keys and out-of-range values
/// raise std::runtime_error naming the offending line and key; missing keys
/// keep their defaults.
RunConfig parse_config(std::istream& in, const std::string& name = "config");
RunConfig load_config(const std::filesystem::path& path);
void save_config(const RunConfig& config, std::ostream& out);

/// Runs the configured experiment, writes its artifacts under out_dir and
/// prints a one-line summary. Returns the process exit status: 0 on success,
/// 1 on a failed verification, 2 on error.
int run(const RunConfig& config);

}  // namespace camr
