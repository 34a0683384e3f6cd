// Readout training: fit a real-weight hyperplane to featurized traces, then
// quantize it onto the device level grid as a programming plan.
//
// Plan accuracies are measured in ideal mode: nominal level conductances,
// no variation, no HRS leakage, no parasitics. Applying a plan's writes to a
// bank built from DeviceParams::ideal() therefore reproduces
// achieved_accuracy exactly.
#pragma once

#include "camr/bank.hpp"
#include "camr/eca.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <vector>

namespace camr {

struct LabeledItem {
  Bits input;
  int label = -1;  // -1 or +1
};

struct LabeledDataset {
  std::vector<LabeledItem> items;

  Eigen::Index n() const { return items.empty() ? 0 : items.front().input.size(); }
  /// Throws std::domain_error on mixed widths, non-binary cells or labels
  /// outside {-1, +1}.
  void validate() const;
};

struct Write {
  int iteration = 0;
  int cell = 0;
  int level = 0;

  friend bool operator==(const Write&, const Write&) = default;
};

struct ProgrammingPlan {
  std::vector<Write> writes;  // unique addresses, iteration-major order
  double g_b = 0.0;
  double achieved_accuracy = 0.0;
  bool separable = true;  // false: classes overlap after quantization
};

/// Row i is vec(trace of item i) in iteration-major order; entries are 0/1.
/// Throws std::domain_error on an empty dataset.
Eigen::MatrixXd featurize(const LabeledDataset& dataset, const Rule& rule,
                          Eigen::Index m);

Eigen::VectorXi labels_of(const LabeledDataset& dataset);

struct TrainOptions {
  int epochs = 5000;
  double learning_rate = 0.1;
  double l2 = 0.01;

  friend bool operator==(const TrainOptions&, const TrainOptions&) = default;
};

struct LinearModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  bool converged = false;  // hinge loss reached zero within the epoch budget
  double hinge_loss = 0.0;
  double accuracy = 0.0;  // training accuracy of the returned iterate
  int epochs_run = 0;
};

/// Full-batch subgradient descent on hinge loss + L2 penalty. Keeps the best
/// iterate seen (highest accuracy, then lowest objective) and stops early
/// when every margin is satisfied.
LinearModel train_linear(const Eigen::MatrixXd& features,
                         const Eigen::VectorXi& labels,
                         const TrainOptions& options = {});

/// Maps real weights onto the level grid: clamps negatives, scales the
/// largest weight to the top level, rounds to the nearest level (ties toward
/// the lower level), then places g_b at the midpoint between the classes'
/// simulated conductances. A final minimization pass drops writes that do
/// not pay for themselves, so a task a single device can carry yields a
/// single write. `n` and `m` map flat feature indices back to addresses.
ProgrammingPlan quantize_plan(const Eigen::VectorXd& weights, double bias,
                              const DeviceParams& params,
                              const Eigen::MatrixXd& features,
                              const Eigen::VectorXi& labels, Eigen::Index n,
                              Eigen::Index m);

/// Ground truth for small instances: enumerates every binary programming
/// (each device off or at the top level) with the best threshold for each,
/// returning a maximizing plan. Ties resolve to the lexicographically
/// smallest programming, then the lowest threshold.
/// Throws std::domain_error when n * m > 16.
ProgrammingPlan exhaustive_oracle(const LabeledDataset& dataset, const Rule& rule,
                                  Eigen::Index n, Eigen::Index m,
                                  const DeviceParams& params);

/// Ideal-mode conductance of each feature row under a plan's writes.
Eigen::VectorXd simulate_plan(const ProgrammingPlan& plan,
                              const Eigen::MatrixXd& features,
                              const DeviceParams& params, Eigen::Index n);

/// Ideal-mode training accuracy of a plan.
double plan_accuracy(const ProgrammingPlan& plan, const Eigen::MatrixXd& features,
                     const Eigen::VectorXi& labels, const DeviceParams& params,
                     Eigen::Index n);

/// Programs every write into the bank and sets its threshold.
void apply_plan(CrossbarBank& bank, const ProgrammingPlan& plan);

/// Dataset text format: one item per line, n '0'/'1' characters, whitespace,
/// then "+1" or "-1".
LabeledDataset load_dataset(std::istream& in, const std::string& name = "dataset");
void save_dataset(const LabeledDataset& dataset, std::ostream& out);

/// Plan text format: g_b and accuracy keys plus one write=it,cell,level line
/// per programmed device.
void save_plan(const ProgrammingPlan& plan, std::ostream& out);
ProgrammingPlan load_plan(std::istream& in);

}  // namespace camr
