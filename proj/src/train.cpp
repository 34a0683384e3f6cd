#include "camr/train.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace camr {

namespace {

void require_plan_addresses(const ProgrammingPlan& plan, Eigen::Index n,
                            Eigen::Index m) {
  std::vector<int> seen;
  for (const auto& w : plan.writes) {
    if (w.iteration < 1 || w.iteration > m || w.cell < 1 || w.cell > n) {
      throw std::out_of_range("plan write (" + std::to_string(w.iteration) + "," +
                              std::to_string(w.cell) + ") outside " +
                              std::to_string(m) + "x" + std::to_string(n) +
                              " grid");
    }
    const int flat = (w.iteration - 1) * static_cast<int>(n) + (w.cell - 1);
    if (std::find(seen.begin(), seen.end(), flat) != seen.end()) {
      throw std::domain_error("plan writes the same address twice");
    }
    seen.push_back(flat);
  }
}

struct PlanEval {
  double g_b = 0.0;
  double accuracy = 0.0;
  bool separable = true;
};

// Midpoint threshold and resulting accuracy for per-item conductances.
PlanEval evaluate_threshold(const Eigen::VectorXd& conductance,
                            const Eigen::VectorXi& labels, double top_level) {
  double max_neg = -1.0, min_pos = -1.0;
  bool has_neg = false, has_pos = false;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels[i] > 0) {
      min_pos = has_pos ? std::min(min_pos, conductance[i]) : conductance[i];
      has_pos = true;
    } else {
      max_neg = has_neg ? std::max(max_neg, conductance[i]) : conductance[i];
      has_neg = true;
    }
  }
  PlanEval eval;
  if (has_neg && has_pos) {
    eval.g_b = std::max(0.0, 0.5 * (max_neg + min_pos));
    eval.separable = max_neg < min_pos;
  } else if (has_pos) {
    eval.g_b = std::max(0.0, 0.5 * min_pos);
  } else {
    eval.g_b = max_neg + 0.5 * top_level;
  }
  Eigen::Index correct = 0;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    const int predicted = conductance[i] > eval.g_b ? 1 : -1;
    correct += predicted == labels[i];
  }
  eval.accuracy =
      static_cast<double>(correct) / static_cast<double>(labels.size());
  return eval;
}

// Per-item ideal-mode conductances of a flat level assignment.
Eigen::VectorXd level_conductances(const std::vector<int>& flat_levels,
                                   const Eigen::MatrixXd& features,
                                   const std::vector<double>& grid) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(features.cols());
  for (Eigen::Index j = 0; j < features.cols(); ++j) {
    const int level = flat_levels[static_cast<std::size_t>(j)];
    if (level >= 1) g[j] = grid[static_cast<std::size_t>(level)];
  }
  return features * g;
}

std::size_t write_count(const std::vector<int>& flat_levels) {
  std::size_t count = 0;
  for (int level : flat_levels) count += level >= 1;
  return count;
}

}  // namespace

void LabeledDataset::validate() const {
  const Eigen::Index width = n();
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& item = items[i];
    if (item.input.size() != width) {
      throw std::domain_error("dataset item " + std::to_string(i) +
                              " has width " + std::to_string(item.input.size()) +
                              ", expected " + std::to_string(width));
    }
    for (Eigen::Index j = 0; j < item.input.size(); ++j) {
      if (item.input[j] > 1) {
        throw std::domain_error("dataset item " + std::to_string(i) +
                                " has a non-binary cell");
      }
    }
    if (item.label != 1 && item.label != -1) {
      throw std::domain_error("dataset item " + std::to_string(i) +
                              " has label " + std::to_string(item.label) +
                              ", expected -1 or +1");
    }
  }
}

Eigen::MatrixXd featurize(const LabeledDataset& dataset, const Rule& rule,
                          Eigen::Index m) {
  if (dataset.items.empty()) {
    throw std::domain_error("cannot featurize an empty dataset");
  }
  dataset.validate();
  const Eigen::Index n = dataset.n();
  Eigen::MatrixXd features(static_cast<Eigen::Index>(dataset.items.size()), n * m);
  for (std::size_t i = 0; i < dataset.items.size(); ++i) {
    const TraceMatrix trace = run_reservoir(dataset.items[i].input, rule, m);
    features.row(static_cast<Eigen::Index>(i)) =
        trace.reshaped<Eigen::RowMajor>().transpose().cast<double>();
  }
  return features;
}

Eigen::VectorXi labels_of(const LabeledDataset& dataset) {
  Eigen::VectorXi labels(static_cast<Eigen::Index>(dataset.items.size()));
  for (std::size_t i = 0; i < dataset.items.size(); ++i) {
    labels[static_cast<Eigen::Index>(i)] = dataset.items[i].label;
  }
  return labels;
}

LinearModel train_linear(const Eigen::MatrixXd& features,
                         const Eigen::VectorXi& labels,
                         const TrainOptions& options) {
  const Eigen::Index rows = features.rows();
  const Eigen::Index dim = features.cols();
  if (rows == 0 || dim == 0) {
    throw std::domain_error("training needs a non-empty feature matrix");
  }
  if (labels.size() != rows) {
    throw std::invalid_argument("label count does not match feature rows");
  }
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (labels[i] != 1 && labels[i] != -1) {
      throw std::domain_error("labels must be -1 or +1");
    }
  }
  if (((features.array() != 0.0) && (features.array() != 1.0)).any()) {
    throw std::domain_error("features must be binary");
  }

  const double inv_n = 1.0 / static_cast<double>(rows);
  const Eigen::VectorXd y = labels.cast<double>();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(dim);
  double b = 0.0;

  LinearModel best;
  best.weights = w;
  best.bias = b;
  best.accuracy = -1.0;
  best.hinge_loss = std::numeric_limits<double>::infinity();
  double best_objective = std::numeric_limits<double>::infinity();

  auto evaluate = [&](const Eigen::VectorXd& wk, double bk, int epoch) {
    const Eigen::VectorXd scores = features * wk - Eigen::VectorXd::Constant(rows, bk);
    const Eigen::VectorXd margins = y.cwiseProduct(scores);
    const double hinge = (1.0 - margins.array()).max(0.0).sum() * inv_n;
    Eigen::Index correct = 0;
    for (Eigen::Index i = 0; i < rows; ++i) {
      correct += (scores[i] > 0.0 ? 1 : -1) == labels[i];
    }
    const double accuracy = static_cast<double>(correct) * inv_n;
    const double objective = hinge + options.l2 * wk.squaredNorm();
    if (accuracy > best.accuracy ||
        (accuracy == best.accuracy && objective < best_objective)) {
      best.weights = wk;
      best.bias = bk;
      best.accuracy = accuracy;
      best.hinge_loss = hinge;
      best.epochs_run = epoch;
      best_objective = objective;
    }
    return hinge;
  };

  evaluate(w, b, 0);
  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    const Eigen::VectorXd scores = features * w - Eigen::VectorXd::Constant(rows, b);
    const Eigen::VectorXd margins = y.cwiseProduct(scores);
    // Subgradient of mean hinge + l2 * |w|^2 over margin violators.
    const Eigen::VectorXd active =
        (margins.array() < 1.0).select(y, Eigen::VectorXd::Zero(rows));
    const Eigen::VectorXd grad_w =
        2.0 * options.l2 * w - features.transpose() * active * inv_n;
    const double grad_b = active.sum() * inv_n;
    w -= options.learning_rate * grad_w;
    b -= options.learning_rate * grad_b;
    const double hinge = evaluate(w, b, epoch);
    if (hinge == 0.0) {
      best.converged = true;
      break;
    }
  }
  return best;
}

ProgrammingPlan quantize_plan(const Eigen::VectorXd& weights, double bias,
                              const DeviceParams& params,
                              const Eigen::MatrixXd& features,
                              const Eigen::VectorXi& labels, Eigen::Index n,
                              Eigen::Index m) {
  (void)bias;  // the threshold is re-derived from simulated conductances
  if (weights.size() != n * m) {
    throw std::invalid_argument("weight vector length " +
                                std::to_string(weights.size()) +
                                " does not match n*m = " + std::to_string(n * m));
  }
  if (features.cols() != n * m || features.rows() != labels.size() ||
      labels.size() == 0) {
    throw std::invalid_argument("feature matrix does not match weights/labels");
  }
  params.validate();
  const std::vector<double> grid = params.level_grid();
  const double top_level = grid.back();
  const std::size_t dim = static_cast<std::size_t>(n * m);

  // Nonnegative projection, scale the peak onto the top level, round to the
  // nearest level with ties toward the lower one.
  std::vector<int> flat_levels(dim, 0);
  const double peak = weights.maxCoeff();
  if (peak > 0.0) {
    const double scale = top_level / peak;
    for (std::size_t j = 0; j < dim; ++j) {
      const double target = std::max(0.0, weights[static_cast<Eigen::Index>(j)]) * scale;
      int nearest = 0;
      double nearest_dist = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const double dist = std::fabs(target - grid[k]);
        if (dist < nearest_dist) {
          nearest_dist = dist;
          nearest = static_cast<int>(k);
        }
      }
      flat_levels[j] = nearest;
    }
  }

  auto evaluate = [&](const std::vector<int>& candidate) {
    return evaluate_threshold(level_conductances(candidate, features, grid),
                              labels, top_level);
  };
  PlanEval current = evaluate(flat_levels);

  // Local improvement: accept any single-device level change that strictly
  // raises accuracy.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t j = 0; j < dim; ++j) {
      for (int level = 0; level < static_cast<int>(grid.size()); ++level) {
        if (level == flat_levels[j]) continue;
        std::vector<int> trial = flat_levels;
        trial[j] = level;
        const PlanEval eval = evaluate(trial);
        if (eval.accuracy > current.accuracy) {
          flat_levels = std::move(trial);
          current = eval;
          changed = true;
        }
      }
    }
  }

  // Prune writes that do not pay for themselves (lower conductance reads
  // cheaper), then fall back to the smallest plan that matches.
  changed = true;
  while (changed) {
    changed = false;
    for (std::size_t j = 0; j < dim; ++j) {
      if (flat_levels[j] == 0) continue;
      std::vector<int> trial = flat_levels;
      trial[j] = 0;
      const PlanEval eval = evaluate(trial);
      if (eval.accuracy >= current.accuracy) {
        flat_levels = std::move(trial);
        current = eval;
        changed = true;
      }
    }
  }
  if (write_count(flat_levels) > 1) {
    std::vector<int> simplest(dim, 0);
    PlanEval simplest_eval = evaluate(simplest);
    bool found = simplest_eval.accuracy >= current.accuracy;
    if (!found) {
      for (std::size_t j = 0; j < dim && !found; ++j) {
        for (int level = 1; level < static_cast<int>(grid.size()) && !found;
             ++level) {
          std::vector<int> trial(dim, 0);
          trial[static_cast<std::size_t>(j)] = level;
          const PlanEval eval = evaluate(trial);
          if (eval.accuracy >= current.accuracy) {
            simplest = std::move(trial);
            simplest_eval = eval;
            found = true;
          }
        }
      }
    }
    if (found) {
      flat_levels = std::move(simplest);
      current = simplest_eval;
    }
  }

  ProgrammingPlan plan;
  for (std::size_t j = 0; j < dim; ++j) {
    if (flat_levels[j] >= 1) {
      const int iteration = static_cast<int>(j) / static_cast<int>(n) + 1;
      const int cell = static_cast<int>(j) % static_cast<int>(n) + 1;
      plan.writes.push_back({iteration, cell, flat_levels[j]});
    }
  }
  plan.g_b = current.g_b;
  plan.achieved_accuracy = current.accuracy;
  plan.separable = current.separable;
  return plan;
}

ProgrammingPlan exhaustive_oracle(const LabeledDataset& dataset, const Rule& rule,
                                  Eigen::Index n, Eigen::Index m,
                                  const DeviceParams& params) {
  const Eigen::Index device_count = n * m;
  if (device_count > 16) {
    throw std::domain_error("exhaustive oracle refuses n*m = " +
                            std::to_string(device_count) + " devices (max 16)");
  }
  params.validate();
  const std::vector<double> grid = params.level_grid();
  const int top = static_cast<int>(grid.size()) - 1;
  const double top_g = grid.back();

  const Eigen::MatrixXd features = featurize(dataset, rule, m);
  const Eigen::VectorXi labels = labels_of(dataset);
  const int item_count = static_cast<int>(features.rows());
  std::vector<std::uint32_t> feature_masks(static_cast<std::size_t>(item_count), 0);
  for (int i = 0; i < item_count; ++i) {
    for (Eigen::Index j = 0; j < device_count; ++j) {
      if (features(i, j) != 0.0) {
        feature_masks[static_cast<std::size_t>(i)] |= 1u << j;
      }
    }
  }

  const int bits = static_cast<int>(device_count);
  int best_correct = -1;
  std::uint32_t best_mask = 0;
  int best_k = 0;
  std::vector<int> hist_pos(static_cast<std::size_t>(bits + 1));
  std::vector<int> hist_neg(static_cast<std::size_t>(bits + 1));
  for (std::uint64_t mask = 0; mask < (1ull << bits); ++mask) {
    std::fill(hist_pos.begin(), hist_pos.end(), 0);
    std::fill(hist_neg.begin(), hist_neg.end(), 0);
    for (int i = 0; i < item_count; ++i) {
      const int count = std::popcount(static_cast<std::uint32_t>(mask) &
                                      feature_masks[static_cast<std::size_t>(i)]);
      (labels[i] > 0 ? hist_pos : hist_neg)[static_cast<std::size_t>(count)]++;
    }
    // Threshold k classifies +1 iff the enabled-write count exceeds k. k >= 0
    // keeps g_b >= 0; an all-positive classifier is unreachable when some
    // item enables no programmed device.
    int pos_above = 0;
    for (int c = 1; c <= bits; ++c) pos_above += hist_pos[static_cast<std::size_t>(c)];
    int neg_below = hist_neg[0];
    for (int k = 0; k <= bits; ++k) {
      const int correct = neg_below + pos_above;
      if (correct > best_correct) {
        best_correct = correct;
        best_mask = static_cast<std::uint32_t>(mask);
        best_k = k;
      }
      if (k < bits) {
        pos_above -= hist_pos[static_cast<std::size_t>(k + 1)];
        neg_below += hist_neg[static_cast<std::size_t>(k + 1)];
      }
    }
  }

  ProgrammingPlan plan;
  for (int j = 0; j < bits; ++j) {
    if (best_mask & (1u << j)) {
      plan.writes.push_back({j / static_cast<int>(n) + 1,
                             j % static_cast<int>(n) + 1, top});
    }
  }
  plan.g_b = top_g * (static_cast<double>(best_k) + 0.5);
  plan.achieved_accuracy =
      static_cast<double>(best_correct) / static_cast<double>(item_count);
  plan.separable = plan.achieved_accuracy == 1.0;
  return plan;
}

Eigen::VectorXd simulate_plan(const ProgrammingPlan& plan,
                              const Eigen::MatrixXd& features,
                              const DeviceParams& params, Eigen::Index n) {
  const Eigen::Index dim = features.cols();
  require_plan_addresses(plan, n, dim / n);
  const std::vector<double> grid = params.level_grid();
  std::vector<int> flat_levels(static_cast<std::size_t>(dim), 0);
  for (const auto& w : plan.writes) {
    if (w.level < 0 || static_cast<std::size_t>(w.level) >= grid.size()) {
      throw std::domain_error("plan level " + std::to_string(w.level) +
                              " outside grid of " + std::to_string(grid.size()) +
                              " levels");
    }
    flat_levels[static_cast<std::size_t>((w.iteration - 1) * n + (w.cell - 1))] =
        w.level;
  }
  return level_conductances(flat_levels, features, grid);
}

double plan_accuracy(const ProgrammingPlan& plan, const Eigen::MatrixXd& features,
                     const Eigen::VectorXi& labels, const DeviceParams& params,
                     Eigen::Index n) {
  const Eigen::VectorXd conductance = simulate_plan(plan, features, params, n);
  Eigen::Index correct = 0;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    correct += (conductance[i] > plan.g_b ? 1 : -1) == labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

void apply_plan(CrossbarBank& bank, const ProgrammingPlan& plan) {
  require_plan_addresses(plan, bank.n(), bank.m());
  for (const auto& w : plan.writes) {
    bank.program(w.iteration, w.cell, w.level);
  }
  bank.set_g_b(plan.g_b);
}

LabeledDataset load_dataset(std::istream& in, const std::string& name) {
  LabeledDataset dataset;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string bits, label;
    if (!(ss >> bits >> label)) {
      throw std::runtime_error(name + ":" + std::to_string(lineno) +
                               ": expected '<bits> <label>'");
    }
    LabeledItem item;
    try {
      item.input = parse_state(bits);
    } catch (const std::exception& e) {
      throw std::runtime_error(name + ":" + std::to_string(lineno) + ": " +
                               e.what());
    }
    if (label == "+1") {
      item.label = 1;
    } else if (label == "-1") {
      item.label = -1;
    } else {
      throw std::runtime_error(name + ":" + std::to_string(lineno) +
                               ": label must be '+1' or '-1', got '" + label +
                               "'");
    }
    dataset.items.push_back(std::move(item));
  }
  dataset.validate();
  return dataset;
}

void save_dataset(const LabeledDataset& dataset, std::ostream& out) {
  for (const auto& item : dataset.items) {
    out << format_state(item.input) << ' ' << (item.label > 0 ? "+1" : "-1")
        << '\n';
  }
}

void save_plan(const ProgrammingPlan& plan, std::ostream& out) {
  char buf[64];
  out << "plan v1\n";
  std::snprintf(buf, sizeof buf, "%.17g", plan.g_b);
  out << "g_b=" << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", plan.achieved_accuracy);
  out << "achieved_accuracy=" << buf << "\n";
  out << "separable=" << (plan.separable ? 1 : 0) << "\n";
  for (const auto& w : plan.writes) {
    out << "write=" << w.iteration << "," << w.cell << "," << w.level << "\n";
  }
}

ProgrammingPlan load_plan(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "plan v1") {
    throw std::runtime_error("plan file: missing 'plan v1' header");
  }
  ProgrammingPlan plan;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("plan file line " + std::to_string(lineno) +
                               ": expected key=value");
    }
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "g_b") {
      plan.g_b = std::stod(value);
    } else if (key == "achieved_accuracy") {
      plan.achieved_accuracy = std::stod(value);
    } else if (key == "separable") {
      plan.separable = value != "0";
    } else if (key == "write") {
      Write w;
      if (std::sscanf(value.c_str(), "%d,%d,%d", &w.iteration, &w.cell,
                      &w.level) != 3) {
        throw std::runtime_error("plan file line " + std::to_string(lineno) +
                                 ": malformed write entry");
      }
      plan.writes.push_back(w);
    } else {
      throw std::runtime_error("plan file line " + std::to_string(lineno) +
                               ": unknown key '" + key + "'");
    }
  }
  return plan;
}

}  // namespace camr
