#include "camr/config.hpp"
#include "camr/experiments.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace camr {

namespace {

std::string sci9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.8e", v);
  return std::string(buf);
}

std::ofstream open_artifact(const std::filesystem::path& dir,
                            const std::string& file) {
  std::ofstream out(dir / file, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write artifact '" + (dir / file).string() +
                             "'");
  }
  return out;
}

CrossbarBank build_bank(const RunConfig& config) {
  CrossbarBank bank(config.n, config.m, config.device, config.g_b);
  for (const auto& w : config.writes) {
    bank.program(w.iteration, w.cell, w.level);
  }
  return bank;
}

int run_verify(const RunConfig& config, const std::filesystem::path& dir) {
  const VerifyReport report = verify_logic(decode_rule(config.rule), config.n,
                                           config.m);
  auto out = open_artifact(dir, "verify_report.txt");
  const std::string verdict = report.pass() ? "PASS" : "FAIL";
  out << "rule " << report.rule_number << " (" << report.n << "x" << report.m
      << "): " << verdict << " "
      << report.inputs_checked - report.mismatch_count << "/"
      << report.inputs_checked << " inputs\n";
  for (const auto& mismatch : report.mismatches) {
    out << "mismatch input=" << mismatch.input << " address=("
        << mismatch.iteration << "," << mismatch.cell << ") expected="
        << mismatch.expected << " actual=" << mismatch.actual << "\n";
  }
  std::cout << "verify rule=" << config.rule << ": " << verdict << " "
            << report.inputs_checked - report.mismatch_count << "/"
            << report.inputs_checked << " inputs\n";
  return report.pass() ? 0 : 1;
}

int run_sweep(const RunConfig& config, const std::filesystem::path& dir) {
  const Rule rule = decode_rule(config.rule);
  const CrossbarBank bank = build_bank(config);
  const SweepResult result = sweep(rule, bank);
  const MirrorReport mirror = mirror_check(result);
  const std::vector<Cluster> clusters = major_clusters(result, config.device);

  {
    auto out = open_artifact(dir, "sweep.csv");
    write_sweep_csv(result, out);
  }
  {
    auto out = open_artifact(dir, "sweep_summary.txt");
    out << "rule=" << result.rule_number << "\n";
    out << "inputs=" << result.records.size() << "\n";
    out << "programmed=";
    for (std::size_t i = 0; i < result.programmed.size(); ++i) {
      out << (i ? " " : "") << "(" << result.programmed[i].iteration << ","
          << result.programmed[i].cell << ")";
    }
    out << "\n";
    out << "clusters=" << clusters.size() << "\n";
    for (const auto& cluster : clusters) {
      out << "cluster lo=" << sci9(cluster.lo) << " hi=" << sci9(cluster.hi)
          << " mean=" << sci9(cluster.mean) << " count=" << cluster.count
          << "\n";
    }
    const char* mirror_text = mirror.status == MirrorStatus::passed ? "passed"
                              : mirror.status == MirrorStatus::failed
                                  ? "failed"
                                  : "skipped (rule not bit-flip symmetric)";
    out << "mirror=" << mirror_text << "\n";
  }
  std::cout << "sweep rule=" << config.rule
            << ": inputs=" << result.records.size()
            << " clusters=" << clusters.size() << " mirror="
            << (mirror.status == MirrorStatus::passed
                    ? "passed"
                    : mirror.status == MirrorStatus::failed ? "failed" : "skipped")
            << "\n";
  return mirror.status == MirrorStatus::failed ? 1 : 0;
}

int run_xor(const RunConfig& config, const std::filesystem::path& dir) {
  const Rule rule = decode_rule(config.rule);
  CrossbarBank bank(config.n, config.m, config.device, config.g_b);
  Address element{0, 0};
  if (config.writes.empty()) {
    // No explicit programming: search for the element that equals the XOR of
    // the chosen pair and place it at the top level.
    const auto derived =
        derive_xor_element(rule, config.n, config.m, config.bit_a, config.bit_b);
    if (!derived) {
      throw std::runtime_error("no trace element equals the XOR of cells " +
                               std::to_string(config.bit_a) + " and " +
                               std::to_string(config.bit_b) + " under rule " +
                               std::to_string(config.rule));
    }
    element = *derived;
    const int top = static_cast<int>(config.device.level_grid().size()) - 1;
    bank.program(element.iteration, element.cell, top);
  } else {
    for (const auto& w : config.writes) {
      bank.program(w.iteration, w.cell, w.level);
    }
    const auto programmed = bank.programmed();
    if (!programmed.empty()) element = programmed.front();
  }

  Bits fixed = config.fixed_bits.empty() ? Bits::Zero(config.n).eval()
                                         : parse_state(config.fixed_bits);
  const XorResult result =
      xor_experiment(rule, bank, config.bit_a, config.bit_b, fixed);
  {
    auto out = open_artifact(dir, "xor.csv");
    write_xor_csv(result, out);
  }
  {
    auto out = open_artifact(dir, "xor_report.txt");
    out << "rule=" << config.rule << "\n";
    out << "pair=(" << config.bit_a << "," << config.bit_b << ")\n";
    out << "element=(" << element.iteration << "," << element.cell << ")\n";
    out << "g_b=" << sci9(bank.g_b()) << "\n";
    out << "xor=" << (result.matches_xor ? "PASS" : "FAIL") << "\n";
  }
  std::cout << "xor rule=" << config.rule << " pair=(" << config.bit_a << ","
            << config.bit_b << ") element=(" << element.iteration << ","
            << element.cell << "): "
            << (result.matches_xor ? "PASS" : "FAIL") << "\n";
  return result.matches_xor ? 0 : 1;
}

int run_ttest(const RunConfig& config, const std::filesystem::path& dir) {
  const Rule rule = decode_rule(config.rule);
  RunConfig effective = config;
  if (effective.writes.empty()) {
    // Default dual programming: the two study elements at the two topmost
    // levels of the grid.
    const int top = static_cast<int>(config.device.level_grid().size()) - 1;
    if (top < 2) {
      throw std::runtime_error(
          "ttest needs either explicit write= entries or a level grid with at "
          "least two programmed levels (levels=hrs,g_a,g_b)");
    }
    effective.writes.push_back(
        {config.address_a.iteration, config.address_a.cell, top - 1});
    effective.writes.push_back(
        {config.address_b.iteration, config.address_b.cell, top});
  }
  const CrossbarBank bank = build_bank(effective);
  const SweepResult result = sweep(rule, bank);
  const LevelStats stats = level_ttest(result, config.address_a, config.address_b);
  {
    auto out = open_artifact(dir, "ttest.csv");
    write_ttest_csv(result, stats, out);
  }
  {
    auto out = open_artifact(dir, "ttest_stats.txt");
    out << "element_a=(" << config.address_a.iteration << ","
        << config.address_a.cell << ")\n";
    out << "element_b=(" << config.address_b.iteration << ","
        << config.address_b.cell << ")\n";
    out << "n_a=" << stats.ttest.n_a << "\n";
    out << "n_b=" << stats.ttest.n_b << "\n";
    out << "mean_a=" << sci9(stats.ttest.mean_a) << "\n";
    out << "mean_b=" << sci9(stats.ttest.mean_b) << "\n";
    out << "sd_a=" << sci9(stats.ttest.sd_a) << "\n";
    out << "sd_b=" << sci9(stats.ttest.sd_b) << "\n";
    out << "t=" << sci9(stats.ttest.t) << "\n";
    out << "dof=" << stats.ttest.dof << "\n";
    out << "p=" << sci9(stats.ttest.p) << "\n";
    out << "significant=" << (stats.significant ? 1 : 0) << "\n";
  }
  char tbuf[32], pbuf[32];
  std::snprintf(tbuf, sizeof tbuf, "%.3f", stats.ttest.t);
  std::snprintf(pbuf, sizeof pbuf, "%.3e", stats.ttest.p);
  std::cout << "ttest rule=" << config.rule << " (" << config.address_a.iteration
            << "," << config.address_a.cell << ")x(" << config.address_b.iteration
            << "," << config.address_b.cell << "): t=" << tbuf << " p=" << pbuf
            << (stats.significant ? " significant" : " not significant") << "\n";
  return 0;
}

int run_train(const RunConfig& config, const std::filesystem::path& dir) {
  if (config.dataset_path.empty()) {
    throw std::runtime_error("train needs dataset=<path>");
  }
  std::ifstream in(config.dataset_path);
  if (!in) {
    throw std::runtime_error("cannot open dataset '" + config.dataset_path + "'");
  }
  const LabeledDataset dataset = load_dataset(in, config.dataset_path);
  const Rule rule = decode_rule(config.rule);
  if (dataset.n() != config.n) {
    throw std::runtime_error("dataset width " + std::to_string(dataset.n()) +
                             " does not match n=" + std::to_string(config.n));
  }
  const Eigen::MatrixXd features = featurize(dataset, rule, config.m);
  const Eigen::VectorXi labels = labels_of(dataset);
  const LinearModel model = train_linear(features, labels, config.train_options);
  const ProgrammingPlan plan =
      quantize_plan(model.weights, model.bias, config.device, features, labels,
                    config.n, config.m);

  // End-to-end fidelity: replay the plan through a fresh ideal bank.
  DeviceParams ideal = DeviceParams::ideal();
  ideal.levels = config.device.level_grid();
  ideal.seed = config.device.seed;
  CrossbarBank replay_bank(config.n, config.m, ideal, plan.g_b);
  apply_plan(replay_bank, plan);
  Eigen::Index correct = 0;
  for (std::size_t i = 0; i < dataset.items.size(); ++i) {
    const TraceMatrix trace =
        run_reservoir(dataset.items[i].input, rule, config.m);
    correct += classify(replay_bank, trace) == dataset.items[i].label;
  }
  const double replay_accuracy =
      static_cast<double>(correct) / static_cast<double>(dataset.items.size());

  {
    auto out = open_artifact(dir, "plan.txt");
    save_plan(plan, out);
  }
  {
    auto out = open_artifact(dir, "train_report.txt");
    out << "rule=" << config.rule << "\n";
    out << "items=" << dataset.items.size() << "\n";
    out << "train_accuracy=" << model.accuracy << "\n";
    out << "hinge_loss=" << sci9(model.hinge_loss) << "\n";
    out << "converged=" << (model.converged ? 1 : 0) << "\n";
    out << "writes=" << plan.writes.size() << "\n";
    out << "g_b=" << sci9(plan.g_b) << "\n";
    out << "achieved_accuracy=" << plan.achieved_accuracy << "\n";
    out << "replay_accuracy=" << replay_accuracy << "\n";
    out << "separable=" << (plan.separable ? 1 : 0) << "\n";
  }
  std::cout << "train rule=" << config.rule << ": items=" << dataset.items.size()
            << " accuracy=" << plan.achieved_accuracy
            << " writes=" << plan.writes.size() << "\n";
  return 0;
}

}  // namespace

int run(const RunConfig& config) {
  try {
    const std::filesystem::path dir(config.out_dir);
    std::filesystem::create_directories(dir);
    switch (config.experiment) {
      case Experiment::verify: return run_verify(config, dir);
      case Experiment::sweep: return run_sweep(config, dir);
      case Experiment::xor_gate: return run_xor(config, dir);
      case Experiment::ttest: return run_ttest(config, dir);
      case Experiment::train: return run_train(config, dir);
    }
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << to_string(config.experiment) << ": " << e.what()
              << "\n";
    return 2;
  }
}

}  // namespace camr
