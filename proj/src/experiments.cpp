#include "camr/experiments.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace camr {

namespace {

constexpr Eigen::Index kMaxSweepWidth = 20;

void require_sweepable(Eigen::Index n) {
  if (n > kMaxSweepWidth) {
    throw std::domain_error("refusing to enumerate 2^" + std::to_string(n) +
                            " inputs (max n = " +
                            std::to_string(kMaxSweepWidth) + ")");
  }
}

// Reference evolution kept deliberately separate from camr::step: plain
// int vectors, explicit wraparound arithmetic, response bits read straight
// off the rule number.
std::vector<int> reference_next(const std::vector<int>& cells, int rule_number) {
  const int n = static_cast<int>(cells.size());
  std::vector<int> next(cells.size());
  for (int i = 0; i < n; ++i) {
    int left = i == 0 ? cells[static_cast<std::size_t>(n - 1)]
                      : cells[static_cast<std::size_t>(i - 1)];
    int right = i == n - 1 ? cells[0] : cells[static_cast<std::size_t>(i + 1)];
    int neighborhood = left * 4 + cells[static_cast<std::size_t>(i)] * 2 + right;
    next[static_cast<std::size_t>(i)] = (rule_number >> neighborhood) & 1;
  }
  return next;
}

std::vector<int> reference_input(std::uint64_t value, Eigen::Index n) {
  std::vector<int> cells(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    cells[static_cast<std::size_t>(i)] =
        static_cast<int>((value >> (n - 1 - i)) & 1);
  }
  return cells;
}

std::string sci9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.8e", v);
  return std::string(buf);
}

}  // namespace

VerifyReport verify_logic(const Rule& rule, Eigen::Index n, Eigen::Index m,
                          const StepFn& step_override) {
  require_sweepable(n);
  VerifyReport report;
  report.rule_number = rule.number;
  report.n = n;
  report.m = m;
  const std::uint64_t input_count = 1ull << n;
  for (std::uint64_t value = 0; value < input_count; ++value) {
    // Implementation under test.
    TraceMatrix trace;
    if (step_override) {
      trace.resize(m, n);
      Bits current = state_from_value(value, n);
      for (Eigen::Index g = 0; g < m; ++g) {
        current = step_override(current, rule);
        trace.row(g) = current.transpose();
      }
    } else {
      trace = run_reservoir(state_from_value(value, n), rule, m);
    }
    // Independent reference.
    std::vector<int> cells = reference_input(value, n);
    for (Eigen::Index g = 1; g <= m; ++g) {
      cells = reference_next(cells, rule.number);
      for (Eigen::Index c = 1; c <= n; ++c) {
        const int expected = cells[static_cast<std::size_t>(c - 1)];
        const int actual = trace(g - 1, c - 1);
        if (expected != actual) {
          ++report.mismatch_count;
          if (report.mismatches.size() < 100) {
            report.mismatches.push_back({value, static_cast<int>(g),
                                         static_cast<int>(c), expected, actual});
          }
        }
      }
    }
    ++report.inputs_checked;
  }
  return report;
}

SweepResult sweep(const Rule& rule, const CrossbarBank& bank) {
  require_sweepable(bank.n());
  SweepResult result;
  result.rule_number = rule.number;
  result.n = bank.n();
  result.m = bank.m();
  result.g_b = bank.g_b();
  result.programmed = bank.programmed();
  const std::uint64_t input_count = 1ull << bank.n();
  result.records.reserve(input_count);
  for (std::uint64_t value = 0; value < input_count; ++value) {
    const TraceMatrix trace =
        run_reservoir(state_from_value(value, bank.n()), rule, bank.m());
    SweepRecord record;
    record.input = value;
    record.g_sigma = read_conductance(bank, trace);
    record.cls = record.g_sigma > bank.g_b() ? 1 : -1;
    record.enabled.reserve(result.programmed.size());
    for (const auto& address : result.programmed) {
      record.enabled.push_back(cell_state(trace, address.iteration, address.cell));
    }
    result.records.push_back(std::move(record));
  }
  return result;
}

MirrorReport mirror_check(const SweepResult& sweep_result) {
  MirrorReport report;
  if (!bit_flip_symmetric(decode_rule(sweep_result.rule_number))) {
    report.status = MirrorStatus::skipped_not_symmetric;
    return report;
  }
  const std::uint64_t input_count = sweep_result.records.size();
  for (std::uint64_t value = 0; value < input_count; ++value) {
    const std::uint64_t partner = input_count - 1 - value;
    if (sweep_result.records[value].g_sigma !=
        sweep_result.records[partner].g_sigma) {
      report.status = MirrorStatus::failed;
      report.first_mismatch = value;
      return report;
    }
  }
  report.status = MirrorStatus::passed;
  return report;
}

std::vector<Cluster> find_clusters(std::span<const double> values, double gap) {
  std::vector<Cluster> clusters;
  if (values.empty()) return clusters;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  Cluster current{sorted.front(), sorted.front(), 0.0, 0};
  double sum = 0.0;
  for (double v : sorted) {
    if (current.count > 0 && v - current.hi > gap) {
      current.mean = sum / static_cast<double>(current.count);
      clusters.push_back(current);
      current = Cluster{v, v, 0.0, 0};
      sum = 0.0;
    }
    current.hi = v;
    sum += v;
    ++current.count;
  }
  current.mean = sum / static_cast<double>(current.count);
  clusters.push_back(current);
  return clusters;
}

std::vector<Cluster> major_clusters(const SweepResult& sweep_result,
                                    const DeviceParams& params) {
  std::vector<double> values;
  values.reserve(sweep_result.records.size());
  for (const auto& record : sweep_result.records) {
    values.push_back(record.g_sigma);
  }
  return find_clusters(values, 0.25 * params.lrs_nominal);
}

int cluster_index(const std::vector<Cluster>& clusters, double value) {
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    if (value >= clusters[i].lo && value <= clusters[i].hi) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

XorResult xor_experiment(const Rule& rule, const CrossbarBank& bank, int cell_a,
                         int cell_b, const Eigen::Ref<const Bits>& fixed) {
  const Eigen::Index n = bank.n();
  if (cell_a == cell_b) {
    throw std::domain_error("xor experiment needs two distinct cells");
  }
  if (cell_a < 1 || cell_a > n || cell_b < 1 || cell_b > n) {
    throw std::out_of_range("xor cells must lie in [1, " + std::to_string(n) +
                            "]");
  }
  if (fixed.size() != n) {
    throw std::invalid_argument("fixed-bit state must have width n");
  }
  XorResult result;
  static constexpr int combos[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  for (int i = 0; i < 4; ++i) {
    Bits state = fixed;
    state[cell_a - 1] = static_cast<std::uint8_t>(combos[i][0]);
    state[cell_b - 1] = static_cast<std::uint8_t>(combos[i][1]);
    const TraceMatrix trace = run_reservoir(state, rule, bank.m());
    XorRow& row = result.rows[static_cast<std::size_t>(i)];
    row.bit_a = combos[i][0];
    row.bit_b = combos[i][1];
    row.input = state_value(state);
    row.g_sigma = read_conductance(bank, trace);
    row.cls = row.g_sigma > bank.g_b() ? 1 : -1;
  }
  result.matches_xor = result.rows[0].cls == -1 && result.rows[1].cls == 1 &&
                       result.rows[2].cls == 1 && result.rows[3].cls == -1;
  return result;
}

std::optional<Address> derive_xor_element(const Rule& rule, Eigen::Index n,
                                          Eigen::Index m, int cell_a,
                                          int cell_b) {
  require_sweepable(n);
  if (cell_a == cell_b || cell_a < 1 || cell_a > n || cell_b < 1 || cell_b > n) {
    throw std::domain_error("xor derivation needs two distinct cells in range");
  }
  const std::uint64_t input_count = 1ull << n;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> candidate(m, n);
  candidate.setConstant(true);
  for (std::uint64_t value = 0; value < input_count; ++value) {
    const Bits state = state_from_value(value, n);
    const std::uint8_t expected = state[cell_a - 1] ^ state[cell_b - 1];
    const TraceMatrix trace = run_reservoir(state, rule, m);
    for (Eigen::Index r = 0; r < m; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) {
        if (candidate(r, c) && trace(r, c) != expected) candidate(r, c) = false;
      }
    }
  }
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      if (candidate(r, c)) {
        return Address{static_cast<int>(r + 1), static_cast<int>(c + 1)};
      }
    }
  }
  return std::nullopt;
}

LevelStats level_ttest(const SweepResult& sweep_result, const Address& addr_a,
                       const Address& addr_b) {
  auto find = [&](const Address& address) {
    const auto it = std::find(sweep_result.programmed.begin(),
                              sweep_result.programmed.end(), address);
    if (it == sweep_result.programmed.end()) {
      throw std::invalid_argument("address (" + std::to_string(address.iteration) +
                                  "," + std::to_string(address.cell) +
                                  ") is not programmed in this sweep");
    }
    return static_cast<std::size_t>(it - sweep_result.programmed.begin());
  };
  const std::size_t index_a = find(addr_a);
  const std::size_t index_b = find(addr_b);

  LevelStats stats;
  stats.assignment.reserve(sweep_result.records.size());
  std::vector<double> only_a, only_b;
  for (const auto& record : sweep_result.records) {
    const bool a = record.enabled[index_a] != 0;
    const bool b = record.enabled[index_b] != 0;
    stats.assignment.push_back((a ? 1 : 0) | (b ? 2 : 0));
    if (a && !b) only_a.push_back(record.g_sigma);
    if (b && !a) only_b.push_back(record.g_sigma);
  }
  if (only_a.empty() || only_b.empty()) {
    throw std::runtime_error(
        "insufficient data: no inputs enable exactly one of the two elements");
  }
  stats.ttest = pooled_ttest(only_a, only_b);
  stats.significant = stats.ttest.p < 1e-3;
  return stats;
}

void write_sweep_csv(const SweepResult& sweep_result, std::ostream& out) {
  out << "input,g_sigma_siemens,class";
  for (const auto& address : sweep_result.programmed) {
    out << ",enabled_" << address.iteration << "_" << address.cell;
  }
  out << "\n";
  for (const auto& record : sweep_result.records) {
    out << record.input << "," << sci9(record.g_sigma) << "," << record.cls;
    for (const std::uint8_t bit : record.enabled) {
      out << "," << static_cast<int>(bit);
    }
    out << "\n";
  }
}

void write_xor_csv(const XorResult& result, std::ostream& out) {
  out << "bit_a,bit_b,input,g_sigma_siemens,class,xor_expected\n";
  for (const auto& row : result.rows) {
    out << row.bit_a << "," << row.bit_b << "," << row.input << ","
        << sci9(row.g_sigma) << "," << row.cls << ","
        << ((row.bit_a ^ row.bit_b) ? 1 : -1) << "\n";
  }
}

void write_ttest_csv(const SweepResult& sweep_result, const LevelStats& stats,
                     std::ostream& out) {
  out << "input,g_sigma_siemens,class,enabled_a,enabled_b,group\n";
  for (std::size_t i = 0; i < sweep_result.records.size(); ++i) {
    const auto& record = sweep_result.records[i];
    const int group = stats.assignment[i];
    out << record.input << "," << sci9(record.g_sigma) << "," << record.cls << ","
        << (group & 1) << "," << ((group >> 1) & 1) << "," << group << "\n";
  }
}

}  // namespace camr
