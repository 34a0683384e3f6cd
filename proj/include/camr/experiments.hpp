// Simulated measurement suite: logic verification against an independent
// reference, full input sweeps, gap clustering, mirror symmetry, the XOR
// demonstration and the two-level t-test.
#pragma once

#include "camr/bank.hpp"
#include "camr/eca.hpp"
#include "camr/stats.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace camr {

struct Mismatch {
  std::uint64_t input = 0;
  int iteration = 0;
  int cell = 0;
  int expected = 0;
  int actual = 0;
};

struct VerifyReport {
  int rule_number = 0;
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  std::uint64_t inputs_checked = 0;
  std::uint64_t mismatch_count = 0;
  std::vector<Mismatch> mismatches;  // first 100 kept

  bool pass() const { return mismatch_count == 0; }
};

using StepFn = std::function<Bits(const Eigen::Ref<const Bits>&, const Rule&)>;

/// Compares the reservoir over every 2^n input, cell by cell, against a
/// reference evolution coded independently of the eca module (the response
/// is read straight off the rule number). `step_override` substitutes the
/// implementation under test; the default checks camr::step.
VerifyReport verify_logic(const Rule& rule, Eigen::Index n, Eigen::Index m,
                          const StepFn& step_override = {});

struct SweepRecord {
  std::uint64_t input = 0;
  double g_sigma = 0.0;  // S
  int cls = 0;           // -1 or +1
  std::vector<std::uint8_t> enabled;  // trace bit per programmed address
};

struct SweepResult {
  int rule_number = 0;
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  double g_b = 0.0;
  std::vector<Address> programmed;
  std::vector<SweepRecord> records;  // one per input, ordered by value
};

/// Reads the bank under every possible input. Refuses n > 20.
SweepResult sweep(const Rule& rule, const CrossbarBank& bank);

enum class MirrorStatus { passed, failed, skipped_not_symmetric };

struct MirrorReport {
  MirrorStatus status = MirrorStatus::passed;
  std::uint64_t first_mismatch = 0;  // input x with G(x) != G(2^n-1-x)
};

/// Asserts G(x) == G(2^n - 1 - x) exactly for every input. Rules without
/// bit-flip symmetry are flagged and skipped rather than failed.
MirrorReport mirror_check(const SweepResult& sweep_result);

struct Cluster {
  double lo = 0.0;
  double hi = 0.0;
  double mean = 0.0;
  std::size_t count = 0;
};

/// 1-D gap clustering: sorts values and splits where consecutive values
/// differ by more than `gap`.
std::vector<Cluster> find_clusters(std::span<const double> values, double gap);

/// Clusters a sweep's conductances at the standard gap of 25% of lrs_nominal.
std::vector<Cluster> major_clusters(const SweepResult& sweep_result,
                                    const DeviceParams& params);

/// Index of the cluster containing `value`, or -1.
int cluster_index(const std::vector<Cluster>& clusters, double value);

struct XorRow {
  int bit_a = 0;
  int bit_b = 0;
  std::uint64_t input = 0;
  double g_sigma = 0.0;
  int cls = 0;
};

struct XorResult {
  std::array<XorRow, 4> rows;  // (0,0), (0,1), (1,0), (1,1)
  bool matches_xor = false;    // class +1 read as true
};

/// Classifies the four combinations of cells (cell_a, cell_b) with every
/// other cell pinned to `fixed` (positions a and b of `fixed` are ignored).
XorResult xor_experiment(const Rule& rule, const CrossbarBank& bank, int cell_a,
                         int cell_b, const Eigen::Ref<const Bits>& fixed);

/// Searches the trace grid for an element whose state equals
/// input[cell_a] XOR input[cell_b] over all 2^n inputs. Returns the first
/// match in iteration-major order, if any. Refuses n > 20.
std::optional<Address> derive_xor_element(const Rule& rule, Eigen::Index n,
                                          Eigen::Index m, int cell_a, int cell_b);

struct LevelStats {
  std::vector<int> assignment;  // per input: 0 neither, 1 only a, 2 only b, 3 both
  TTestResult ttest;
  bool significant = false;  // p < 0.001
};

/// Pooled t-test between the conductances where exactly one of the two
/// programmed elements is enabled. Throws std::invalid_argument when an
/// address is not programmed, std::runtime_error when a partition is empty.
LevelStats level_ttest(const SweepResult& sweep_result, const Address& addr_a,
                       const Address& addr_b);

/// CSV emission, conductances in scientific notation at 9 significant digits.
void write_sweep_csv(const SweepResult& sweep_result, std::ostream& out);
void write_xor_csv(const XorResult& result, std::ostream& out);
void write_ttest_csv(const SweepResult& sweep_result, const LevelStats& stats,
                     std::ostream& out);

}  // namespace camr
