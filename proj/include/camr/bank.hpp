// 1T1R crossbar model: per-element programming, trace-gated conductance
// summation and threshold classification.
//
// Every device sits at a grid address (iteration 1..m, cell 1..n) mirroring
// the reservoir trace. A trace bit of 1 enables the device; enabled devices
// contribute their programmed conductance (level >= 1) or the parasitic
// conductance of an unprogrammed element (level 0). Variation is sampled once
// at programming time from a seeded generator, so repeated reads are exact
// replays.
#pragma once

#include "camr/eca.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

namespace camr {

/// 1-based device address, written (iteration, cell).
struct Address {
  int iteration = 0;
  int cell = 0;

  friend bool operator==(const Address&, const Address&) = default;
};

struct DeviceParams {
  double lrs_nominal = 1.5e-3;       // S
  double lrs_sigma = 0.02;           // relative std-dev of programmed levels
  double hrs_nominal = 1.0e-6;       // S
  double hrs_sigma = 0.0;            // relative std-dev of the HRS state
  double parasitic_enabled = 15e-6;  // S contributed by an enabled level-0 device
  std::vector<double> levels;        // nominal conductance per level; empty = {hrs, lrs}
  std::uint64_t seed = 1;

  /// The effective level grid: `levels` if set, else {hrs_nominal, lrs_nominal}.
  std::vector<double> level_grid() const;

  /// Parameters with no variation, no HRS leakage and no parasitics.
  static DeviceParams ideal();

  /// Throws std::domain_error on negative conductances, lrs <= hrs, or a
  /// non-increasing level grid.
  void validate() const;

  friend bool operator==(const DeviceParams&, const DeviceParams&) = default;
};

/// An m x n grid of 1T1R devices plus the classification threshold g_b.
///
/// Mutation happens only through program(); reads are const and safe to run
/// concurrently against a frozen bank.
class CrossbarBank {
 public:
  /// Creates a bank with every device at level 0, its conductance sampled
  /// from the seeded HRS distribution. Identical params (including seed)
  /// reproduce identical banks.
  CrossbarBank(Eigen::Index n, Eigen::Index m, DeviceParams params, double g_b);

  Eigen::Index n() const { return n_; }
  Eigen::Index m() const { return m_; }
  Eigen::Index device_count() const { return n_ * m_; }
  double g_b() const { return g_b_; }
  void set_g_b(double g_b);
  const DeviceParams& params() const { return params_; }

  /// Programs one device to a level index, resampling its conductance as
  /// levels[level] * (1 + eps) with eps ~ N(0, sigma), clamped to >= 0.
  /// Throws std::out_of_range on a bad address, std::domain_error on a bad level.
  void program(Eigen::Index iteration, Eigen::Index cell, int level);
  void program(const Address& address, int level) {
    program(address.iteration, address.cell, level);
  }

  int level_at(Eigen::Index iteration, Eigen::Index cell) const;
  double conductance_at(Eigen::Index iteration, Eigen::Index cell) const;

  /// Addresses of all level >= 1 devices in iteration-major order.
  std::vector<Address> programmed() const;

  /// m x n grid of per-device read contributions: g_actual for programmed
  /// devices, parasitic_enabled for level-0 devices.
  const Eigen::MatrixXd& effective() const { return g_eff_; }

  /// m x n grid of sampled conductances (every device, including level 0).
  const Eigen::MatrixXd& actual() const { return g_actual_; }

  /// Restores a device without sampling; used when reloading a saved bank.
  void restore_device(Eigen::Index iteration, Eigen::Index cell, int level,
                      double g_actual);

 private:
  void check_address(Eigen::Index iteration, Eigen::Index cell) const;
  double sample(int level);

  Eigen::Index n_ = 0;
  Eigen::Index m_ = 0;
  DeviceParams params_;
  double g_b_ = 0.0;
  Eigen::MatrixXi levels_;     // m x n, row g-1 = iteration g
  Eigen::MatrixXd g_actual_;   // m x n
  Eigen::MatrixXd g_eff_;      // m x n cache kept in sync with levels_
  std::mt19937_64 rng_;
};

/// Eq.-style gated summation: sum of trace_bit * effective conductance over
/// the whole grid (canonical flattening is iteration-major, cell-minor).
/// Throws std::invalid_argument when trace and bank dimensions differ.
double read_conductance(const CrossbarBank& bank, const TraceMatrix& trace);

/// +1 when read_conductance exceeds g_b, else -1 (exact equality maps to -1).
int classify(const CrossbarBank& bank, const TraceMatrix& trace);

/// Text snapshot: params, seed, g_b and one line per device with g_actual at
/// 9 significant digits. Sampled conductances are quantized to 9 significant
/// digits, so reloading reproduces read_conductance bit-exactly.
void save_bank(const CrossbarBank& bank, std::ostream& out);
CrossbarBank load_bank(std::istream& in);

}  // namespace camr
