#include "camr/bank.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "helpers.hpp"

using namespace camr;
using namespace camr::testing;

namespace {

TraceMatrix random_trace(std::mt19937& rng, Eigen::Index m, Eigen::Index n) {
  TraceMatrix trace(m, n);
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      trace(r, c) = static_cast<std::uint8_t>(rng() % 2);
    }
  }
  return trace;
}

}  // namespace

TEST_CASE("device params validation") {
  DeviceParams params;
  CHECK_NOTHROW(params.validate());

  params.lrs_nominal = -1.0;
  CHECK_THROWS_AS(params.validate(), std::domain_error);

  params = DeviceParams{};
  params.hrs_nominal = 2e-3;  // above lrs
  CHECK_THROWS_AS(params.validate(), std::domain_error);

  params = DeviceParams{};
  params.levels = {1e-6, 1e-6};
  CHECK_THROWS_AS(params.validate(), std::domain_error);

  CHECK(DeviceParams{}.level_grid() == std::vector<double>{1e-6, 1.5e-3});
}

TEST_CASE("a fresh bank has 56 level-0 devices at the default size") {
  const CrossbarBank bank(8, 7, DeviceParams{}, 1.2e-3);
  CHECK(bank.device_count() == 56);
  for (Eigen::Index it = 1; it <= 7; ++it) {
    for (Eigen::Index cell = 1; cell <= 8; ++cell) {
      CHECK(bank.level_at(it, cell) == 0);
    }
  }
}

TEST_CASE("an ideal unprogrammed bank reads zero under any trace") {
  const CrossbarBank bank(8, 7, DeviceParams::ideal(), 1.2e-3);
  std::mt19937 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    CHECK(read_conductance(bank, random_trace(rng, 7, 8)) == 0.0);
  }
}

TEST_CASE("equal seeds reproduce identical banks") {
  DeviceParams params;
  params.hrs_sigma = 0.1;
  params.seed = 42;
  const CrossbarBank a(8, 7, params, 1.2e-3);
  const CrossbarBank b(8, 7, params, 1.2e-3);
  CHECK(a.actual() == b.actual());

  params.seed = 43;
  const CrossbarBank c(8, 7, params, 1.2e-3);
  CHECK(a.actual() != c.actual());
}

TEST_CASE("programming with zero sigma lands exactly on the level nominal") {
  DeviceParams params;
  params.lrs_sigma = 0.0;
  CrossbarBank bank(8, 7, params, 1.2e-3);
  bank.program(2, 7, 1);
  CHECK(bank.conductance_at(2, 7) == 1.5e-3);
  CHECK(bank.level_at(2, 7) == 1);

  CHECK_THROWS_AS(bank.program(8, 1, 1), std::out_of_range);
  CHECK_THROWS_AS(bank.program(0, 1, 1), std::out_of_range);
  CHECK_THROWS_AS(bank.program(1, 9, 1), std::out_of_range);
  CHECK_THROWS_AS(bank.program(1, 1, 2), std::domain_error);
  CHECK_THROWS_AS(bank.program(1, 1, -1), std::domain_error);
}

TEST_CASE("two devices programmed with sigma > 0 differ") {
  DeviceParams params;  // lrs_sigma = 2%
  CrossbarBank bank(8, 7, params, 1.2e-3);
  bank.program(2, 7, 1);
  bank.program(4, 7, 1);
  CHECK(bank.conductance_at(2, 7) != bank.conductance_at(4, 7));
}

TEST_CASE("read_conductance matches an element-by-element oracle") {
  std::mt19937 rng(17);
  DeviceParams params;
  params.seed = 11;
  for (int trial = 0; trial < 30; ++trial) {
    CrossbarBank bank(4, 3, params, 1e-3);
    for (Eigen::Index it = 1; it <= 3; ++it) {
      for (Eigen::Index cell = 1; cell <= 4; ++cell) {
        if (rng() % 2) bank.program(it, cell, 1);
      }
    }
    const TraceMatrix trace = random_trace(rng, 3, 4);

    // Independent accumulation, cell-major to vary the order.
    double expected = 0.0;
    for (Eigen::Index cell = 1; cell <= 4; ++cell) {
      for (Eigen::Index it = 1; it <= 3; ++it) {
        if (!trace(it - 1, cell - 1)) continue;
        expected += bank.level_at(it, cell) >= 1 ? bank.conductance_at(it, cell)
                                                 : params.parasitic_enabled;
      }
    }
    CHECK(read_conductance(bank, trace) == doctest::Approx(expected).epsilon(1e-12));
  }

  CrossbarBank bank(4, 3, params, 1e-3);
  CHECK_THROWS_AS(read_conductance(bank, TraceMatrix::Zero(4, 3)), std::invalid_argument);
}

TEST_CASE("an all-zero trace reads zero regardless of programming") {
  CrossbarBank bank(8, 7, DeviceParams{}, 1.2e-3);
  bank.program(2, 7, 1);
  bank.program(4, 7, 1);
  CHECK(read_conductance(bank, TraceMatrix::Zero(7, 8)) == 0.0);
}

TEST_CASE("a single enabled device reads exactly its conductance") {
  CrossbarBank bank(8, 7, DeviceParams::ideal(), 1.2e-3);
  bank.program(2, 7, 1);
  TraceMatrix trace = TraceMatrix::Zero(7, 8);
  trace(1, 6) = 1;
  CHECK(read_conductance(bank, trace) == bank.conductance_at(2, 7));
  CHECK(read_conductance(bank, trace) == 1.5e-3);
  CHECK(classify(bank, trace) == 1);  // 1.5 mS > 1.2 mS
}

TEST_CASE("classification thresholds at g_b with ties resolving to -1") {
  CrossbarBank bank(8, 7, DeviceParams::ideal(), 1.2e-3);
  CHECK(classify(bank, TraceMatrix::Ones(7, 8)) == -1);  // reads 0

  // A bank whose only conductance equals g_b exactly classifies -1.
  DeviceParams params = DeviceParams::ideal();
  params.levels = {0.0, 1.2e-3};
  CrossbarBank tie(8, 7, params, 1.2e-3);
  tie.program(1, 1, 1);
  TraceMatrix trace = TraceMatrix::Zero(7, 8);
  trace(0, 0) = 1;
  CHECK(read_conductance(tie, trace) == 1.2e-3);
  CHECK(classify(tie, trace) == -1);
}

TEST_CASE("reads are additive over device partitions") {
  std::mt19937 rng(5);
  DeviceParams params = DeviceParams::ideal();
  params.lrs_sigma = 0.05;
  params.seed = 21;
  CrossbarBank full(6, 5, params, 1e-3);
  CrossbarBank part_a(6, 5, params, 1e-3);
  CrossbarBank part_b(6, 5, params, 1e-3);
  for (Eigen::Index it = 1; it <= 5; ++it) {
    for (Eigen::Index cell = 1; cell <= 6; ++cell) {
      if (rng() % 2) continue;  // leave at HRS
      full.program(it, cell, 1);
      // Mirror the sampled conductance into exactly one partition.
      if (rng() % 2) {
        part_a.restore_device(it, cell, 1, full.conductance_at(it, cell));
      } else {
        part_b.restore_device(it, cell, 1, full.conductance_at(it, cell));
      }
    }
  }
  for (int trial = 0; trial < 10; ++trial) {
    const TraceMatrix trace = random_trace(rng, 5, 6);
    const double whole = read_conductance(full, trace);
    const double split = read_conductance(part_a, trace) + read_conductance(part_b, trace);
    CHECK(whole == doctest::Approx(split).epsilon(1e-12));
  }
}

TEST_CASE("programming HRS to LRS never decreases a read") {
  std::mt19937 rng(9);
  DeviceParams params;
  params.seed = 33;
  CrossbarBank bank(8, 7, params, 1.2e-3);
  int programmed = 0;
  while (programmed < 30) {
    const TraceMatrix trace = random_trace(rng, 7, 8);
    const Eigen::Index it = 1 + static_cast<Eigen::Index>(rng() % 7);
    const Eigen::Index cell = 1 + static_cast<Eigen::Index>(rng() % 8);
    if (bank.level_at(it, cell) != 0) continue;  // only HRS -> LRS transitions
    const double before = read_conductance(bank, trace);
    bank.program(it, cell, 1);
    CHECK(read_conductance(bank, trace) >= before);
    ++programmed;
  }
}

TEST_CASE("reads ignore reprogramming of devices whose trace bit is gated off") {
  DeviceParams params;
  params.seed = 4;
  CrossbarBank bank(8, 7, params, 1.2e-3);
  TraceMatrix trace = TraceMatrix::Ones(7, 8);
  trace(3, 2) = 0;
  const double before = read_conductance(bank, trace);
  bank.program(4, 3, 1);  // trace bit (4,3) is 0
  CHECK(read_conductance(bank, trace) == before);
}

TEST_CASE("rule-60 mirror symmetry of reads is exact for any seeded bank") {
  const Rule r60 = decode_rule(60);
  for (std::uint64_t seed : {1ull, 7ull, 1234ull}) {
    DeviceParams params;
    params.seed = seed;
    CrossbarBank bank(8, 7, params, 1.2e-3);
    bank.program(2, 7, 1);
    bank.program(5, 3, 1);
    for (std::uint64_t value = 0; value < 256; ++value) {
      const TraceMatrix a = run_reservoir(state_from_value(value, 8), r60, 7);
      const TraceMatrix b = run_reservoir(state_from_value(255 - value, 8), r60, 7);
      CHECK(read_conductance(bank, a) == read_conductance(bank, b));
      CHECK(classify(bank, a) == classify(bank, b));
    }
  }
}

TEST_CASE("full 256-input read sequence is bit-identical across equal seeds") {
  const Rule r60 = decode_rule(60);
  auto sweep_values = [&](std::uint64_t seed) {
    DeviceParams params;
    params.seed = seed;
    CrossbarBank bank(8, 7, params, 1.2e-3);
    bank.program(2, 7, 1);
    std::vector<double> values;
    for (std::uint64_t value = 0; value < 256; ++value) {
      values.push_back(
          read_conductance(bank, run_reservoir(state_from_value(value, 8), r60, 7)));
    }
    return values;
  };
  CHECK(sweep_values(99) == sweep_values(99));
}

TEST_CASE("bank snapshots reload to identical reads") {
  std::mt19937 rng(31);
  DeviceParams params;
  params.hrs_sigma = 0.05;
  params.seed = 1001;
  CrossbarBank bank(8, 7, params, 1.2e-3);
  bank.program(2, 7, 1);
  bank.program(4, 7, 1);

  std::stringstream buffer;
  save_bank(bank, buffer);
  const CrossbarBank reloaded = load_bank(buffer);

  CHECK(reloaded.n() == bank.n());
  CHECK(reloaded.m() == bank.m());
  CHECK(reloaded.g_b() == bank.g_b());
  for (int trial = 0; trial < 50; ++trial) {
    const TraceMatrix trace = random_trace(rng, 7, 8);
    CHECK(read_conductance(reloaded, trace) == read_conductance(bank, trace));
  }

  std::stringstream bad("not a bank\n");
  CHECK_THROWS_AS(load_bank(bad), std::runtime_error);
}
