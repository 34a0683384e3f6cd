#include "camr/bank.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace camr {

namespace {

// Deterministic standard normal via Box-Muller on explicit 53-bit uniforms.
// std::normal_distribution is implementation-defined, which would tie saved
// banks to one standard library.
double standard_normal(std::mt19937_64& rng) {
  const double u1 = (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
  const double u2 = (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

// Rounds to 9 significant decimal digits, the precision of the bank text
// format. Sampling through this keeps save/load lossless.
double quantize_sig9(double g) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.8e", g);
  return std::strtod(buf, nullptr);
}

}  // namespace

std::vector<double> DeviceParams::level_grid() const {
  if (!levels.empty()) return levels;
  return {hrs_nominal, lrs_nominal};
}

DeviceParams DeviceParams::ideal() {
  DeviceParams p;
  p.lrs_sigma = 0.0;
  p.hrs_nominal = 0.0;
  p.hrs_sigma = 0.0;
  p.parasitic_enabled = 0.0;
  return p;
}

void DeviceParams::validate() const {
  if (lrs_nominal < 0 || hrs_nominal < 0 || parasitic_enabled < 0) {
    throw std::domain_error("device conductances must be non-negative");
  }
  if (lrs_sigma < 0 || hrs_sigma < 0) {
    throw std::domain_error("device sigmas must be non-negative");
  }
  if (lrs_nominal <= hrs_nominal) {
    throw std::domain_error("lrs_nominal must exceed hrs_nominal");
  }
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    if (!(levels[i] < levels[i + 1])) {
      throw std::domain_error("level grid must be strictly increasing");
    }
  }
  for (double g : levels) {
    if (g < 0) throw std::domain_error("level conductances must be non-negative");
  }
}

CrossbarBank::CrossbarBank(Eigen::Index n, Eigen::Index m, DeviceParams params,
                           double g_b)
    : n_(n), m_(m), params_(std::move(params)), g_b_(g_b), rng_(params_.seed) {
  if (n < 1 || m < 1) {
    throw std::domain_error("bank dimensions must be at least 1x1");
  }
  if (g_b < 0) {
    throw std::domain_error("threshold conductance g_b must be non-negative");
  }
  params_.validate();
  levels_ = Eigen::MatrixXi::Zero(m_, n_);
  g_actual_.resize(m_, n_);
  g_eff_.resize(m_, n_);
  // Canonical sampling order: iteration-major, cell-minor.
  for (Eigen::Index r = 0; r < m_; ++r) {
    for (Eigen::Index c = 0; c < n_; ++c) {
      g_actual_(r, c) = sample(0);
      g_eff_(r, c) = params_.parasitic_enabled;
    }
  }
}

void CrossbarBank::set_g_b(double g_b) {
  if (g_b < 0) {
    throw std::domain_error("threshold conductance g_b must be non-negative");
  }
  g_b_ = g_b;
}

double CrossbarBank::sample(int level) {
  const auto grid = params_.level_grid();
  const double nominal = grid[static_cast<std::size_t>(level)];
  const double sigma = level == 0 ? params_.hrs_sigma : params_.lrs_sigma;
  double g = nominal;
  if (sigma > 0) {
    g = nominal * (1.0 + sigma * standard_normal(rng_));
  }
  if (g < 0) g = 0;
  return quantize_sig9(g);
}

void CrossbarBank::check_address(Eigen::Index iteration, Eigen::Index cell) const {
  if (iteration < 1 || iteration > m_ || cell < 1 || cell > n_) {
    throw std::out_of_range("device address (" + std::to_string(iteration) + "," +
                            std::to_string(cell) + ") outside " +
                            std::to_string(m_) + "x" + std::to_string(n_) +
                            " bank");
  }
}

void CrossbarBank::program(Eigen::Index iteration, Eigen::Index cell, int level) {
  check_address(iteration, cell);
  const auto grid = params_.level_grid();
  if (level < 0 || static_cast<std::size_t>(level) >= grid.size()) {
    throw std::domain_error("level index " + std::to_string(level) +
                            " outside grid of " + std::to_string(grid.size()) +
                            " levels");
  }
  const Eigen::Index r = iteration - 1;
  const Eigen::Index c = cell - 1;
  levels_(r, c) = level;
  g_actual_(r, c) = sample(level);
  g_eff_(r, c) = level >= 1 ? g_actual_(r, c) : params_.parasitic_enabled;
}

int CrossbarBank::level_at(Eigen::Index iteration, Eigen::Index cell) const {
  check_address(iteration, cell);
  return levels_(iteration - 1, cell - 1);
}

double CrossbarBank::conductance_at(Eigen::Index iteration, Eigen::Index cell) const {
  check_address(iteration, cell);
  return g_actual_(iteration - 1, cell - 1);
}

std::vector<Address> CrossbarBank::programmed() const {
  std::vector<Address> out;
  for (Eigen::Index r = 0; r < m_; ++r) {
    for (Eigen::Index c = 0; c < n_; ++c) {
      if (levels_(r, c) >= 1) {
        out.push_back({static_cast<int>(r + 1), static_cast<int>(c + 1)});
      }
    }
  }
  return out;
}

void CrossbarBank::restore_device(Eigen::Index iteration, Eigen::Index cell,
                                  int level, double g_actual) {
  check_address(iteration, cell);
  const auto grid = params_.level_grid();
  if (level < 0 || static_cast<std::size_t>(level) >= grid.size()) {
    throw std::domain_error("level index " + std::to_string(level) +
                            " outside grid of " + std::to_string(grid.size()) +
                            " levels");
  }
  if (g_actual < 0) {
    throw std::domain_error("device conductance must be non-negative");
  }
  const Eigen::Index r = iteration - 1;
  const Eigen::Index c = cell - 1;
  levels_(r, c) = level;
  g_actual_(r, c) = g_actual;
  g_eff_(r, c) = level >= 1 ? g_actual : params_.parasitic_enabled;
}

double read_conductance(const CrossbarBank& bank, const TraceMatrix& trace) {
  if (trace.rows() != bank.m() || trace.cols() != bank.n()) {
    throw std::invalid_argument(
        "trace is " + std::to_string(trace.rows()) + "x" +
        std::to_string(trace.cols()) + " but bank is " + std::to_string(bank.m()) +
        "x" + std::to_string(bank.n()));
  }
  return bank.effective().cwiseProduct(trace.cast<double>()).sum();
}

int classify(const CrossbarBank& bank, const TraceMatrix& trace) {
  return read_conductance(bank, trace) > bank.g_b() ? 1 : -1;
}

void save_bank(const CrossbarBank& bank, std::ostream& out) {
  const auto& p = bank.params();
  char buf[64];
  auto full = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "bank v1\n";
  out << "n=" << bank.n() << "\n";
  out << "m=" << bank.m() << "\n";
  out << "g_b=" << full(bank.g_b()) << "\n";
  out << "seed=" << p.seed << "\n";
  out << "lrs=" << full(p.lrs_nominal) << "\n";
  out << "lrs_sigma=" << full(p.lrs_sigma) << "\n";
  out << "hrs=" << full(p.hrs_nominal) << "\n";
  out << "hrs_sigma=" << full(p.hrs_sigma) << "\n";
  out << "parasitic=" << full(p.parasitic_enabled) << "\n";
  if (!p.levels.empty()) {
    out << "levels=";
    for (std::size_t i = 0; i < p.levels.size(); ++i) {
      out << (i ? "," : "") << full(p.levels[i]);
    }
    out << "\n";
  }
  for (Eigen::Index it = 1; it <= bank.m(); ++it) {
    for (Eigen::Index cell = 1; cell <= bank.n(); ++cell) {
      std::snprintf(buf, sizeof buf, "%.8e", bank.conductance_at(it, cell));
      out << "device=" << it << "," << cell << "," << bank.level_at(it, cell)
          << "," << buf << "\n";
    }
  }
}

CrossbarBank load_bank(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "bank v1") {
    throw std::runtime_error("bank file: missing 'bank v1' header");
  }
  DeviceParams params;
  Eigen::Index n = 0, m = 0;
  double g_b = 0;
  struct DeviceLine {
    Eigen::Index iteration, cell;
    int level;
    double g;
  };
  std::vector<DeviceLine> devices;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("bank file line " + std::to_string(lineno) +
                               ": expected key=value");
    }
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "n") {
      n = std::stol(value);
    } else if (key == "m") {
      m = std::stol(value);
    } else if (key == "g_b") {
      g_b = std::stod(value);
    } else if (key == "seed") {
      params.seed = std::stoull(value);
    } else if (key == "lrs") {
      params.lrs_nominal = std::stod(value);
    } else if (key == "lrs_sigma") {
      params.lrs_sigma = std::stod(value);
    } else if (key == "hrs") {
      params.hrs_nominal = std::stod(value);
    } else if (key == "hrs_sigma") {
      params.hrs_sigma = std::stod(value);
    } else if (key == "parasitic") {
      params.parasitic_enabled = std::stod(value);
    } else if (key == "levels") {
      params.levels.clear();
      std::stringstream ss(value);
      std::string tok;
      while (std::getline(ss, tok, ',')) params.levels.push_back(std::stod(tok));
    } else if (key == "device") {
      DeviceLine d{};
      if (std::sscanf(value.c_str(), "%ld,%ld,%d,%lf", &d.iteration, &d.cell,
                      &d.level, &d.g) != 4) {
        throw std::runtime_error("bank file line " + std::to_string(lineno) +
                                 ": malformed device entry");
      }
      devices.push_back(d);
    } else {
      throw std::runtime_error("bank file line " + std::to_string(lineno) +
                               ": unknown key '" + key + "'");
    }
  }
  CrossbarBank bank(n, m, params, g_b);
  if (static_cast<Eigen::Index>(devices.size()) != n * m) {
    throw std::runtime_error("bank file lists " + std::to_string(devices.size()) +
                             " devices, expected " + std::to_string(n * m));
  }
  for (const auto& d : devices) {
    bank.restore_device(d.iteration, d.cell, d.level, d.g);
  }
  return bank;
}

}  // namespace camr
