#include "camr/config.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace camr {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

[[noreturn]] void fail(const std::string& name, int lineno, const std::string& what) {
  throw std::runtime_error(name + ":" + std::to_string(lineno) + ": " + what);
}

}  // namespace

std::string to_string(Experiment experiment) {
  switch (experiment) {
    case Experiment::verify: return "verify";
    case Experiment::sweep: return "sweep";
    case Experiment::xor_gate: return "xor";
    case Experiment::ttest: return "ttest";
    case Experiment::train: return "train";
  }
  return "verify";
}

Experiment experiment_from_string(const std::string& name) {
  if (name == "verify") return Experiment::verify;
  if (name == "sweep") return Experiment::sweep;
  if (name == "xor") return Experiment::xor_gate;
  if (name == "ttest") return Experiment::ttest;
  if (name == "train") return Experiment::train;
  throw std::runtime_error("unknown experiment '" + name +
                           "' (expected verify|sweep|xor|ttest|train)");
}

RunConfig parse_config(std::istream& in, const std::string& name) {
  RunConfig config;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      fail(name, lineno, "expected key=value, got '" + stripped + "'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));

    auto parse_int = [&](long lo, long hi) {
      long v = 0;
      try {
        std::size_t used = 0;
        v = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
      } catch (const std::exception&) {
        fail(name, lineno, "key '" + key + "': '" + value + "' is not an integer");
      }
      if (v < lo || v > hi) {
        fail(name, lineno, "key '" + key + "': value " + value +
                                " out of range [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "]");
      }
      return v;
    };
    auto parse_double = [&]() {
      try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
      } catch (const std::exception&) {
        fail(name, lineno, "key '" + key + "': '" + value + "' is not a number");
      }
    };
    auto parse_address = [&]() {
      Address address;
      if (std::sscanf(value.c_str(), "%d,%d", &address.iteration, &address.cell) != 2) {
        fail(name, lineno, "key '" + key + "': expected 'iteration,cell'");
      }
      return address;
    };

    if (key == "rule") {
      config.rule = static_cast<int>(parse_int(0, 255));
    } else if (key == "n") {
      config.n = parse_int(1, 64);
    } else if (key == "m") {
      config.m = parse_int(1, 4096);
    } else if (key == "lrs") {
      config.device.lrs_nominal = parse_double();
    } else if (key == "lrs_sigma") {
      config.device.lrs_sigma = parse_double();
    } else if (key == "hrs") {
      config.device.hrs_nominal = parse_double();
    } else if (key == "hrs_sigma") {
      config.device.hrs_sigma = parse_double();
    } else if (key == "parasitic") {
      config.device.parasitic_enabled = parse_double();
    } else if (key == "levels") {
      config.device.levels.clear();
      std::stringstream ss(value);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        try {
          config.device.levels.push_back(std::stod(tok));
        } catch (const std::exception&) {
          fail(name, lineno, "key 'levels': '" + tok + "' is not a number");
        }
      }
    } else if (key == "seed") {
      try {
        config.device.seed = std::stoull(value);
      } catch (const std::exception&) {
        fail(name, lineno, "key 'seed': '" + value + "' is not an unsigned integer");
      }
    } else if (key == "gb") {
      config.g_b = parse_double();
    } else if (key == "experiment") {
      try {
        config.experiment = experiment_from_string(value);
      } catch (const std::exception& e) {
        fail(name, lineno, e.what());
      }
    } else if (key == "write") {
      Write w;
      if (std::sscanf(value.c_str(), "%d,%d,%d", &w.iteration, &w.cell, &w.level) != 3) {
        fail(name, lineno, "key 'write': expected 'iteration,cell,level'");
      }
      config.writes.push_back(w);
    } else if (key == "bit_a") {
      config.bit_a = static_cast<int>(parse_int(1, 64));
    } else if (key == "bit_b") {
      config.bit_b = static_cast<int>(parse_int(1, 64));
    } else if (key == "fixed_bits") {
      for (char c : value) {
        if (c != '0' && c != '1') {
          fail(name, lineno, "key 'fixed_bits': expected a '0'/'1' string");
        }
      }
      config.fixed_bits = value;
    } else if (key == "address_a") {
      config.address_a = parse_address();
    } else if (key == "address_b") {
      config.address_b = parse_address();
    } else if (key == "epochs") {
      config.train_options.epochs = static_cast<int>(parse_int(1, 100000000));
    } else if (key == "learning_rate") {
      config.train_options.learning_rate = parse_double();
    } else if (key == "l2") {
      config.train_options.l2 = parse_double();
    } else if (key == "dataset") {
      config.dataset_path = value;
    } else if (key == "out") {
      config.out_dir = value;
    } else {
      fail(name, lineno, "unknown key '" + key + "'");
    }
  }
  if (config.experiment == Experiment::train && !config.dataset_path.empty() &&
      !std::filesystem::exists(config.dataset_path)) {
    throw std::runtime_error(name + ": dataset path '" + config.dataset_path +
                             "' does not exist");
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file '" + path.string() + "'");
  }
  return parse_config(in, path.string());
}

void save_config(const RunConfig& config, std::ostream& out) {
  out << "experiment=" << to_string(config.experiment) << "\n";
  out << "rule=" << config.rule << "\n";
  out << "n=" << config.n << "\n";
  out << "m=" << config.m << "\n";
  out << "lrs=" << full(config.device.lrs_nominal) << "\n";
  out << "lrs_sigma=" << full(config.device.lrs_sigma) << "\n";
  out << "hrs=" << full(config.device.hrs_nominal) << "\n";
  out << "hrs_sigma=" << full(config.device.hrs_sigma) << "\n";
  out << "parasitic=" << full(config.device.parasitic_enabled) << "\n";
  if (!config.device.levels.empty()) {
    out << "levels=";
    for (std::size_t i = 0; i < config.device.levels.size(); ++i) {
      out << (i ? "," : "") << full(config.device.levels[i]);
    }
    out << "\n";
  }
  out << "seed=" << config.device.seed << "\n";
  out << "gb=" << full(config.g_b) << "\n";
  for (const auto& w : config.writes) {
    out << "write=" << w.iteration << "," << w.cell << "," << w.level << "\n";
  }
  out << "bit_a=" << config.bit_a << "\n";
  out << "bit_b=" << config.bit_b << "\n";
  if (!config.fixed_bits.empty()) out << "fixed_bits=" << config.fixed_bits << "\n";
  out << "address_a=" << config.address_a.iteration << "," << config.address_a.cell
      << "\n";
  out << "address_b=" << config.address_b.iteration << "," << config.address_b.cell
      << "\n";
  out << "epochs=" << config.train_options.epochs << "\n";
  out << "learning_rate=" << full(config.train_options.learning_rate) << "\n";
  out << "l2=" << full(config.train_options.l2) << "\n";
  if (!config.dataset_path.empty()) out << "dataset=" << config.dataset_path << "\n";
  out << "out=" << config.out_dir << "\n";
}

}  // namespace camr
