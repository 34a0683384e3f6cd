#include "camr/eca.hpp"

#include <sstream>
#include <stdexcept>

namespace camr {

namespace {

void require_binary(const Eigen::Ref<const Bits>& state) {
  for (Eigen::Index i = 0; i < state.size(); ++i) {
    if (state[i] > 1) {
      throw std::domain_error("lattice state contains a non-binary cell at index " +
                              std::to_string(i));
    }
  }
}

}  // namespace

Rule decode_rule(int number) {
  if (number < 0 || number > 255) {
    throw std::domain_error("rule number " + std::to_string(number) +
                            " outside [0, 255]");
  }
  Rule rule;
  rule.number = number;
  for (int k = 0; k < 8; ++k) {
    rule.table[static_cast<std::size_t>(k)] =
        static_cast<std::uint8_t>((number >> k) & 1);
  }
  return rule;
}

int encode_rule(const std::array<std::uint8_t, 8>& table) {
  int number = 0;
  for (int k = 0; k < 8; ++k) {
    const std::uint8_t bit = table[static_cast<std::size_t>(k)];
    if (bit > 1) {
      throw std::domain_error("rule table entry " + std::to_string(k) +
                              " is not binary");
    }
    number |= bit << k;
  }
  return number;
}

bool bit_flip_symmetric(const Rule& rule) {
  for (int k = 0; k < 8; ++k) {
    if (rule.table[static_cast<std::size_t>(k)] !=
        rule.table[static_cast<std::size_t>(7 - k)]) {
      return false;
    }
  }
  return true;
}

Bits step(const Eigen::Ref<const Bits>& state, const Rule& rule) {
  const Eigen::Index n = state.size();
  if (n < 3) {
    throw std::domain_error("ring lattice needs at least 3 cells, got " +
                            std::to_string(n));
  }
  require_binary(state);
  Bits next(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::uint8_t left = state[(i + n - 1) % n];
    const std::uint8_t center = state[i];
    const std::uint8_t right = state[(i + 1) % n];
    next[i] = rule.table[static_cast<std::size_t>(4 * left + 2 * center + right)];
  }
  return next;
}

TraceMatrix run_reservoir(const Eigen::Ref<const Bits>& input, const Rule& rule,
                          Eigen::Index generations) {
  if (generations < 1) {
    throw std::domain_error("reservoir depth must be at least 1 generation");
  }
  TraceMatrix trace(generations, input.size());
  Bits current = step(input, rule);
  trace.row(0) = current.transpose();
  for (Eigen::Index g = 1; g < generations; ++g) {
    current = step(current, rule);
    trace.row(g) = current.transpose();
  }
  return trace;
}

std::uint8_t cell_state(const TraceMatrix& trace, Eigen::Index iteration,
                        Eigen::Index cell) {
  if (iteration < 1 || iteration > trace.rows() || cell < 1 || cell > trace.cols()) {
    throw std::out_of_range("trace address (" + std::to_string(iteration) + "," +
                            std::to_string(cell) + ") outside " +
                            std::to_string(trace.rows()) + "x" +
                            std::to_string(trace.cols()) + " grid");
  }
  return trace(iteration - 1, cell - 1);
}

Bits complement(const Eigen::Ref<const Bits>& state) {
  require_binary(state);
  return state.unaryExpr([](std::uint8_t v) { return static_cast<std::uint8_t>(v ^ 1); });
}

Bits state_from_value(std::uint64_t value, Eigen::Index n) {
  if (n < 1 || n > 64) {
    throw std::domain_error("state width must be in [1, 64]");
  }
  if (n < 64 && (value >> n) != 0) {
    throw std::domain_error("value " + std::to_string(value) + " does not fit in " +
                            std::to_string(n) + " bits");
  }
  Bits state(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    state[i] = static_cast<std::uint8_t>((value >> (n - 1 - i)) & 1);
  }
  return state;
}

std::uint64_t state_value(const Eigen::Ref<const Bits>& state) {
  const Eigen::Index n = state.size();
  if (n > 64) {
    throw std::domain_error("state too wide for a 64-bit value");
  }
  require_binary(state);
  std::uint64_t value = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    value = (value << 1) | state[i];
  }
  return value;
}

Bits parse_state(std::string_view text) {
  Bits state(static_cast<Eigen::Index>(text.size()));
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '0' && c != '1') {
      throw std::domain_error("state string may only contain '0'/'1', found '" +
                              std::string(1, c) + "'");
    }
    state[static_cast<Eigen::Index>(i)] = static_cast<std::uint8_t>(c - '0');
  }
  return state;
}

std::string format_state(const Eigen::Ref<const Bits>& state) {
  std::string out(static_cast<std::size_t>(state.size()), '0');
  for (Eigen::Index i = 0; i < state.size(); ++i) {
    out[static_cast<std::size_t>(i)] = state[i] ? '1' : '0';
  }
  return out;
}

std::string format_trace(const TraceMatrix& trace) {
  std::ostringstream out;
  for (Eigen::Index g = 0; g < trace.rows(); ++g) {
    out << format_state(trace.row(g).transpose()) << '\n';
  }
  return out.str();
}

}  // namespace camr
