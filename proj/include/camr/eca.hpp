// Elementary cellular automaton core: rule decoding and ring-lattice evolution.
//
// Conventions used throughout the library:
//   - cells are numbered 1..n, cell 1 printed leftmost;
//   - the left neighbor of cell 1 is cell n (periodic ring);
//   - a neighborhood (left, center, right) selects rule bit 4*left + 2*center + right;
//   - when a state is read as an integer, cell 1 carries the most significant bit;
//   - trace row g (0-based g-1) holds generation g; the raw input is not stored.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace camr {

using Bits = Eigen::Vector<std::uint8_t, Eigen::Dynamic>;
using TraceMatrix =
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One of the 256 elementary rules, stored both as its Wolfram number and as
/// the decoded response table indexed by neighborhood value.
struct Rule {
  int number = 0;
  std::array<std::uint8_t, 8> table{};
};

/// Decodes a Wolfram rule number. Throws std::domain_error outside [0, 255].
Rule decode_rule(int number);

/// Inverse of decode_rule; table entries must be 0 or 1.
int encode_rule(const std::array<std::uint8_t, 8>& table);

/// True when complementing a state never changes the next state, i.e.
/// table[k] == table[7-k] for every neighborhood k. Rule 60 qualifies.
bool bit_flip_symmetric(const Rule& rule);

/// Advances a ring lattice by one generation. Requires n >= 3 and binary cells.
Bits step(const Eigen::Ref<const Bits>& state, const Rule& rule);

/// Evolves `input` for `generations` steps and stacks the results row by row
/// (row 0 = generation 1). Throws std::domain_error when generations < 1.
TraceMatrix run_reservoir(const Eigen::Ref<const Bits>& input, const Rule& rule,
                          Eigen::Index generations);

/// Reads one cell of a trace by its 1-based (iteration, cell) address.
/// Throws std::out_of_range for addresses outside the grid.
std::uint8_t cell_state(const TraceMatrix& trace, Eigen::Index iteration,
                        Eigen::Index cell);

/// Bitwise complement of a state.
Bits complement(const Eigen::Ref<const Bits>& state);

/// Builds the n-cell state whose integer value is `value` (cell 1 = MSB).
/// Throws std::domain_error when value does not fit in n bits.
Bits state_from_value(std::uint64_t value, Eigen::Index n);

/// Integer value of a state, cell 1 most significant. Requires n <= 64.
std::uint64_t state_value(const Eigen::Ref<const Bits>& state);

/// Parses a string of '0'/'1' characters, cell 1 leftmost.
Bits parse_state(std::string_view text);

/// Formats a state as '0'/'1' characters, cell 1 leftmost.
std::string format_state(const Eigen::Ref<const Bits>& state);

/// Formats a trace one generation per line, most recent generation last.
std::string format_trace(const TraceMatrix& trace);

}  // namespace camr
