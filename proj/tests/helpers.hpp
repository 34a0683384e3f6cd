// Shared test utilities. naive_step is a third, test-local evolution kept
// independent of both camr::step and the experiment module's reference.
#pragma once

#include "camr/eca.hpp"
#include "camr/train.hpp"

#include <random>
#include <vector>

namespace camr::testing {

// Plain-int evolution: neighbors resolved by modular arithmetic, rule bit
// extracted by division instead of shifts.
inline std::vector<int> naive_step(const std::vector<int>& cells, int rule_number) {
  const int n = static_cast<int>(cells.size());
  std::vector<int> next(cells.size());
  for (int i = 0; i < n; ++i) {
    const int left = cells[static_cast<std::size_t>(((i - 1) % n + n) % n)];
    const int center = cells[static_cast<std::size_t>(i)];
    const int right = cells[static_cast<std::size_t>((i + 1) % n)];
    const int neighborhood = left * 4 + center * 2 + right;
    next[static_cast<std::size_t>(i)] = rule_number / (1 << neighborhood) % 2;
  }
  return next;
}

inline std::vector<int> to_ints(const Bits& bits) {
  std::vector<int> out(static_cast<std::size_t>(bits.size()));
  for (Eigen::Index i = 0; i < bits.size(); ++i) {
    out[static_cast<std::size_t>(i)] = bits[i];
  }
  return out;
}

inline Bits to_bits(const std::vector<int>& cells) {
  Bits out(static_cast<Eigen::Index>(cells.size()));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = static_cast<std::uint8_t>(cells[i]);
  }
  return out;
}

inline Bits random_state(std::mt19937& rng, Eigen::Index n) {
  Bits state(n);
  std::bernoulli_distribution coin(0.5);
  for (Eigen::Index i = 0; i < n; ++i) {
    state[i] = coin(rng) ? 1 : 0;
  }
  return state;
}

// Four-item dataset over cells (a, b): every combination of the pair with the
// remaining cells at zero, labeled +1 when the pair differs.
inline LabeledDataset xor_dataset(Eigen::Index n, int cell_a, int cell_b) {
  LabeledDataset dataset;
  for (int va = 0; va <= 1; ++va) {
    for (int vb = 0; vb <= 1; ++vb) {
      LabeledItem item;
      item.input = Bits::Zero(n);
      item.input[cell_a - 1] = static_cast<std::uint8_t>(va);
      item.input[cell_b - 1] = static_cast<std::uint8_t>(vb);
      item.label = (va ^ vb) ? 1 : -1;
      dataset.items.push_back(std::move(item));
    }
  }
  return dataset;
}

}  // namespace camr::testing
