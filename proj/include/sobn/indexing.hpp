#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace sobn {

// Mixed-radix encoding of a parent configuration into a CPT row index.
// The first parent is the most significant digit; every table, circuit and
// message-passing routine in this library addresses rows through this one
// convention.
inline int parent_config_index(std::span<const int> states,
                               std::span<const int> cards) {
  if (states.size() != cards.size())
    throw std::invalid_argument("parent_config_index: length mismatch");
  long long index = 0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (cards[i] < 1 || states[i] < 0 || states[i] >= cards[i])
      throw std::invalid_argument("parent_config_index: state out of range");
    index = index * cards[i] + states[i];
  }
  return static_cast<int>(index);
}

// Inverse of parent_config_index.
inline std::vector<int> parent_config_unindex(int index,
                                              std::span<const int> cards) {
  std::vector<int> states(cards.size(), 0);
  long long rest = index;
  for (std::size_t i = cards.size(); i-- > 0;) {
    if (cards[i] < 1) throw std::invalid_argument("parent_config_unindex: bad cardinality");
    states[i] = static_cast<int>(rest % cards[i]);
    rest /= cards[i];
  }
  if (rest != 0 || index < 0)
    throw std::invalid_argument("parent_config_unindex: index out of range");
  return states;
}

// Number of configurations of `cards`; 1 for an empty list.
inline long long config_count(std::span<const int> cards) {
  long long n = 1;
  for (int c : cards) {
    if (c < 1) throw std::invalid_argument("config_count: bad cardinality");
    n *= c;
  }
  return n;
}

// Advances `states` to the next configuration in parent_config_index order.
// Returns false (and resets to all zeros) after the last configuration.
inline bool next_config(std::vector<int>& states, std::span<const int> cards) {
  for (std::size_t i = states.size(); i-- > 0;) {
    if (++states[i] < cards[i]) return true;
    states[i] = 0;
  }
  return false;
}

}  // namespace sobn
