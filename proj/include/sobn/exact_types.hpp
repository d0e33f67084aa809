#pragma once

#include <vector>

namespace sobn {

// Complete observations: one state index per network variable, in id order.
struct Dataset {
  std::vector<std::vector<int>> rows;
};

}  // namespace sobn
