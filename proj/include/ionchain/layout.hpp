#pragma once

#include <stdexcept>
#include <vector>

namespace ionchain {

// qubit order along a linear ion chain
struct ChainLayout {
  std::vector<int> order;  // position j -> qubit
  std::vector<int> pos;    // qubit -> position, -1 if absent
  int extraEdgeCount = 0;
  long long timeCost = 0;

  static ChainLayout fromOrder(const std::vector<int>& order) {
    ChainLayout l;
    l.order = order;
    int maxQ = -1;
    for (int q : order) maxQ = q > maxQ ? q : maxQ;
    l.pos.assign(size_t(maxQ) + 1, -1);
    for (size_t j = 0; j < order.size(); ++j) {
      int q = order[j];
      if (q < 0 || l.pos[q] != -1) throw std::invalid_argument("order is not a permutation");
      l.pos[q] = int(j);
    }
    return l;
  }
};

inline ChainLayout identityLayout(int n) {
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  return ChainLayout::fromOrder(order);
}

// both blocks share one 2N-ion chain: block 2's copy of the per-block
// ordering is appended directly after block 1's
inline std::vector<int> twoBlockPositions(const ChainLayout& block, int nTotal) {
  std::vector<int> pos(size_t(nTotal) * 2, -1);
  for (int q = 0; q < nTotal; ++q) {
    if (q >= int(block.pos.size()) || block.pos[q] < 0)
      throw std::invalid_argument("block layout does not cover qubit");
    pos[q] = block.pos[q];
    pos[q + nTotal] = block.pos[q] + nTotal;
  }
  return pos;
}

}  // namespace ionchain
