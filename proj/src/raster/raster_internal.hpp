#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

namespace layoutsearch {

// Element at index (n-1)/2 of the sorted values; 0 for an empty input.
double lower_median(std::vector<double> values);

struct DisjointSet {
  std::vector<std::size_t> parent;
  explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace layoutsearch
