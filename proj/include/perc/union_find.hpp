#pragma once

// Disjoint sets with union by size and path halving.  Reused across replicas
// via reset() to avoid reallocation in hot loops.

#include <cstdint>
#include <numeric>
#include <vector>

namespace perc {

class DisjointSets {
  public:
    explicit DisjointSets(std::size_t n = 0) { reset(n); }

    void reset(std::size_t n) {
        parent_.resize(n);
        std::iota(parent_.begin(), parent_.end(), 0);
        size_.assign(n, 1);
    }

    std::int32_t find(std::int32_t v) {
        while (parent_[static_cast<std::size_t>(v)] != v) {
            parent_[static_cast<std::size_t>(v)] =
                parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(v)])];
            v = parent_[static_cast<std::size_t>(v)];
        }
        return v;
    }

    // Returns the surviving root.
    std::int32_t unite(std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return a;
        if (size_[static_cast<std::size_t>(a)] < size_[static_cast<std::size_t>(b)])
            std::swap(a, b);
        parent_[static_cast<std::size_t>(b)] = a;
        size_[static_cast<std::size_t>(a)] += size_[static_cast<std::size_t>(b)];
        return a;
    }

    std::int64_t component_size(std::int32_t v) {
        return size_[static_cast<std::size_t>(find(v))];
    }

  private:
    std::vector<std::int32_t> parent_;
    std::vector<std::int64_t> size_;
};

}  // namespace perc
