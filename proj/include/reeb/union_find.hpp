#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

namespace reeb {

/// Union-find with path halving; small and allocation-friendly, used by the
/// level-set sweeps, the fiber oracle and cosheaf evaluation.
class UnionFind {
public:
    explicit UnionFind(size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }

    int find(int x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    /// Returns false if the two were already in the same class.
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (a < b) parent_[b] = a; // keep the smaller index as root: deterministic
        else parent_[a] = b;
        return true;
    }

    bool same(int a, int b) { return find(a) == find(b); }

    int64_t component_count() {
        int64_t n = 0;
        for (size_t i = 0; i < parent_.size(); ++i)
            if (find((int)i) == (int)i) ++n;
        return n;
    }

    size_t size() const { return parent_.size(); }

private:
    std::vector<int> parent_;
};

} // namespace reeb
