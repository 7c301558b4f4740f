#pragma once

#include "fwpd/dissimilarity.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace fwpd {

enum class Linkage { single, average, complete };

Linkage parse_linkage(const std::string& name); // "sl" | "al" | "cl"
std::string linkage_name(Linkage k);

// One agglomeration step. Children are node ids: leaves are 0..n-1, internal
// nodes n..2n-2 in merge order. left is the child containing the smallest
// original instance index.
struct Merge {
    int left = 0;
    int right = 0;
    double height = 0.0; // linkage value at the merge
    int size = 0;        // leaves under the new node
};

struct Dendrogram {
    std::size_t leaves = 0;
    std::vector<Merge> merges; // exactly leaves-1 entries
};

// Linkage between two disjoint groups of instances, evaluated directly on
// the matrix (min / mean / max of the cross-group entries).
double linkage_value(const DissimilarityMatrix& m, const std::vector<std::size_t>& a,
                     const std::vector<std::size_t>& b, Linkage kind);

// Bottom-up clustering over a symmetric dissimilarity matrix. At each step
// the pair with the smallest linkage merges; zero-height merges are taken
// like any others. Ties pick the pair whose (smallest-leaf-of-A,
// smallest-leaf-of-B) ids are lexicographically least.
Dendrogram hac(const DissimilarityMatrix& m, Linkage kind);

// Partition into k clusters by undoing the last k-1 merges. Labels are dense
// 1..k, numbered by first occurrence along instance order.
std::vector<int> cut(const Dendrogram& dend, std::size_t k);

// left,right,height,size (same layout as common linkage-matrix formats).
void write_merges_csv(const Dendrogram& dend, const std::string& path);

} // namespace fwpd
