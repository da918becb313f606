#pragma once

// Fixed layout for cophenetic vectors: taxa are sorted lexicographically and
// the C(N,2) unordered pairs are enumerated in lexicographic order, so the
// coordinate order of a tree vector is determined by its taxa set alone.

#include <algorithm>
#include <string>
#include <vector>

#include "tropoclust/scalar.hpp"

namespace tropo {

class PairIndexMap {
 public:
  PairIndexMap() = default;

  static PairIndexMap from_taxa(std::vector<std::string> taxa) {
    std::sort(taxa.begin(), taxa.end());
    for (std::size_t i = 1; i < taxa.size(); ++i)
      if (taxa[i] == taxa[i - 1])
        throw ValidationError("duplicate taxon: " + taxa[i]);
    PairIndexMap m;
    m.taxa_ = std::move(taxa);
    return m;
  }

  std::size_t num_taxa() const { return taxa_.size(); }
  std::size_t num_pairs() const {
    return taxa_.size() * (taxa_.size() - 1) / 2;
  }
  const std::vector<std::string>& taxa() const { return taxa_; }

  const std::string& taxon(std::size_t i) const { return taxa_[i]; }

  std::size_t taxon_index(const std::string& name) const {
    auto it = std::lower_bound(taxa_.begin(), taxa_.end(), name);
    if (it == taxa_.end() || *it != name)
      throw ValidationError("unknown taxon: " + name);
    return static_cast<std::size_t>(it - taxa_.begin());
  }

  // Index of the unordered pair {i, j}, i != j.
  std::size_t pair_index(std::size_t i, std::size_t j) const {
    if (i == j) throw ValidationError("pair_index: identical taxa");
    if (i > j) std::swap(i, j);
    const std::size_t N = taxa_.size();
    return i * (2 * N - i - 1) / 2 + (j - i - 1);
  }

  std::pair<std::size_t, std::size_t> pair_at(std::size_t idx) const {
    const std::size_t N = taxa_.size();
    std::size_t i = 0, base = 0;
    while (base + (N - 1 - i) <= idx) {
      base += N - 1 - i;
      ++i;
    }
    return {i, i + 1 + (idx - base)};
  }

  bool operator==(const PairIndexMap& other) const {
    return taxa_ == other.taxa_;
  }

 private:
  std::vector<std::string> taxa_;
};

// Number of taxa N with C(N,2) == n, or throws.
inline std::size_t taxa_count_for_pairs(std::size_t n) {
  std::size_t N = 2;
  while (N * (N - 1) / 2 < n) ++N;
  if (N * (N - 1) / 2 != n)
    throw ValidationError("vector length is not a binomial coefficient C(N,2)");
  return N;
}

}  // namespace tropo
