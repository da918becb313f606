#pragma once

// Ultrametric checks and statistics on cophenetic vectors: the three-point
// condition and its epsilon relaxation, the subdominant ultrametric
// (min-max path closure), inner-node depth statistics, coarse types and
// clade queries.

#include <algorithm>
#include <optional>
#include <vector>

#include "tropoclust/pair_index.hpp"
#include "tropoclust/scalar.hpp"
#include "tropoclust/tree.hpp"

namespace tropo {

constexpr double kSqrtEps0 = 1.4901161193847656e-8;  // sqrt(2^-52)

namespace detail {

template <class S>
struct TripleView {
  S lo, mid, hi;
};

template <class S>
TripleView<S> sort_triple(const S& a, const S& b, const S& c) {
  TripleView<S> t{a, b, c};
  if (t.lo > t.mid) std::swap(t.lo, t.mid);
  if (t.mid > t.hi) std::swap(t.mid, t.hi);
  if (t.lo > t.mid) std::swap(t.lo, t.mid);
  return t;
}

template <class S, class F>
void for_each_triple(const TorusPoint<S>& coords, const PairIndexMap& map,
                     F&& f) {
  const std::size_t N = map.num_taxa();
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = a + 1; b < N; ++b)
      for (std::size_t c = b + 1; c < N; ++c)
        f(coords[map.pair_index(a, b)], coords[map.pair_index(a, c)],
          coords[map.pair_index(b, c)]);
}

}  // namespace detail

// (1-eps) * max{t_ab, t_ac, t_bc} <= Mid for every taxa triple, with
// Mid = sum - max - min (the middle value). Vectors on <= 2 taxa pass.
template <class S>
bool is_eps_ultrametric(const TorusPoint<S>& coords, const PairIndexMap& map,
                        const S& eps) {
  if (coords.size() != map.num_pairs())
    throw ValidationError("coordinate count does not match taxa");
  bool ok = true;
  detail::for_each_triple(coords, map, [&](const S& x, const S& y, const S& z) {
    auto t = detail::sort_triple(x, y, z);
    if ((S(1) - eps) * t.hi > t.mid) ok = false;
  });
  return ok;
}

// Smallest eps >= 0 making every triple pass; 0 for exact ultrametrics.
template <class S>
S min_eps(const TorusPoint<S>& coords, const PairIndexMap& map) {
  if (coords.size() != map.num_pairs())
    throw ValidationError("coordinate count does not match taxa");
  S worst(0);
  detail::for_each_triple(coords, map, [&](const S& x, const S& y, const S& z) {
    auto t = detail::sort_triple(x, y, z);
    if (t.hi > S(0)) {
      S e = S(1) - t.mid / t.hi;
      if (e > worst) worst = e;
    } else if (t.mid != t.hi) {
      throw ValidationError("min_eps: triple with non-positive maximum");
    }
  });
  return worst;
}

template <class S>
bool is_eps_ultrametric(const UltrametricVector<S>& u, const S& eps) {
  return is_eps_ultrametric(u.coords, u.map, eps);
}

template <class S>
S min_eps(const UltrametricVector<S>& u) {
  return min_eps(u.coords, u.map);
}

template <class S>
bool is_ultrametric(const UltrametricVector<S>& u) {
  return is_eps_ultrametric(u.coords, u.map, S(0));
}

// Largest ultrametric below the input: u*_ab = min over a-b paths of the
// maximum edge weight, on the complete graph weighted by u. Computed as a
// min-max Floyd-Warshall closure; idempotent on ultrametrics.
template <class S>
TorusPoint<S> subdominant_closure(const TorusPoint<S>& coords,
                                  const PairIndexMap& map) {
  const std::size_t N = map.num_taxa();
  std::vector<std::vector<S>> d(N, std::vector<S>(N, S(0)));
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = a + 1; b < N; ++b)
      d[a][b] = d[b][a] = coords[map.pair_index(a, b)];
  for (std::size_t k = 0; k < N; ++k)
    for (std::size_t a = 0; a < N; ++a)
      for (std::size_t b = 0; b < N; ++b) {
        S via = std::max(d[a][k], d[k][b]);
        if (via < d[a][b]) d[a][b] = via;
      }
  TorusPoint<S> out(coords.size());
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = a + 1; b < N; ++b)
      out[map.pair_index(a, b)] = d[a][b];
  return out;
}

template <class S>
UltrametricVector<S> subdominant_ultrametric(const UltrametricVector<S>& u) {
  return {u.map, subdominant_closure(u.coords, u.map)};
}

// height = max(u)/2; the depth of mrca(a,b) is height - u_ab/2.
// eta = deepest inner node; nu = shallowest inner node below the root
// (the root itself would make nu identically zero). Star trees have no
// such node, so nu is undefined there.
template <class S>
struct DepthStats {
  S height{};
  S eta{};
  std::optional<S> nu_opt;

  const S& nu() const {
    if (!nu_opt) throw ValidationError("nu undefined for star trees");
    return *nu_opt;
  }
};

template <class S>
DepthStats<S> depth_stats(const UltrametricVector<S>& u, double tol = 1e-8) {
  if (u.coords.empty()) throw ValidationError("depth_stats: empty vector");
  const S maxu = *std::max_element(u.coords.begin(), u.coords.end());
  const S minu = *std::min_element(u.coords.begin(), u.coords.end());
  DepthStats<S> st;
  st.height = maxu / S(2);
  st.eta = st.height - minu / S(2);
  // Second-largest distinct value; pairs at the maximum meet at the root.
  double cutoff = 0;
  if constexpr (!is_exact_v<S>) cutoff = tol * (1 + std::abs(to_double(maxu)));
  std::optional<S> second;
  for (const S& v : u.coords) {
    bool below;
    if constexpr (is_exact_v<S>) below = v < maxu;
    else below = v < maxu - S(cutoff);
    if (below && (!second || v > *second)) second = v;
  }
  if (second) st.nu_opt = st.height - *second / S(2);
  return st;
}

// Partition of the taxa set into the root's children subtrees: classes of
// the relation a ~ b iff u_ab < max(u) (strictly, with a scaled tolerance
// in float mode). Blocks are sorted internally and by first element.
using CoarseType = std::vector<std::vector<std::string>>;

template <class S>
CoarseType coarse_type(const UltrametricVector<S>& u, double tol = 1e-8) {
  const std::size_t N = u.map.num_taxa();
  if (N < 2) throw ValidationError("coarse_type: need >= 2 taxa");
  const S maxu = *std::max_element(u.coords.begin(), u.coords.end());
  std::vector<std::size_t> parent(N);
  for (std::size_t i = 0; i < N; ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = a + 1; b < N; ++b) {
      const S& v = u.coords[u.map.pair_index(a, b)];
      bool below;
      if constexpr (is_exact_v<S>) below = v < maxu;
      else below = v < maxu - S(tol * (1 + std::abs(to_double(maxu))));
      if (below) parent[find(a)] = find(b);
    }
  std::vector<std::vector<std::string>> blocks(N);
  for (std::size_t i = 0; i < N; ++i) blocks[find(i)].push_back(u.map.taxon(i));
  CoarseType out;
  for (auto& blk : blocks)
    if (!blk.empty()) {
      std::sort(blk.begin(), blk.end());
      out.push_back(std::move(blk));
    }
  std::sort(out.begin(), out.end());
  return out;
}

// Fraction of trees in which Y is a clade: every within-Y distance is
// strictly below every Y-to-outside distance.
template <class S>
double clade_support(const std::vector<UltrametricVector<S>>& trees,
                     const std::vector<std::string>& clade) {
  if (trees.empty()) throw ValidationError("clade_support: no trees");
  std::size_t hits = 0;
  for (const auto& u : trees) {
    const std::size_t N = u.map.num_taxa();
    if (clade.size() < 2 || clade.size() >= N)
      throw ValidationError("clade must satisfy 1 < |Y| < N");
    std::vector<char> in(N, 0);
    for (const auto& name : clade) in[u.map.taxon_index(name)] = 1;
    std::optional<S> max_in, min_cross;
    for (std::size_t a = 0; a < N; ++a)
      for (std::size_t b = a + 1; b < N; ++b) {
        const S& v = u.coords[u.map.pair_index(a, b)];
        if (in[a] && in[b]) {
          if (!max_in || v > *max_in) max_in = v;
        } else if (in[a] != in[b]) {
          if (!min_cross || v < *min_cross) min_cross = v;
        }
      }
    if (max_in && min_cross && *max_in < *min_cross) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(trees.size());
}

template <class S>
S mrca_depth(const UltrametricVector<S>& u, const std::string& a,
             const std::string& b) {
  if (a == b) throw ValidationError("mrca_depth: identical taxa");
  const S maxu = *std::max_element(u.coords.begin(), u.coords.end());
  return (maxu - u.at(a, b)) / S(2);
}

// Smallest spread max - min over the three pairwise distances of any taxa
// triple; zero for stars, positive for fully resolved triples.
template <class S>
S resolution_gap(const UltrametricVector<S>& u) {
  if (u.map.num_taxa() < 3)
    throw ValidationError("resolution_gap: need >= 3 taxa");
  std::optional<S> best;
  detail::for_each_triple(u.coords, u.map,
                          [&](const S& x, const S& y, const S& z) {
                            auto t = detail::sort_triple(x, y, z);
                            S gap = t.hi - t.lo;
                            if (!best || gap < *best) best = gap;
                          });
  return *best;
}

// Assemble an UltrametricVector from raw coordinates (CSV ingestion); the
// coordinate order must match the PairIndexMap layout of the taxa.
template <class S>
UltrametricVector<S> make_ultrametric_vector(std::vector<std::string> taxa,
                                             TorusPoint<S> coords) {
  UltrametricVector<S> u;
  u.map = PairIndexMap::from_taxa(std::move(taxa));
  if (coords.size() != u.map.num_pairs())
    throw ValidationError("coordinate count does not match taxa");
  u.coords = std::move(coords);
  return u;
}

}  // namespace tropo
