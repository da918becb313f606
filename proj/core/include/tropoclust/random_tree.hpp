#pragma once

// Seeded random equidistant trees. Topology comes from uniform sequential
// pair merging (coalescent order); inner-node depths are drawn top-down,
// each strictly inside (max(parent depth, omega), Omega). Leaves sit at
// depth Omega, so generated trees have height Omega, nu > omega and
// eta < Omega, and are ultrametric by construction.

#include <string>
#include <vector>

#include "tropoclust/rng.hpp"
#include "tropoclust/scalar.hpp"
#include "tropoclust/tree.hpp"

namespace tropo {

namespace detail {

// Uniform unordered pair (i < j) out of [0, count).
inline std::pair<std::size_t, std::size_t> uniform_pair(Rng& rng,
                                                        std::size_t count) {
  const std::size_t total = count * (count - 1) / 2;
  std::size_t idx = uniform_index(rng, total);
  std::size_t i = 0, base = 0;
  while (base + (count - 1 - i) <= idx) {
    base += count - 1 - i;
    ++i;
  }
  return {i, i + 1 + (idx - base)};
}

// Binary merge tree over the given leaf labels; every node's `length` is
// left 0 here, depths are assigned afterwards.
template <class S>
TreeNode<S> random_topology(Rng& rng, const std::vector<std::string>& labels) {
  std::vector<TreeNode<S>> active;
  active.reserve(labels.size());
  for (const auto& l : labels) {
    TreeNode<S> leaf;
    leaf.label = l;
    active.push_back(std::move(leaf));
  }
  while (active.size() > 1) {
    auto [i, j] = uniform_pair(rng, active.size());
    TreeNode<S> parent;
    parent.children.push_back(std::move(active[i]));
    parent.children.push_back(std::move(active[j]));
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(j));
    active[i] = std::move(parent);
  }
  return std::move(active[0]);
}

// Assigns node depths top-down and converts them to edge lengths.
template <class S>
void assign_depths(Rng& rng, TreeNode<S>& node, const S& parent_depth,
                   const S& omega, const S& Omega) {
  if (node.is_leaf()) {
    node.length = Omega - parent_depth;
    return;
  }
  S depth = uniform_scalar_open<S>(rng, std::max(parent_depth, omega), Omega);
  node.length = depth - parent_depth;
  for (auto& child : node.children) assign_depths(rng, child, depth, omega, Omega);
}

inline std::vector<std::string> default_taxa(std::size_t N) {
  // a, b, ..., z, t26, t27, ...
  std::vector<std::string> taxa;
  taxa.reserve(N);
  for (std::size_t i = 0; i < N; ++i) {
    if (i < 26)
      taxa.push_back(std::string(1, static_cast<char>('a' + i)));
    else
      taxa.push_back("t" + std::to_string(i));
  }
  return taxa;
}

}  // namespace detail

template <class S>
PhyloTree<S> random_equidistant_tree(std::size_t N, const S& omega,
                                     const S& Omega, Rng& rng) {
  if (N < 3) throw ValidationError("random tree: need N >= 3");
  if (!(S(0) < omega && omega < Omega))
    throw ValidationError("random tree: need 0 < omega < Omega");
  auto taxa = detail::default_taxa(N);
  PhyloTree<S> tree;
  tree.root = detail::random_topology<S>(rng, taxa);
  // Root depth 0; its children subtrees get depths in (omega, Omega).
  tree.root.length = S(0);
  for (auto& child : tree.root.children)
    detail::assign_depths(rng, child, S(0), omega, Omega);
  return tree;
}

template <class S>
PhyloTree<S> random_equidistant_tree(std::size_t N, const S& omega,
                                     const S& Omega, std::uint64_t seed) {
  Rng rng(seed);
  return random_equidistant_tree(N, omega, Omega, rng);
}

// Random equidistant tree with a prescribed coarse type: the root's children
// are one subtree per block. Blocks of size one hang a leaf directly off the
// root; two blocks give a binary tree when the block subtrees are binary.
template <class S>
PhyloTree<S> random_tree_with_coarse_type(
    const std::vector<std::vector<std::string>>& blocks, const S& omega,
    const S& Omega, Rng& rng) {
  if (blocks.size() < 2)
    throw ValidationError("coarse type needs at least two blocks");
  if (!(S(0) < omega && omega < Omega))
    throw ValidationError("random tree: need 0 < omega < Omega");
  PhyloTree<S> tree;
  tree.root.length = S(0);
  for (const auto& block : blocks) {
    if (block.empty()) throw ValidationError("empty coarse-type block");
    TreeNode<S> sub = block.size() == 1
                          ? [&] {
                              TreeNode<S> leaf;
                              leaf.label = block[0];
                              return leaf;
                            }()
                          : detail::random_topology<S>(rng, block);
    detail::assign_depths(rng, sub, S(0), omega, Omega);
    tree.root.children.push_back(std::move(sub));
  }
  return tree;
}

}  // namespace tropo
