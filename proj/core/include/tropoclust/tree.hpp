#pragma once

// Rooted phylogenetic trees with edge lengths, Newick I/O, cophenetic
// vectors and reconstruction of an equidistant tree from an ultrametric.
//
// Newick conventions accepted here:
//   - one rooted expression terminated by ';'
//   - every edge carries ":length" (unless allow_missing_lengths, then 0)
//   - lengths are decimal/scientific literals or "p/q" rationals
//   - internal node labels are tolerated and dropped
//   - taxa may not contain the characters ( ) , : ; or whitespace

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tropoclust/pair_index.hpp"
#include "tropoclust/scalar.hpp"
#include "tropoclust/torus.hpp"

namespace tropo {

template <class S>
struct TreeNode {
  std::string label;  // taxon name at leaves, empty for internal nodes
  S length{};         // length of the edge to the parent (0 at the root)
  std::vector<TreeNode<S>> children;

  bool is_leaf() const { return children.empty(); }
};

template <class S>
struct PhyloTree {
  TreeNode<S> root;
};

class NewickParseError : public ValidationError {
 public:
  NewickParseError(const std::string& msg, std::size_t pos)
      : ValidationError(msg + " at position " + std::to_string(pos)),
        position(pos) {}
  std::size_t position;
};

struct NewickOptions {
  bool allow_missing_lengths = false;
  bool require_positive_internal = false;  // strictness flag for validation
};

namespace detail {

template <class S>
class NewickParser {
 public:
  NewickParser(std::string_view text, NewickOptions opts)
      : text_(text), opts_(opts) {}

  PhyloTree<S> parse() {
    skip_ws();
    PhyloTree<S> tree;
    tree.root = parse_node(/*is_root=*/true);
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != ';')
      throw NewickParseError("expected ';'", pos_);
    ++pos_;
    skip_ws();
    if (pos_ != text_.size())
      throw NewickParseError("trailing characters after ';'", pos_);
    std::vector<std::string> taxa(seen_.begin(), seen_.end());
    if (taxa.empty()) throw NewickParseError("tree has no taxa", 0);
    return tree;
  }

 private:
  std::string_view text_;
  NewickOptions opts_;
  std::size_t pos_ = 0;
  std::vector<std::string> seen_;

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r' ||
            text_[pos_] == '\n'))
      ++pos_;
  }

  static bool is_label_char(char c) {
    return c != '(' && c != ')' && c != ',' && c != ':' && c != ';' &&
           c != ' ' && c != '\t' && c != '\r' && c != '\n';
  }

  std::string parse_label() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_label_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  TreeNode<S> parse_node(bool is_root) {
    skip_ws();
    TreeNode<S> node;
    if (pos_ < text_.size() && text_[pos_] == '(') {
      ++pos_;
      while (true) {
        node.children.push_back(parse_node(false));
        skip_ws();
        if (pos_ >= text_.size())
          throw NewickParseError("unterminated subtree", pos_);
        if (text_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (text_[pos_] == ')') {
          ++pos_;
          break;
        }
        throw NewickParseError("expected ',' or ')'", pos_);
      }
      if (node.children.size() < 2)
        throw NewickParseError("internal node with fewer than two children",
                               pos_);
      skip_ws();
      parse_label();  // internal label, ignored
    } else {
      std::size_t at = pos_;
      std::string label = parse_label();
      if (label.empty()) throw NewickParseError("expected taxon label", at);
      for (const auto& t : seen_)
        if (t == label)
          throw NewickParseError("duplicate taxon '" + label + "'", at);
      seen_.push_back(label);
      node.label = std::move(label);
    }
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == ':') {
      ++pos_;
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (is_label_char(text_[pos_]) || text_[pos_] == '+'))
        ++pos_;
      if (start == pos_) throw NewickParseError("expected branch length", pos_);
      try {
        node.length =
            scalar_from_string<S>(text_.substr(start, pos_ - start));
      } catch (const ValidationError& e) {
        throw NewickParseError(e.what(), start);
      }
    } else if (!is_root && !opts_.allow_missing_lengths) {
      throw NewickParseError("missing branch length", pos_);
    }
    return node;
  }
};

template <class S>
void collect_taxa(const TreeNode<S>& node, std::vector<std::string>& out) {
  if (node.is_leaf()) {
    out.push_back(node.label);
    return;
  }
  for (const auto& c : node.children) collect_taxa(c, out);
}

template <class S>
const std::string& min_leaf_label(const TreeNode<S>& node) {
  if (node.is_leaf()) return node.label;
  const std::string* best = &min_leaf_label(node.children[0]);
  for (std::size_t i = 1; i < node.children.size(); ++i) {
    const std::string& m = min_leaf_label(node.children[i]);
    if (m < *best) best = &m;
  }
  return *best;
}

template <class S>
void emit_node(const TreeNode<S>& node, bool is_root, std::string& out) {
  if (node.is_leaf()) {
    out += node.label;
  } else {
    std::vector<const TreeNode<S>*> order;
    order.reserve(node.children.size());
    for (const auto& c : node.children) order.push_back(&c);
    std::sort(order.begin(), order.end(),
              [](const TreeNode<S>* a, const TreeNode<S>* b) {
                return min_leaf_label(*a) < min_leaf_label(*b);
              });
    out += '(';
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (i) out += ',';
      emit_node(*order[i], false, out);
    }
    out += ')';
  }
  if (!is_root) {
    out += ':';
    out += scalar_to_string(node.length);
  }
}

template <class S>
void leaf_depths(const TreeNode<S>& node, const S& acc,
                 std::map<std::string, S>& out) {
  if (node.is_leaf()) {
    out.emplace(node.label, acc);
    return;
  }
  for (const auto& c : node.children) leaf_depths(c, S(acc + c.length), out);
}

template <class S>
void check_internal_edges(const TreeNode<S>& node, bool is_root) {
  if (!node.is_leaf()) {
    if (!is_root && !(node.length > S(0)))
      throw ValidationError("internal edge with non-positive length");
    for (const auto& c : node.children) check_internal_edges(c, false);
  }
}

}  // namespace detail

template <class S>
PhyloTree<S> parse_newick(std::string_view text, NewickOptions opts = {}) {
  PhyloTree<S> tree = detail::NewickParser<S>(text, opts).parse();
  if (opts.require_positive_internal)
    detail::check_internal_edges(tree.root, true);
  return tree;
}

// Canonical emission: children ordered by their smallest descendant label,
// so equal trees print identically. Root carries no length; no newline.
template <class S>
std::string emit_newick(const PhyloTree<S>& tree) {
  std::string out;
  detail::emit_node(tree.root, true, out);
  out += ';';
  return out;
}

template <class S>
std::vector<std::string> tree_taxa(const PhyloTree<S>& tree) {
  std::vector<std::string> taxa;
  detail::collect_taxa(tree.root, taxa);
  std::sort(taxa.begin(), taxa.end());
  return taxa;
}

// All leaves at the same depth (exact mode) / within tol*(1+depth) (float).
template <class S>
bool is_equidistant(const PhyloTree<S>& tree, double tol = 1e-8) {
  std::map<std::string, S> depths;
  detail::leaf_depths(tree.root, S(0), depths);
  if (depths.empty()) return false;
  const S& first = depths.begin()->second;
  double scale = 1;
  if constexpr (!is_exact_v<S>) {
    for (const auto& [name, d] : depths) scale = std::max(scale, std::abs(d));
  }
  for (const auto& [name, d] : depths)
    if (!scalar_near(d, first, tol * scale)) return false;
  return true;
}

// Ultrametric vector of a tree: taxa plus the C(N,2) pairwise leaf path
// lengths in PairIndexMap order.
template <class S>
struct UltrametricVector {
  PairIndexMap map;
  TorusPoint<S> coords;

  const S& at(const std::string& a, const std::string& b) const {
    return coords[map.pair_index(map.taxon_index(a), map.taxon_index(b))];
  }
};

namespace detail {

// Pairs split across distinct children of `node` have their path through it.
template <class S>
std::vector<std::pair<std::string, S>> cophenetic_rec(
    const TreeNode<S>& node, UltrametricVector<S>& out) {
  std::vector<std::pair<std::string, S>> leaves;  // (taxon, depth below node)
  if (node.is_leaf()) {
    leaves.emplace_back(node.label, S(0));
    return leaves;
  }
  for (const auto& child : node.children) {
    auto sub = cophenetic_rec(child, out);
    for (auto& [name, d] : sub) d += child.length;
    for (const auto& [a, da] : leaves)
      for (const auto& [b, db] : sub) {
        std::size_t ia = out.map.taxon_index(a);
        std::size_t ib = out.map.taxon_index(b);
        out.coords[out.map.pair_index(ia, ib)] = da + db;
      }
    leaves.insert(leaves.end(), sub.begin(), sub.end());
  }
  return leaves;
}

}  // namespace detail

template <class S>
UltrametricVector<S> cophenetic(const PhyloTree<S>& tree, double tol = 1e-8) {
  if (!is_equidistant(tree, tol))
    throw ValidationError("cophenetic: tree is not equidistant");
  UltrametricVector<S> out;
  out.map = PairIndexMap::from_taxa(tree_taxa(tree));
  if (out.map.num_taxa() < 2)
    throw ValidationError("cophenetic: need at least two taxa");
  out.coords.assign(out.map.num_pairs(), S(0));
  detail::cophenetic_rec(tree.root, out);
  return out;
}

// Single-linkage agglomeration: repeatedly merge the closest pair of
// clusters at height d/2; zero-length internal edges are collapsed so equal
// merge heights produce one multifurcating node. Input must satisfy the
// three-point condition (exactly in exact mode, within tol in float mode:
// callers gate on is_eps_ultrametric).
template <class S>
PhyloTree<S> tree_from_ultrametric(const UltrametricVector<S>& u,
                                   double tol = 1e-8) {
  const std::size_t N = u.map.num_taxa();
  if (N < 2) throw ValidationError("tree_from_ultrametric: need >= 2 taxa");

  struct Cluster {
    TreeNode<S> node;
    S height;           // distance from the cluster root down to its leaves
    std::size_t rep;    // smallest member taxon index, for tie-breaking
    std::vector<std::size_t> members;
  };
  std::vector<Cluster> active;
  active.reserve(N);
  for (std::size_t i = 0; i < N; ++i) {
    Cluster c;
    c.node.label = u.map.taxon(i);
    c.height = S(0);
    c.rep = i;
    c.members = {i};
    active.push_back(std::move(c));
  }

  auto linkage = [&](const Cluster& a, const Cluster& b) {
    // single linkage: min over cross pairs
    bool first = true;
    S best{};
    for (std::size_t i : a.members)
      for (std::size_t j : b.members) {
        const S& d = u.coords[u.map.pair_index(i, j)];
        if (first || d < best) {
          best = d;
          first = false;
        }
      }
    return best;
  };

  double scale = 1;
  if constexpr (!is_exact_v<S>) {
    for (const S& v : u.coords) scale = std::max(scale, std::abs(v));
  }

  while (active.size() > 1) {
    std::size_t bi = 0, bj = 1;
    S best = linkage(active[0], active[1]);
    for (std::size_t i = 0; i < active.size(); ++i)
      for (std::size_t j = i + 1; j < active.size(); ++j) {
        if (i == 0 && j == 1) continue;
        S d = linkage(active[i], active[j]);
        if (d < best || (d == best && std::min(active[i].rep, active[j].rep) <
                                          std::min(active[bi].rep, active[bj].rep))) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    Cluster merged;
    merged.height = best / S(2);
    if (merged.height < active[bi].height || merged.height < active[bj].height)
      throw ValidationError("tree_from_ultrametric: not ultrametric");
    merged.rep = std::min(active[bi].rep, active[bj].rep);
    merged.members = active[bi].members;
    merged.members.insert(merged.members.end(), active[bj].members.begin(),
                          active[bj].members.end());
    active[bi].node.length = merged.height - active[bi].height;
    active[bj].node.length = merged.height - active[bj].height;
    merged.node.children.push_back(std::move(active[bi].node));
    merged.node.children.push_back(std::move(active[bj].node));
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bj));
    active[bi] = std::move(merged);
  }

  PhyloTree<S> tree;
  tree.root = std::move(active[0].node);

  // Collapse zero-length internal edges into multifurcations.
  auto collapse = [&](auto&& self, TreeNode<S>& node) -> void {
    std::vector<TreeNode<S>> kept;
    for (auto& child : node.children) {
      self(self, child);
      bool zero = false;
      if (!child.is_leaf()) {
        if constexpr (is_exact_v<S>) zero = child.length == S(0);
        else zero = std::abs(child.length) <= tol * scale;
      }
      if (zero) {
        for (auto& g : child.children) kept.push_back(std::move(g));
      } else {
        kept.push_back(std::move(child));
      }
    }
    node.children = std::move(kept);
  };
  collapse(collapse, tree.root);
  return tree;
}

}  // namespace tropo
