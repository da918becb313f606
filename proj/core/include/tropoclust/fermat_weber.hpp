#pragma once

// Fermat-Weber sets under the asymmetric tropical distance. The set of
// minimizers of sum_s d(s, t) is a polytrope; it is carried here as the
// difference-bound matrix c[i][j] = sup{ t_j - t_i } over the set, computed
// by linear programming: one LP for the optimal value, then one re-optimized
// LP per ordered coordinate pair on the optimal face.

#include <optional>
#include <vector>

#include "tropoclust/linprog.hpp"
#include "tropoclust/pair_index.hpp"
#include "tropoclust/scalar.hpp"
#include "tropoclust/torus.hpp"
#include "tropoclust/ultrametric.hpp"

namespace tropo {

template <class S>
struct SiteSet {
  std::vector<TorusPoint<S>> points;
  std::optional<PairIndexMap> tree_map;  // present when points are tree vectors

  std::size_t size() const { return points.size(); }
  std::size_t dim() const { return points.empty() ? 0 : points[0].size(); }
};

template <class S>
SiteSet<S> make_site_set(std::vector<TorusPoint<S>> points) {
  SiteSet<S> s;
  s.points = std::move(points);
  if (s.points.empty()) throw ValidationError("site set is empty");
  for (const auto& p : s.points) check_same_length(p.size(), s.points[0].size());
  if (s.dim() < 2) throw ValidationError("sites must have length >= 2");
  return s;
}

// Tight difference-bound matrix of a polytrope, c[i][i] = 0.
template <class S>
struct Polytrope {
  std::size_t n = 0;
  std::vector<S> entries;  // row-major

  const S& at(std::size_t i, std::size_t j) const { return entries[i * n + j]; }
  S& at(std::size_t i, std::size_t j) { return entries[i * n + j]; }

  bool contains(const TorusPoint<S>& t, double tol = 1e-8) const {
    check_same_length(t.size(), n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        S slack = at(i, j) - (t[j] - t[i]);
        if constexpr (is_exact_v<S>) {
          if (slack < S(0)) return false;
        } else {
          double scale = 1 + std::abs(to_double(at(i, j)));
          if (slack < S(-tol * scale)) return false;
        }
      }
    return true;
  }
};

template <class S>
struct MedianResult {
  TorusPoint<S> median;
  std::vector<TorusPoint<S>> vertices;  // tropical vertices, canonicalized
  S fw_value{};
  int dimension = 0;
  std::optional<std::size_t> degenerate_drop;
  bool subdominant_applied = false;
};

namespace detail {

// LP over variables t_0..t_{n-2} (t_{n-1} gauged to 0) and M_0..M_{m-1}:
//   t_i + M_s >= s_i  for every site s and coordinate i,
// with total-distance objective m*sum(t) + n*sum(M); the true Fermat-Weber
// value differs from the LP value by the constant sum of all site entries.
template <class S>
LinearProgram<S> fw_region(const std::vector<TorusPoint<S>>& sites) {
  const std::size_t n = sites[0].size();
  const std::size_t m = sites.size();
  const std::size_t vars = (n - 1) + m;
  LinearProgram<S> lp;
  lp.objective.assign(vars, S(0));
  for (std::size_t i = 0; i + 1 < n; ++i)
    lp.objective[i] = S(static_cast<int>(m));
  for (std::size_t s = 0; s < m; ++s)
    lp.objective[n - 1 + s] = S(static_cast<int>(n));
  lp.rows.reserve(m * n);
  for (std::size_t s = 0; s < m; ++s)
    for (std::size_t i = 0; i < n; ++i) {
      typename LinearProgram<S>::Row row;
      row.coeffs.assign(vars, S(0));
      if (i + 1 < n) row.coeffs[i] = S(1);
      row.coeffs[n - 1 + s] = S(1);
      row.rel = Relation::GreaterEq;
      row.rhs = sites[s][i];
      lp.rows.push_back(std::move(row));
    }
  return lp;
}

template <class S>
S site_total(const std::vector<TorusPoint<S>>& sites) {
  S total(0);
  for (const auto& p : sites)
    for (const S& v : p) total += v;
  return total;
}

}  // namespace detail

// Optimal value of min_t sum_s d(s, t); always finite and >= 0.
template <class S>
S fw_value(const SiteSet<S>& sites) {
  LinearProgram<S> lp = detail::fw_region(sites.points);
  auto res = solve_lp(lp);
  if (res.status != LpStatus::Optimal)
    throw std::runtime_error("Fermat-Weber LP did not solve");
  return res.value - detail::site_total(sites.points);
}

// Difference-bound description of FW(S): c[i][j] = max t_j - t_i over the
// optimal face. The face is swept with one parametric objective per ordered
// pair, re-optimized from the previous basis.
template <class S>
Polytrope<S> fw_polytrope(const SiteSet<S>& sites) {
  const std::size_t n = sites.dim();
  Polytrope<S> poly;
  poly.n = n;
  poly.entries.assign(n * n, S(0));

  if (sites.size() == 1) {  // FW of a single site is the site itself
    const auto& s = sites.points[0];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) poly.at(i, j) = s[j] - s[i];
    return poly;
  }

  LinearProgram<S> lp = detail::fw_region(sites.points);
  auto value = solve_lp(lp);
  if (value.status != LpStatus::Optimal)
    throw std::runtime_error("Fermat-Weber LP did not solve");

  // Restrict to the optimal face: the objective is >= its minimum
  // everywhere, so a single <= row pins the face.
  typename LinearProgram<S>::Row face;
  face.coeffs = lp.objective;
  face.rel = Relation::LessEq;
  face.rhs = value.value;
  lp.rows.push_back(std::move(face));

  LpSolver<S> solver(lp);
  if (solver.solve() != LpStatus::Optimal)
    throw std::runtime_error("Fermat-Weber face LP infeasible");

  const std::size_t vars = lp.num_vars();
  std::vector<S> objective(vars, S(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      // maximize t_j - t_i  ==  minimize t_i - t_j
      std::fill(objective.begin(), objective.end(), S(0));
      if (i + 1 < n) objective[i] = S(1);
      if (j + 1 < n) objective[j] = S(-1);
      if (solver.reoptimize(objective) != LpStatus::Optimal)
        throw std::runtime_error("Fermat-Weber pair LP did not solve");
      poly.at(i, j) = -solver.value();
    }
  return poly;
}

// Minimal tropical generating set of the polytrope. The candidates are the
// negated columns g^(j) = (-c[i][j])_i: each satisfies the difference bounds
// by triangle closure, and every point t of the polytrope is recovered as
// max_j (t_j + g^(j)), so pruning hull members of the remaining candidates
// leaves exactly the tropical vertices.
template <class S>
std::vector<TorusPoint<S>> tropical_vertices(const Polytrope<S>& poly,
                                             double tol = 1e-8) {
  const std::size_t n = poly.n;
  if (n == 0) throw ValidationError("empty polytrope");
  std::vector<TorusPoint<S>> cands;
  for (std::size_t j = 0; j < n; ++j) {
    TorusPoint<S> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = -poly.at(i, j);
    g = canonicalize(g);
    bool dup = false;
    for (const auto& seen : cands)
      if (torus_equal(seen, g, tol)) {
        dup = true;
        break;
      }
    if (!dup) cands.push_back(std::move(g));
  }
  // Drop candidates generated by the others; extremes survive any order.
  std::vector<char> alive(cands.size(), 1);
  for (std::size_t k = 0; k < cands.size(); ++k) {
    std::vector<TorusPoint<S>> others;
    for (std::size_t l = 0; l < cands.size(); ++l)
      if (l != k && alive[l]) others.push_back(cands[l]);
    if (others.empty()) continue;
    if (trop_hull_member(cands[k], others, tol).member) alive[k] = 0;
  }
  std::vector<TorusPoint<S>> out;
  for (std::size_t k = 0; k < cands.size(); ++k)
    if (alive[k]) out.push_back(std::move(cands[k]));
  return out;
}

namespace detail {

template <class S>
int polytrope_dimension(const Polytrope<S>& poly, double tol = 1e-8) {
  const std::size_t n = poly.n;
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  double scale = 1;
  if constexpr (!is_exact_v<S>) {
    for (const S& v : poly.entries)
      scale = std::max(scale, std::abs(to_double(v)));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      S gap = poly.at(i, j) + poly.at(j, i);  // 0 iff t_j - t_i is pinned
      bool tight;
      if constexpr (is_exact_v<S>) tight = gap == S(0);
      else tight = std::abs(to_double(gap)) <= tol * (1 + scale);
      if (tight) parent[find(i)] = find(j);
    }
  int components = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (find(i) == i) ++components;
  return components - 1;
}

}  // namespace detail

// Tropical median: the componentwise arithmetic mean of the tropical
// vertices of FW(S). Lies in FW(S) (so it attains fw_value) and is a
// tropical combination of the sites.
template <class S>
MedianResult<S> tropical_median(const SiteSet<S>& sites, double tol = 1e-8) {
  MedianResult<S> res;
  res.fw_value = fw_value(sites);
  Polytrope<S> poly = fw_polytrope(sites);
  res.vertices = tropical_vertices(poly, tol);
  res.dimension = detail::polytrope_dimension(poly, tol);
  const std::size_t n = poly.n;
  res.median.assign(n, S(0));
  for (const auto& v : res.vertices)
    for (std::size_t i = 0; i < n; ++i) res.median[i] += v[i];
  const S count(static_cast<int>(res.vertices.size()));
  for (std::size_t i = 0; i < n; ++i) res.median[i] /= count;
  return res;
}

// Float-mode correction scheme for tree inputs. When the site count is a
// multiple of the ambient dimension the Fermat-Weber set can blow up to full
// dimension under floating point, so the most outlying site (largest total
// out-distance, ties to the smallest index) is dropped and the median is
// computed on m-1 sites. Afterwards, if the median fails the eps-ultrametric
// test at sqrt(2^-52), it is replaced by its subdominant ultrametric.
// Exact mode applies no correction.
template <class S>
MedianResult<S> corrected_tropical_median(const SiteSet<S>& sites,
                                          bool tree_mode, double tol = 1e-8) {
  if (tree_mode) {
    if (!sites.tree_map)
      throw ValidationError("tree mode requires pair-indexed sites");
    for (const auto& p : sites.points) {
      bool ok;
      if constexpr (is_exact_v<S>)
        ok = is_eps_ultrametric(p, *sites.tree_map, S(0));
      else
        ok = is_eps_ultrametric(p, *sites.tree_map, S(kSqrtEps0));
      if (!ok)
        throw ValidationError("site is not ultrametric within sqrt(2^-52)");
    }
  }

  SiteSet<S> working = sites;
  std::optional<std::size_t> dropped;
  if constexpr (!is_exact_v<S>) {
    const std::size_t m = sites.size();
    const std::size_t n = sites.dim();
    if (tree_mode && m > 1 && m % n == 0) {
      std::size_t worst = 0;
      S worst_sum(0);
      for (std::size_t i = 0; i < m; ++i) {
        S total(0);
        for (std::size_t j = 0; j < m; ++j)
          if (j != i) total += asym_dist(sites.points[i], sites.points[j]);
        if (i == 0 || total > worst_sum) {
          worst = i;
          worst_sum = total;
        }
      }
      working.points.erase(working.points.begin() +
                           static_cast<std::ptrdiff_t>(worst));
      dropped = worst;
    }
  }

  MedianResult<S> res = tropical_median(working, tol);
  res.degenerate_drop = dropped;

  if constexpr (!is_exact_v<S>) {
    if (tree_mode && min_eps(res.median, *sites.tree_map) > S(kSqrtEps0)) {
      res.median = subdominant_closure(res.median, *sites.tree_map);
      res.subdominant_applied = true;
    }
  }
  return res;
}

}  // namespace tropo
