#pragma once

// Points of the tropical torus R^n / R*(1,...,1) and the asymmetric /
// symmetric tropical distances on it. Points are stored as plain coordinate
// vectors; two vectors represent the same torus point iff their difference
// is constant.

#include <algorithm>
#include <vector>

#include "tropoclust/scalar.hpp"

namespace tropo {

template <class S>
using TorusPoint = std::vector<S>;

inline void check_same_length(std::size_t a, std::size_t b) {
  if (a != b) throw ValidationError("torus points of different length");
}

// d(x,y) = sum_i (y_i - x_i) + n * max_i (x_i - y_i).
// Nonnegative, zero iff torus-equal, invariant under adding constants to
// either argument; a quasi-metric (triangle inequality, no symmetry).
template <class S>
S asym_dist(const TorusPoint<S>& x, const TorusPoint<S>& y) {
  check_same_length(x.size(), y.size());
  if (x.empty()) throw ValidationError("empty torus point");
  S sum(0);
  S maxdiff = x[0] - y[0];
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum += y[i] - x[i];
    S d = x[i] - y[i];
    if (d > maxdiff) maxdiff = d;
  }
  return sum + S(static_cast<int>(x.size())) * maxdiff;
}

// d_sym(x,y) = max_i (x_i - y_i) - min_j (x_j - y_j).
template <class S>
S sym_dist(const TorusPoint<S>& x, const TorusPoint<S>& y) {
  check_same_length(x.size(), y.size());
  if (x.empty()) throw ValidationError("empty torus point");
  S lo = x[0] - y[0], hi = lo;
  for (std::size_t i = 1; i < x.size(); ++i) {
    S d = x[i] - y[i];
    if (d > hi) hi = d;
    if (d < lo) lo = d;
  }
  return hi - lo;
}

// Representative with last coordinate 0.
template <class S>
TorusPoint<S> canonicalize(const TorusPoint<S>& x) {
  if (x.empty()) throw ValidationError("empty torus point");
  TorusPoint<S> r(x.size());
  const S shift = x.back();
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - shift;
  return r;
}

// Torus equality: the coordinate difference is a constant vector. In float
// mode the deviation from the mean difference is allowed up to
// tol * (1 + largest coordinate magnitude).
template <class S>
bool torus_equal(const TorusPoint<S>& x, const TorusPoint<S>& y,
                 double tol = 1e-8) {
  check_same_length(x.size(), y.size());
  if (x.empty()) throw ValidationError("empty torus point");
  if constexpr (is_exact_v<S>) {
    const S d0 = x[0] - y[0];
    for (std::size_t i = 1; i < x.size(); ++i)
      if (x[i] - y[i] != d0) return false;
    return true;
  } else {
    double mean = 0, scale = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      mean += x[i] - y[i];
      scale = std::max({scale, std::abs(x[i]), std::abs(y[i])});
    }
    mean /= static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      if (std::abs((x[i] - y[i]) - mean) > tol * (1 + scale)) return false;
    return true;
  }
}

// Tropical linear combination: coordinatewise max of point_k + coeff_k.
template <class S>
TorusPoint<S> trop_combine(const std::vector<TorusPoint<S>>& points,
                           const std::vector<S>& coeffs) {
  if (points.empty()) throw ValidationError("trop_combine: no points");
  if (points.size() != coeffs.size())
    throw ValidationError("trop_combine: points/coeffs count mismatch");
  const std::size_t n = points[0].size();
  TorusPoint<S> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = points[0][i] + coeffs[0];
  for (std::size_t k = 1; k < points.size(); ++k) {
    check_same_length(points[k].size(), n);
    for (std::size_t i = 0; i < n; ++i) {
      S v = points[k][i] + coeffs[k];
      if (v > r[i]) r[i] = v;
    }
  }
  return r;
}

template <class S>
struct HullMembership {
  bool member = false;
  std::vector<S> coeffs;  // witnesses the combination when member
};

// Tropical projection test: with lambda_k = min_i (x_i - g_k[i]), x lies in
// the tropical span of the generators iff max_k (lambda_k + g_k) recovers x.
template <class S>
HullMembership<S> trop_hull_member(const TorusPoint<S>& x,
                                   const std::vector<TorusPoint<S>>& gens,
                                   double tol = 1e-8) {
  if (gens.empty()) throw ValidationError("trop_hull_member: no generators");
  HullMembership<S> res;
  res.coeffs.resize(gens.size());
  for (std::size_t k = 0; k < gens.size(); ++k) {
    check_same_length(gens[k].size(), x.size());
    S lam = x[0] - gens[k][0];
    for (std::size_t i = 1; i < x.size(); ++i)
      lam = std::min(lam, S(x[i] - gens[k][i]));
    res.coeffs[k] = lam;
  }
  TorusPoint<S> proj = trop_combine(gens, res.coeffs);
  res.member = torus_equal(proj, x, tol);
  return res;
}

// Skewness of the asymmetric distance on the n-torus: sup d(x,y)/d(y,x)
// over distinct points equals n-1.
template <class S>
S skewness_bound(int n) {
  if (n < 2) throw ValidationError("skewness_bound: n must be >= 2");
  return S(n - 1);
}

}  // namespace tropo
