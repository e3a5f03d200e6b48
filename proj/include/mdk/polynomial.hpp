#pragma once

// Complex univariate polynomials: simultaneous root finding and the optimal
// assignment used to match roots between continuation steps.

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "mdk/error.hpp"

namespace mdk {

using cplx = std::complex<double>;
using Poly = std::vector<cplx>;  // coefficient of x^k at index k

inline cplx horner(const Poly& p, cplx x) {
  cplx r = 0;
  for (std::size_t k = p.size(); k-- > 0;) r = r * x + p[k];
  return r;
}

/// p(x) and p'(x) together.
inline std::pair<cplx, cplx> horner2(const Poly& p, cplx x) {
  cplx r = 0, dr = 0;
  for (std::size_t k = p.size(); k-- > 0;) {
    dr = dr * x + r;
    r = r * x + p[k];
  }
  return {r, dr};
}

/// sum |c_k| |x|^k, the scale of rounding error in p(x).
inline double horner_abs(const Poly& p, double ax) {
  double r = 0;
  for (std::size_t k = p.size(); k-- > 0;) r = r * ax + std::abs(p[k]);
  return r;
}

inline Poly derivative(const Poly& p) {
  Poly d(p.size() > 1 ? p.size() - 1 : 1, 0.0);
  for (std::size_t k = 1; k < p.size(); ++k) d[k - 1] = double(k) * p[k];
  return d;
}

inline int degree(const Poly& p) {
  int d = static_cast<int>(p.size()) - 1;
  while (d > 0 && p[d] == cplx(0)) --d;
  return d;
}

struct RootOptions {
  double tol = 1e-10;  // accept when |p/p'| < tol * max(1, |x|)
  int max_iter = 400;
};

struct RootResult {
  std::vector<cplx> roots;
  double residual = 0;        // max |p(root)|
  double newton_step = 0;     // max |p/p'| / max(1,|root|)
  bool used_fallback = false;
};

namespace detail {

inline std::vector<cplx> initial_guess(const Poly& p, int n) {
  // radius from the geometric mean of |c_0/c_n|, a common Aberth start
  const double r = std::pow(std::abs(p[0]) / std::abs(p[n]), 1.0 / n);
  std::vector<cplx> z(n);
  for (int k = 0; k < n; ++k) z[k] = std::polar(r > 0 ? r : 1.0, 2 * std::numbers::pi * k / n + 0.4);
  return z;
}

inline bool aberth(const Poly& p, int n, std::vector<cplx>& z, int max_iter) {
  std::vector<char> done(n, 0);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int it = 0; it < max_iter; ++it) {
    int active = 0;
    for (int i = 0; i < n; ++i) {
      if (done[i]) continue;
      auto [v, dv] = horner2(p, z[i]);
      if (std::abs(v) <= 4 * eps * horner_abs(p, std::abs(z[i]))) {
        done[i] = 1;
        continue;
      }
      ++active;
      cplx ratio = v / dv;
      cplx sum = 0;
      for (int j = 0; j < n; ++j)
        if (j != i) sum += 1.0 / (z[i] - z[j]);
      cplx w = ratio / (1.0 - ratio * sum);
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return false;
      z[i] -= w;
      if (std::abs(w) <= 4 * eps * std::abs(z[i])) done[i] = 1;
    }
    if (active == 0) return true;
  }
  return false;
}

inline std::vector<cplx> companion_roots(const Poly& p, int n) {
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) C(i, i - 1) = 1;
  for (int i = 0; i < n; ++i) C(i, n - 1) = -p[i] / p[n];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::RootFindingFailure, "companion eigenvalue solve failed");
  std::vector<cplx> z(n);
  for (int i = 0; i < n; ++i) z[i] = es.eigenvalues()(i);
  return z;
}

}  // namespace detail

/// All roots of p with multiplicity. `warm` (same count) seeds the iteration,
/// which is what keeps continuation cheap.
inline RootResult find_roots(const Poly& p, const RootOptions& opt = {},
                             const std::vector<cplx>* warm = nullptr) {
  const int n = degree(p);
  RootResult out;
  if (n <= 0) return out;
  if (p[0] == cplx(0)) throw Error(ErrorCode::RootFindingFailure, "zero root not supported (x = 0 is excluded)");

  std::vector<cplx> z = (warm && static_cast<int>(warm->size()) == n) ? *warm : detail::initial_guess(p, n);
  bool ok = detail::aberth(p, n, z, opt.max_iter);
  if (!ok) {
    z = detail::companion_roots(p, n);
    detail::aberth(p, n, z, 50);  // polish
    out.used_fallback = true;
  }
  for (const cplx& r : z) {
    auto [v, dv] = horner2(p, r);
    out.residual = std::max(out.residual, std::abs(v));
    const double noise = 64 * std::numeric_limits<double>::epsilon() * horner_abs(p, std::abs(r));
    // a root already at rounding level counts as converged even at a multiple root
    const double step = std::abs(v) <= noise ? 0.0 : std::abs(v / dv) / std::max(1.0, std::abs(r));
    out.newton_step = std::max(out.newton_step, step);
  }
  if (!(out.newton_step < opt.tol) && !out.used_fallback) {
    // retry from scratch through the eigenvalue route
    z = detail::companion_roots(p, n);
    detail::aberth(p, n, z, 50);
    out.used_fallback = true;
    out.residual = out.newton_step = 0;
    for (const cplx& r : z) {
      auto [v, dv] = horner2(p, r);
      out.residual = std::max(out.residual, std::abs(v));
      const double noise = 64 * std::numeric_limits<double>::epsilon() * horner_abs(p, std::abs(r));
      out.newton_step =
          std::max(out.newton_step, std::abs(v) <= noise ? 0.0 : std::abs(v / dv) / std::max(1.0, std::abs(r)));
    }
  }
  out.roots = std::move(z);
  return out;
}

/// Minimum-cost perfect assignment (Hungarian / Kuhn-Munkres, O(n^3)).
/// Returns col[i] assigned to row i.
inline std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0), v(n + 1, 0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> col(n);
  for (int j = 1; j <= n; ++j) col[p[j] - 1] = j - 1;
  return col;
}

/// Relabel `next` so that next[i] continues prev[i], minimizing the total
/// displacement. If swapping the targets of two rows changes the cost by less
/// than `ambiguity` while those targets are farther apart than `merged`, the
/// pairing is ambiguous and an error is raised; targets closer than `merged`
/// are a merging pair and either label is fine.
inline std::vector<cplx> match_roots(const std::vector<cplx>& prev, const std::vector<cplx>& next,
                                     double ambiguity = 1e-12, double merged = 1e-6) {
  const std::size_t n = prev.size();
  std::vector<std::vector<double>> cost(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cost[i][j] = std::abs(prev[i] - next[j]);
  const std::vector<int> col = hungarian(cost);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = i + 1; k < n; ++k) {
      const double here = cost[i][col[i]] + cost[k][col[k]];
      const double swapped = cost[i][col[k]] + cost[k][col[i]];
      if (swapped - here < ambiguity && std::abs(next[col[i]] - next[col[k]]) > merged)
        throw Error(ErrorCode::AmbiguousMatching, "two root pairings within tolerance");
    }
  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = next[col[i]];
  return out;
}

/// Sorted by argument in [0, 2pi), then modulus: a deterministic labelling.
inline void sort_by_argument(std::vector<cplx>& z) {
  auto key = [](cplx w) {
    double a = std::arg(w);
    if (a < -1e-14) a += 2 * std::numbers::pi;
    if (a < 0) a = 0;
    return std::make_pair(a, std::abs(w));
  };
  std::sort(z.begin(), z.end(), [&](cplx u, cplx w) { return key(u) < key(w); });
}

}  // namespace mdk
