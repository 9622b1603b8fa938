#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "netstab/netstab.hpp"

namespace netstab::testing {

// Example 1: Holling type II patches 1 and 3, ratio-dependent patch 2.
inline PatchModel ex1_rm() { return PatchModel::rosenzweig_macarthur(3.0 / 13.0, 0.1, 1.0 / 6.0); }
inline PatchModel ex1_rd() { return PatchModel::ratio_dependent(9.0 / 5.0, 9.0 / 5.0, 0.25); }

inline std::vector<LayerEdge> ex1_edges(double w23) {
  return {{1, 2, 0.0}, {1, 3, 0.1}, {2, 3, w23}};
}

inline CoupledSystem example1(int set) {
  const double prey_w23 = set == 1 ? 1.0 : 0.1;
  LayeredNetwork net(3, {ex1_edges(prey_w23), ex1_edges(1.0)});
  return CoupledSystem({ex1_rm(), ex1_rd(), ex1_rm()}, net);
}

inline const std::vector<double> kEx1Equilibrium{0.2, 0.16};

// Example 2: Lotka-Volterra at v1, Rosenzweig-MacArthur at v2..v5.
inline PatchModel ex2_lv() { return PatchModel::lotka_volterra(5.5, 4.9, 0.7, 0.3); }
inline PatchModel ex2_rm() { return PatchModel::rosenzweig_macarthur(2.0, 0.2, 0.3); }

inline std::vector<LayerEdge> ex2_prey_edges() {
  return {{1, 2, 2}, {1, 3, 1}, {1, 4, 2}, {2, 3, 1}, {2, 5, 2}, {3, 4, 1}, {3, 5, 1}};
}
inline std::vector<LayerEdge> ex2_predator_edges() {
  return {{1, 2, 2}, {1, 3, 1}, {1, 4, 1}, {2, 3, 1}, {2, 5, 2}, {3, 4, 2}, {3, 5, 1}};
}
inline std::vector<LayerEdge> ex2_weak_edges() {
  return {{1, 2, 0.01}, {1, 3, 0.01}, {1, 4, 0.01}, {2, 3, 1.0},
          {2, 5, 0.01}, {3, 4, 1.0},  {3, 5, 0.01}};
}

inline CoupledSystem example2(int set) {
  std::vector<PatchModel> models{ex2_lv(), ex2_rm(), ex2_rm(), ex2_rm(), ex2_rm()};
  if (set == 1) return CoupledSystem(models, LayeredNetwork(5, {ex2_prey_edges(), ex2_predator_edges()}));
  return CoupledSystem(models, LayeredNetwork::uniform(5, 2, ex2_weak_edges()));
}

inline const std::vector<double> kEx2Equilibrium{3.0 / 7.0, 55.0 / 49.0};

/// Real roots of x^3 + a x^2 + b x + c with three real roots (trigonometric form), ascending.
inline std::vector<double> cubic_real_roots(double a, double b, double c) {
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double r = 2.0 * std::sqrt(std::max(0.0, -p / 3.0));
  const double arg = p == 0.0 ? 0.0 : std::clamp(3.0 * q / (p * r), -1.0, 1.0);
  const double phi = std::acos(arg) / 3.0;
  std::vector<double> roots;
  for (int k = 0; k < 3; ++k)
    roots.push_back(r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0) - a / 3.0);
  std::sort(roots.begin(), roots.end());
  return roots;
}

/// Eigenvalues of a symmetric 3x3 from its characteristic polynomial.
inline std::vector<double> sym3_eigenvalues(const DenseMatrix& m) {
  const double tr = m.trace();
  const double minors = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) -
                        m(0, 2) * m(2, 0) + m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  return cubic_real_roots(-tr, minors, -determinant(m));
}

inline DenseMatrix random_matrix(std::mt19937_64& rng, std::size_t n, double lo = -1.0,
                                 double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  DenseMatrix a(n, n);
  for (double& v : a.data()) v = u(rng);
  return a;
}

inline DenseMatrix random_symmetric(std::mt19937_64& rng, std::size_t n) {
  auto a = random_matrix(rng, n);
  return 0.5 * (a + a.transpose());
}

/// Random layer on m patches; each pair present with probability p_edge.
inline std::vector<LayerEdge> random_edges(std::mt19937_64& rng, std::size_t m, double p_edge,
                                           double w_lo = 0.1, double w_hi = 2.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> w(w_lo, w_hi);
  std::vector<LayerEdge> edges;
  for (std::size_t a = 1; a <= m; ++a)
    for (std::size_t b = a + 1; b <= m; ++b)
      if (u(rng) < p_edge) edges.push_back({a, b, w(rng)});
  return edges;
}

/// Greedy matching of two spectra sorted the same way; largest pairwise distance.
inline double spectrum_distance(std::vector<Complex> a, std::vector<Complex> b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  std::vector<bool> used(b.size(), false);
  for (auto z : a) {
    std::size_t best = b.size();
    double d = INFINITY;
    for (std::size_t k = 0; k < b.size(); ++k)
      if (!used[k] && std::abs(z - b[k]) < d) {
        d = std::abs(z - b[k]);
        best = k;
      }
    used[best] = true;
    worst = std::max(worst, d);
  }
  return worst;
}

}  // namespace netstab::testing
