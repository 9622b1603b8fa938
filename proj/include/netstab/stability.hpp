/**
 * @file stability.hpp
 * @brief Sufficient conditions for local stability of a homogeneous
 *        equilibrium, the exact spectral verdict, and coupling thresholds.
 *
 * Condition (a) asks the averaged patch Jacobian to be diagonally dominant
 * with non-positive diagonal. Condition (b) asks the network Fiedler value
 * to reach tau, the largest Gershgorin right edge among the non-first rows
 * of P^{-1} Df P, where P stacks per-layer Laplacian eigenvectors with the
 * all-ones vector first and every other column scaled by c.
 *
 * The conditions are sufficient only. When they fail the theorem verdict is
 * "inconclusive"; instability is decided by the spectrum alone.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "netstab/assembly.hpp"
#include "netstab/error.hpp"
#include "netstab/graph.hpp"
#include "netstab/linalg.hpp"

namespace netstab {

// ---------------------------------------------------------------- condition (a)

struct ConditionA {
  bool holds = false;
  double epsilon = 0.0;
  bool strict = false;
  std::vector<double> row_margins;
};

/**
 * @brief Diagonal dominance of the averaged Jacobian:
 *        -a_pp >= sum_{q != p} |a_pq| + epsilon for every row p.
 *
 * Margins within 1e-12 (1 + row absolute sum) of zero count as zero so that
 * exact equalities survive rounding. In strict mode every margin must be
 * positive beyond that slack.
 */
[[nodiscard]] inline ConditionA check_condition_a(const DenseMatrix& avg_j, double epsilon,
                                                  bool strict = false) {
  detail::require_square(avg_j, "check_condition_a");
  detail::require_finite(avg_j, "check_condition_a");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw InvalidArgument("check_condition_a: epsilon must be finite and >= 0");
  }
  ConditionA out;
  out.epsilon = epsilon;
  out.strict = strict;
  out.holds = true;
  for (std::size_t p = 0; p < avg_j.rows(); ++p) {
    double off = 0.0;
    double abs_sum = 0.0;
    for (std::size_t q = 0; q < avg_j.cols(); ++q) {
      abs_sum += std::abs(avg_j(p, q));
      if (q != p) off += std::abs(avg_j(p, q));
    }
    const double margin = -avg_j(p, p) - off - epsilon;
    const double slack = 1e-12 * (1.0 + abs_sum);
    out.row_margins.push_back(margin);
    const bool row_ok = strict ? margin > slack : margin >= -slack;
    if (!row_ok || avg_j(p, p) > slack) out.holds = false;
  }
  return out;
}

// ---------------------------------------------------------------- basis

struct SimilarityBasis {
  std::vector<DenseMatrix> per_layer;
  std::vector<std::vector<double>> lambda;
  double scaling = 1e-6;
  DenseMatrix p;
};

inline constexpr double kDefaultBasisScaling = 1e-6;

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Orthonormal Laplacian eigenvectors with 1/sqrt(m) first, eigenvalues ascending.
inline std::pair<DenseMatrix, std::vector<double>> laplacian_eigenbasis(const DenseMatrix& l) {
  const std::size_t m = l.rows();
  auto spec = sym_eigen(l);
  const double zero_tol = 1e-10 * std::max(1.0, l.max_abs());

  std::vector<std::vector<double>> cols(m);
  for (std::size_t j = 0; j < m; ++j) cols[j] = spec.eigenvectors.column(j);

  std::size_t zeros = 0;
  while (zeros < m && std::abs(spec.eigenvalues[zeros]) <= zero_tol) ++zeros;
  if (zeros == 0) throw InvalidArgument("build_basis: Laplacian has no zero eigenvalue");

  const std::vector<double> ones(m, 1.0 / std::sqrt(static_cast<double>(m)));
  std::size_t best = 0;
  for (std::size_t j = 1; j < zeros; ++j) {
    if (std::abs(dot(cols[j], ones)) > std::abs(dot(cols[best], ones))) best = j;
  }

  // Null-space vectors other than the one closest to 1 are re-orthonormalised against 1.
  std::vector<std::vector<double>> basis{ones};
  std::vector<double> values{0.0};
  for (std::size_t j = 0; j < m; ++j) {
    if (j == best) continue;
    auto v = cols[j];
    if (j < zeros) {
      for (const auto& u : basis) {
        const double proj = dot(v, u);
        for (std::size_t k = 0; k < m; ++k) v[k] -= proj * u[k];
      }
      double norm = std::sqrt(dot(v, v));
      if (norm < 1e-8) throw InvalidArgument("build_basis: degenerate Laplacian eigenbasis");
      for (double& x : v) x /= norm;
    }
    basis.push_back(std::move(v));
    values.push_back(j < zeros ? 0.0 : spec.eigenvalues[j]);
  }

  DenseMatrix q(m, m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i) q(i, j) = basis[j][i];
  return {std::move(q), std::move(values)};
}

}  // namespace detail

/**
 * @brief Per-layer eigenvector matrices P_i: first column exactly all ones,
 *        remaining columns unit eigenvectors scaled by c, eigenvalues
 *        non-decreasing. P is their direct sum.
 */
[[nodiscard]] inline SimilarityBasis build_basis(const LaplacianSet& set, double c) {
  if (!(c > 0.0 && c <= 1.0)) {
    throw InvalidArgument("build_basis: scaling c must lie in (0, 1], got " + std::to_string(c));
  }
  SimilarityBasis out;
  out.scaling = c;
  for (const auto& l : set.matrices) {
    detail::require_laplacian(l, "build_basis");
    const std::size_t m = l.rows();
    auto [q, values] = detail::laplacian_eigenbasis(l);
    for (std::size_t i = 0; i < m; ++i) {
      q(i, 0) = 1.0;
      for (std::size_t j = 1; j < m; ++j) q(i, j) *= c;
    }
    out.per_layer.push_back(std::move(q));
    out.lambda.push_back(std::move(values));
  }
  out.p = direct_sum(std::span<const DenseMatrix>(out.per_layer));
  return out;
}

// ---------------------------------------------------------------- condition (b)

struct TauResult {
  /// Max Gershgorin right edge over non-first rows of each block; -inf if there are none.
  double tau = -std::numeric_limits<double>::infinity();
  /// Same quantity over the first row of each block (the averaged-Jacobian rows).
  double first_rows_edge = -std::numeric_limits<double>::infinity();
  DenseMatrix transformed;
};

[[nodiscard]] inline TauResult compute_tau_detail(const CoupledSystem& system,
                                                  const HomogeneousEquilibrium& eq,
                                                  const SimilarityBasis& basis) {
  const DenseMatrix df = reaction_jacobian(system, eq.stacked);
  if (basis.p.rows() != df.rows()) {
    throw InvalidArgument("compute_tau: basis is " + basis.p.shape() + " but the system is " +
                          df.shape());
  }
  TauResult out;
  out.transformed = similarity_transform(df, basis.p);
  const auto discs = gershgorin_discs(out.transformed);
  const std::size_t m = system.patches();
  for (const auto& d : discs) {
    auto& slot = (d.row_index % m == 0) ? out.first_rows_edge : out.tau;
    slot = std::max(slot, d.right_edge());
  }
  return out;
}

[[nodiscard]] inline double compute_tau(const CoupledSystem& system,
                                        const HomogeneousEquilibrium& eq,
                                        const SimilarityBasis& basis) {
  return compute_tau_detail(system, eq, basis).tau;
}

/// tau for each scaling c; pairs of (c, tau).
[[nodiscard]] inline std::vector<std::pair<double, double>> tau_sweep(
    const CoupledSystem& system, const HomogeneousEquilibrium& eq,
    std::span<const double> scalings) {
  std::vector<std::pair<double, double>> out;
  for (double c : scalings) {
    out.emplace_back(c, compute_tau(system, eq, build_basis(system.laplacians(), c)));
  }
  return out;
}

inline const std::vector<double>& default_tau_sweep_scalings() {
  static const std::vector<double> values{1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  return values;
}

struct ConditionB {
  bool holds = false;
  double lambda2 = 0.0;
  double tau = 0.0;
  double scaling_c = kDefaultBasisScaling;
  double first_rows_edge = 0.0;
};

struct ConditionReport {
  ConditionA condition_a;
  ConditionB condition_b;
  bool sufficient_stable = false;

  [[nodiscard]] std::string_view verdict() const noexcept {
    return sufficient_stable ? "sufficient_stable" : "inconclusive";
  }
};

[[nodiscard]] inline ConditionReport theorem_verdict(const CoupledSystem& system,
                                                     const HomogeneousEquilibrium& eq,
                                                     double epsilon = 0.0,
                                                     double c = kDefaultBasisScaling,
                                                     bool strict = false) {
  ConditionReport out;
  out.condition_a = check_condition_a(average_jacobian(system, eq), epsilon, strict);
  const auto basis = build_basis(system.laplacians(), c);
  const auto tau = compute_tau_detail(system, eq, basis);
  out.condition_b.lambda2 = system.laplacians().fiedler_min;
  out.condition_b.tau = tau.tau;
  out.condition_b.scaling_c = c;
  out.condition_b.first_rows_edge = tau.first_rows_edge;
  out.condition_b.holds = out.condition_b.lambda2 >= tau.tau;
  out.sufficient_stable = out.condition_a.holds && out.condition_b.holds;
  return out;
}

// ---------------------------------------------------------------- spectrum

enum class Verdict { stable, unstable, marginal };

[[nodiscard]] constexpr std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::stable: return "stable";
    case Verdict::unstable: return "unstable";
    case Verdict::marginal: return "marginal";
  }
  return "marginal";
}

inline constexpr double kVerdictBand = 1e-9;

[[nodiscard]] constexpr Verdict classify_abscissa(double abscissa) noexcept {
  if (abscissa < -kVerdictBand) return Verdict::stable;
  if (abscissa > kVerdictBand) return Verdict::unstable;
  return Verdict::marginal;
}

struct StabilityReport {
  std::optional<ConditionReport> condition;
  std::vector<Complex> spectrum;
  double abscissa = 0.0;
  Verdict spectral_verdict = Verdict::marginal;
  double lambda2 = 0.0;
  std::vector<std::string> notes;
};

[[nodiscard]] inline StabilityReport spectral_verdict(const CoupledSystem& system,
                                                      const HomogeneousEquilibrium& eq) {
  StabilityReport out;
  out.spectrum = gen_eigenvalues(coupled_jacobian(system, eq.stacked));
  out.abscissa = spectral_abscissa(out.spectrum);
  out.spectral_verdict = classify_abscissa(out.abscissa);
  out.lambda2 = system.laplacians().fiedler_min;
  return out;
}

struct AnalysisOptions {
  double epsilon = 0.0;
  double basis_scaling = kDefaultBasisScaling;
  bool strict = false;
};

/// Theorem conditions plus the exact spectrum.
[[nodiscard]] inline StabilityReport analyze_stability(const CoupledSystem& system,
                                                       const HomogeneousEquilibrium& eq,
                                                       const AnalysisOptions& opt = {}) {
  auto out = spectral_verdict(system, eq);
  out.condition = theorem_verdict(system, eq, opt.epsilon, opt.basis_scaling, opt.strict);
  out.notes = eq.warnings;
  for (std::size_t i = 1; i <= system.variables(); ++i) {
    if (!is_connected(system.network(), i)) {
      out.notes.push_back("layer " + std::to_string(i) + " is disconnected (lambda2 = 0)");
    }
  }
  if (out.condition->sufficient_stable && out.spectral_verdict != Verdict::stable) {
    out.notes.push_back("theorem conditions hold but the spectrum is not strictly stable");
  }
  return out;
}

// ---------------------------------------------------------------- threshold

struct ThresholdResult {
  double s_star = 0.0;
  double lambda2 = 0.0;
  double abscissa = 0.0;
  double abscissa_lo = 0.0;
  double abscissa_hi = 0.0;
  int iterations = 0;
};

inline constexpr double kThresholdTolerance = 1e-6;

namespace detail {

/// Abscissa of Df - s L, reusing Df and L across scales.
class ScaledAbscissa {
 public:
  ScaledAbscissa(const CoupledSystem& system, const HomogeneousEquilibrium& eq)
      : df_(reaction_jacobian(system, eq.stacked)), l_(system.block_laplacian()) {}

  double operator()(double s) const {
    const auto spec = gen_eigenvalues(df_ - s * l_);
    return spectral_abscissa(spec);
  }

 private:
  DenseMatrix df_;
  DenseMatrix l_;
};

}  // namespace detail

/**
 * @brief Weight scale s* at which the spectral abscissa of Df - s L crosses
 *        zero, by bisection to a bracket width of 1e-6.
 */
[[nodiscard]] inline ThresholdResult coupling_threshold(const CoupledSystem& system,
                                                        const HomogeneousEquilibrium& eq,
                                                        double s_lo, double s_hi) {
  if (!std::isfinite(s_lo) || !std::isfinite(s_hi) || s_lo < 0.0 || s_hi <= s_lo) {
    throw InvalidArgument("coupling_threshold: need 0 <= lo < hi, got [" + std::to_string(s_lo) +
                          ", " + std::to_string(s_hi) + "]");
  }
  const detail::ScaledAbscissa abscissa(system, eq);
  ThresholdResult out;
  out.abscissa_lo = abscissa(s_lo);
  out.abscissa_hi = abscissa(s_hi);
  if (!(out.abscissa_lo * out.abscissa_hi < 0.0)) {
    throw InvalidArgument("coupling_threshold: abscissa has the same sign at both ends (" +
                          std::to_string(out.abscissa_lo) + " at " + std::to_string(s_lo) +
                          ", " + std::to_string(out.abscissa_hi) + " at " +
                          std::to_string(s_hi) + ")");
  }
  double lo = s_lo;
  double hi = s_hi;
  double f_lo = out.abscissa_lo;
  while (hi - lo > kThresholdTolerance) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = abscissa(mid);
    ++out.iterations;
    if (f_mid == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  out.s_star = 0.5 * (lo + hi);
  out.abscissa = abscissa(out.s_star);
  out.lambda2 = out.s_star * system.laplacians().fiedler_min;
  return out;
}

// ---------------------------------------------------------------- Weyl

/// Every sorted eigenvalue of L plus the added edges is at least the old one minus 1e-10.
[[nodiscard]] inline bool weyl_check(const DenseMatrix& l, std::span<const LayerEdge> added) {
  detail::require_laplacian(l, "weyl_check");
  const std::size_t m = l.rows();
  DenseMatrix aug = l;
  for (const auto& e : added) {
    if (e.u < 1 || e.u > m || e.v < 1 || e.v > m || e.u == e.v || !(e.weight >= 0.0)) {
      throw InvalidArgument("weyl_check: invalid edge (" + std::to_string(e.u) + "," +
                            std::to_string(e.v) + ")");
    }
    const std::size_t a = e.u - 1;
    const std::size_t b = e.v - 1;
    aug(a, a) += e.weight;
    aug(b, b) += e.weight;
    aug(a, b) -= e.weight;
    aug(b, a) -= e.weight;
  }
  const auto before = sym_eigen(l).eigenvalues;
  const auto after = sym_eigen(aug).eigenvalues;
  for (std::size_t j = 0; j < m; ++j)
    if (after[j] < before[j] - 1e-10) return false;
  return true;
}

}  // namespace netstab
