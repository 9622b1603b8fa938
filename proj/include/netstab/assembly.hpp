/**
 * @file assembly.hpp
 * @brief Couples m patch models over a layered network:
 *        x' = f(x) - L x with L the direct sum of per-layer Laplacians.
 *
 * Stacked states are variable-major: all patches' first variable, then all
 * patches' second variable, and so on. Variable i of patch j (both 1-based)
 * lives at flat index (i - 1) m + (j - 1).
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "netstab/error.hpp"
#include "netstab/graph.hpp"
#include "netstab/linalg.hpp"
#include "netstab/models.hpp"

namespace netstab {

using StackedState = std::vector<double>;

[[nodiscard]] inline std::size_t stack_index(std::size_t variable, std::size_t patch,
                                             std::size_t patches, std::size_t variables) {
  if (variable < 1 || variable > variables || patch < 1 || patch > patches) {
    throw InvalidArgument("stack_index: (variable " + std::to_string(variable) + ", patch " +
                          std::to_string(patch) + ") outside " + std::to_string(variables) + "x" +
                          std::to_string(patches));
  }
  return (variable - 1) * patches + (patch - 1);
}

/// Inverse of stack_index: returns 1-based (variable, patch).
[[nodiscard]] inline std::pair<std::size_t, std::size_t> unstack_index(std::size_t flat,
                                                                       std::size_t patches,
                                                                       std::size_t variables) {
  if (patches == 0 || flat >= patches * variables) {
    throw InvalidArgument("unstack_index: flat index " + std::to_string(flat) + " out of range");
  }
  return {flat / patches + 1, flat % patches + 1};
}

class CoupledSystem {
 public:
  CoupledSystem(std::vector<PatchModel> models, LayeredNetwork network)
      : models_(std::move(models)), network_(std::move(network)) {
    if (models_.size() != network_.patches()) {
      throw InvalidArgument("CoupledSystem: " + std::to_string(models_.size()) +
                            " models for a network of " + std::to_string(network_.patches()) +
                            " patches");
    }
    for (std::size_t j = 0; j < models_.size(); ++j) {
      if (models_[j].dim() != network_.layer_count()) {
        throw InvalidArgument("CoupledSystem: patch " + std::to_string(j + 1) + " has dimension " +
                              std::to_string(models_[j].dim()) + " but the network has " +
                              std::to_string(network_.layer_count()) + " layers");
      }
    }
    laplacians_ = make_laplacian_set(network_);
    block_laplacian_ = direct_sum(std::span<const DenseMatrix>(laplacians_.matrices));
  }

  [[nodiscard]] std::size_t patches() const noexcept { return network_.patches(); }
  [[nodiscard]] std::size_t variables() const noexcept { return network_.layer_count(); }
  [[nodiscard]] std::size_t size() const noexcept { return patches() * variables(); }
  [[nodiscard]] const std::vector<PatchModel>& models() const noexcept { return models_; }
  [[nodiscard]] const LayeredNetwork& network() const noexcept { return network_; }
  [[nodiscard]] const LaplacianSet& laplacians() const noexcept { return laplacians_; }
  [[nodiscard]] const DenseMatrix& block_laplacian() const noexcept { return block_laplacian_; }

  /// Same patch models on a different network (Laplacians rebuilt).
  [[nodiscard]] CoupledSystem with_network(LayeredNetwork network) const {
    return CoupledSystem(models_, std::move(network));
  }

  [[nodiscard]] std::size_t index(std::size_t variable, std::size_t patch) const {
    return stack_index(variable, patch, patches(), variables());
  }

  /// Local state of patch j (1-based) gathered from a stacked vector.
  [[nodiscard]] PatchState patch_state(std::span<const double> x, std::size_t patch) const {
    PatchState s(variables());
    for (std::size_t i = 1; i <= variables(); ++i) s[i - 1] = x[index(i, patch)];
    return s;
  }

  void require_state(std::span<const double> x) const {
    if (x.size() != size()) {
      throw InvalidArgument("CoupledSystem: stacked state has length " + std::to_string(x.size()) +
                            ", expected " + std::to_string(size()));
    }
    for (double v : x)
      if (!std::isfinite(v)) throw InvalidArgument("CoupledSystem: non-finite stacked state");
  }

 private:
  std::vector<PatchModel> models_;
  LayeredNetwork network_;
  LaplacianSet laplacians_;
  DenseMatrix block_laplacian_;
};

[[nodiscard]] inline DenseMatrix assemble_block_laplacian(const CoupledSystem& system) {
  return system.block_laplacian();
}

namespace detail {

template <class Fn>
auto at_patch(std::size_t patch, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const DomainError& e) {
    throw DomainError("patch " + std::to_string(patch) + ": " + e.what());
  }
}

}  // namespace detail

/// Stacked reaction terms f(x) only, without the coupling.
[[nodiscard]] inline std::vector<double> eval_reaction(const CoupledSystem& system,
                                                       std::span<const double> x) {
  system.require_state(x);
  std::vector<double> out(system.size());
  for (std::size_t j = 1; j <= system.patches(); ++j) {
    const auto local = system.patch_state(x, j);
    const auto fj = detail::at_patch(j, [&] { return system.models()[j - 1].rhs(local); });
    for (std::size_t i = 1; i <= system.variables(); ++i) out[system.index(i, j)] = fj[i - 1];
  }
  return out;
}

/// f(x) - L x.
[[nodiscard]] inline std::vector<double> eval_coupled_f(const CoupledSystem& system,
                                                        std::span<const double> x) {
  auto out = eval_reaction(system, x);
  const auto lx = system.block_laplacian() * x;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] -= lx[k];
  return out;
}

/// Same vector field written edge by edge: f - sum_k w_jk (x_ij - x_ik).
[[nodiscard]] inline std::vector<double> eval_coupled_f_edgewise(const CoupledSystem& system,
                                                                 std::span<const double> x) {
  auto out = eval_reaction(system, x);
  for (std::size_t i = 1; i <= system.variables(); ++i) {
    for (const auto& e : system.network().layer(i)) {
      const std::size_t a = system.index(i, e.u);
      const std::size_t b = system.index(i, e.v);
      out[a] -= e.weight * (x[a] - x[b]);
      out[b] -= e.weight * (x[b] - x[a]);
    }
  }
  return out;
}

/// Df(x): n x n grid of m x m diagonal blocks, entry k of block (p, q) = d f_{p,k} / d x_{q,k}.
[[nodiscard]] inline DenseMatrix reaction_jacobian(const CoupledSystem& system,
                                                   std::span<const double> x) {
  system.require_state(x);
  DenseMatrix df(system.size(), system.size());
  for (std::size_t k = 1; k <= system.patches(); ++k) {
    const auto local = system.patch_state(x, k);
    const auto jk = detail::at_patch(k, [&] { return system.models()[k - 1].jacobian(local); });
    for (std::size_t p = 1; p <= system.variables(); ++p)
      for (std::size_t q = 1; q <= system.variables(); ++q)
        df(system.index(p, k), system.index(q, k)) = jk(p - 1, q - 1);
  }
  return df;
}

/// Df(x) - L.
[[nodiscard]] inline DenseMatrix coupled_jacobian(const CoupledSystem& system,
                                                  std::span<const double> x) {
  return reaction_jacobian(system, x) - system.block_laplacian();
}

struct HomogeneousEquilibrium {
  PatchState per_patch;
  StackedState stacked;
  double residual_f = 0.0;
  double residual_L = 0.0;
  std::vector<std::string> warnings;
};

inline constexpr double kReactionResidualTolerance = 1e-10;
inline constexpr double kCouplingResidualTolerance = 1e-12;

[[nodiscard]] inline StackedState replicate(const CoupledSystem& system,
                                            std::span<const double> per_patch) {
  if (per_patch.size() != system.variables()) {
    throw InvalidArgument("replicate: per-patch state has length " +
                          std::to_string(per_patch.size()) + ", expected " +
                          std::to_string(system.variables()));
  }
  StackedState x(system.size());
  for (std::size_t i = 1; i <= system.variables(); ++i)
    for (std::size_t j = 1; j <= system.patches(); ++j) x[system.index(i, j)] = per_patch[i - 1];
  return x;
}

/**
 * @brief Replicates one per-patch state across all patches and verifies that
 *        it is an equilibrium of every patch model and of the coupling.
 *
 * Throws EquilibriumError naming the worst patch when max_j ||f_j|| > 1e-10
 * or ||L x|| > 1e-12. Non-positive components only produce a warning.
 */
[[nodiscard]] inline HomogeneousEquilibrium make_homogeneous_equilibrium(
    const CoupledSystem& system, std::span<const double> per_patch) {
  HomogeneousEquilibrium eq;
  eq.per_patch.assign(per_patch.begin(), per_patch.end());
  eq.stacked = replicate(system, per_patch);

  std::size_t worst = 1;
  for (std::size_t j = 1; j <= system.patches(); ++j) {
    const auto fj = detail::at_patch(j, [&] { return system.models()[j - 1].rhs(eq.per_patch); });
    const double r = detail::inf_norm(fj);
    if (r > eq.residual_f) {
      eq.residual_f = r;
      worst = j;
    }
  }
  eq.residual_L = detail::inf_norm(system.block_laplacian() * eq.stacked);

  if (eq.residual_f > kReactionResidualTolerance) {
    throw EquilibriumError("make_homogeneous_equilibrium: patch " + std::to_string(worst) +
                               " has reaction residual " + std::to_string(eq.residual_f) +
                               " > 1e-10",
                           worst, eq.residual_f);
  }
  if (eq.residual_L > kCouplingResidualTolerance) {
    throw EquilibriumError("make_homogeneous_equilibrium: coupling residual " +
                               std::to_string(eq.residual_L) + " > 1e-12",
                           0, eq.residual_L);
  }
  for (std::size_t i = 0; i < eq.per_patch.size(); ++i) {
    if (eq.per_patch[i] <= 0.0) {
      eq.warnings.push_back("variable " + std::to_string(i + 1) +
                            " of the homogeneous equilibrium is not positive");
    }
  }
  return eq;
}

/// (1/m) sum_k J_k(xbar); requires a homogeneous stacked state.
[[nodiscard]] inline DenseMatrix average_jacobian(const CoupledSystem& system,
                                                  std::span<const double> xbar) {
  system.require_state(xbar);
  const auto per_patch = system.patch_state(xbar, 1);
  for (std::size_t j = 2; j <= system.patches(); ++j) {
    if (system.patch_state(xbar, j) != per_patch) {
      throw InvalidArgument("average_jacobian: state is not homogeneous (patch " +
                            std::to_string(j) + " differs from patch 1)");
    }
  }
  const std::size_t n = system.variables();
  DenseMatrix sum(n, n);
  for (std::size_t k = 1; k <= system.patches(); ++k) {
    sum += detail::at_patch(k, [&] { return system.models()[k - 1].jacobian(per_patch); });
  }
  return sum * (1.0 / static_cast<double>(system.patches()));
}

[[nodiscard]] inline DenseMatrix average_jacobian(const CoupledSystem& system,
                                                  const HomogeneousEquilibrium& eq) {
  return average_jacobian(system, eq.stacked);
}

}  // namespace netstab
