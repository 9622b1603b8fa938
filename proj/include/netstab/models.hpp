/**
 * @file models.hpp
 * @brief Local (per-patch) dynamics: builtin predator-prey right-hand sides
 *        with analytic Jacobians, plus user-supplied models.
 *
 * State is (prey, predator) for every builtin. Evaluation at a pole throws
 * DomainError naming the offending denominator.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "netstab/error.hpp"
#include "netstab/linalg.hpp"

namespace netstab {

using PatchState = std::vector<double>;
using ParamMap = std::map<std::string, double>;

enum class ModelKind { rosenzweig_macarthur, lotka_volterra, ratio_dependent, custom };

[[nodiscard]] constexpr std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::rosenzweig_macarthur: return "rosenzweig_macarthur";
    case ModelKind::lotka_volterra: return "lotka_volterra";
    case ModelKind::ratio_dependent: return "ratio_dependent";
    case ModelKind::custom: return "custom";
  }
  return "unknown";
}

namespace detail {

inline void require_positive(double v, const char* name, const char* model) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw InvalidArgument(std::string(model) + ": parameter " + name + " must be finite and > 0");
  }
}

inline void require_state(std::span<const double> x, std::size_t dim, std::string_view model) {
  if (x.size() != dim) {
    throw InvalidArgument(std::string(model) + ": state has " + std::to_string(x.size()) +
                          " components, expected " + std::to_string(dim));
  }
  for (double v : x)
    if (!std::isfinite(v)) throw InvalidArgument(std::string(model) + ": non-finite state");
}

}  // namespace detail

/// Logistic prey with Holling type II predation:
///   x' = x(1 - x/gamma) - x y/(1 + x),  y' = beta (x/(1 + x) - alpha) y.
struct RosenzweigMacArthur {
  double gamma;
  double beta;
  double alpha;

  void validate() const {
    detail::require_positive(gamma, "gamma", "rosenzweig_macarthur");
    detail::require_positive(beta, "beta", "rosenzweig_macarthur");
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw InvalidArgument("rosenzweig_macarthur: parameter alpha must lie in (0, 1)");
    }
  }
  static void check_domain(double x) {
    if (1.0 + x == 0.0) throw DomainError("rosenzweig_macarthur: pole at 1 + x1 = 0");
  }
  [[nodiscard]] std::vector<double> rhs(std::span<const double> s) const {
    const double x = s[0], y = s[1];
    check_domain(x);
    const double h = x / (1.0 + x);
    return {x * (1.0 - x / gamma) - h * y, beta * (h - alpha) * y};
  }
  [[nodiscard]] DenseMatrix jacobian(std::span<const double> s) const {
    const double x = s[0], y = s[1];
    check_domain(x);
    const double d = (1.0 + x) * (1.0 + x);
    return {{1.0 - 2.0 * x / gamma - y / d, -x / (1.0 + x)},
            {beta * y / d, beta * (x / (1.0 + x) - alpha)}};
  }
  [[nodiscard]] ParamMap params() const { return {{"alpha", alpha}, {"beta", beta}, {"gamma", gamma}}; }
};

/// x' = r x - c x y,  y' = b x y - m y.
struct LotkaVolterra {
  double r;
  double c;
  double b;
  double m;

  void validate() const {
    detail::require_positive(r, "r", "lotka_volterra");
    detail::require_positive(c, "c", "lotka_volterra");
    detail::require_positive(b, "b", "lotka_volterra");
    detail::require_positive(m, "m", "lotka_volterra");
  }
  [[nodiscard]] std::vector<double> rhs(std::span<const double> s) const {
    const double x = s[0], y = s[1];
    return {r * x - c * x * y, b * x * y - m * y};
  }
  [[nodiscard]] DenseMatrix jacobian(std::span<const double> s) const {
    const double x = s[0], y = s[1];
    return {{r - c * y, -c * x}, {b * y, b * x - m}};
  }
  [[nodiscard]] ParamMap params() const { return {{"b", b}, {"c", c}, {"m", m}, {"r", r}}; }
};

/// Logistic prey with ratio-dependent predation:
///   x' = x(1 - x) - c x y/(x + y),  y' = m (b x/(x + y) - 1) y.
struct RatioDependent {
  double c;
  double b;
  double m;

  void validate() const {
    detail::require_positive(c, "c", "ratio_dependent");
    detail::require_positive(b, "b", "ratio_dependent");
    detail::require_positive(m, "m", "ratio_dependent");
  }
  static void check_domain(double x, double y) {
    if (!(x + y > 0.0)) {
      throw DomainError("ratio_dependent: denominator x1 + x2 must be > 0 (got " +
                        std::to_string(x + y) + ")");
    }
  }
  [[nodiscard]] std::vector<double> rhs(std::span<const double> st) const {
    const double x = st[0], y = st[1];
    check_domain(x, y);
    const double s = x + y;
    return {x * (1.0 - x) - c * x * y / s, m * (b * x / s - 1.0) * y};
  }
  [[nodiscard]] DenseMatrix jacobian(std::span<const double> st) const {
    const double x = st[0], y = st[1];
    check_domain(x, y);
    const double s2 = (x + y) * (x + y);
    return {{1.0 - 2.0 * x - c * y * y / s2, -c * x * x / s2},
            {m * b * y * y / s2, m * (b * x * x / s2 - 1.0)}};
  }
  [[nodiscard]] ParamMap params() const { return {{"b", b}, {"c", c}, {"m", m}}; }
};

/// Arbitrary C^1 dynamics; without a Jacobian callback, central differences are used.
struct CustomModel {
  using Rhs = std::function<std::vector<double>(std::span<const double>)>;
  using Jacobian = std::function<DenseMatrix(std::span<const double>)>;

  std::size_t dim;
  Rhs f;
  std::optional<Jacobian> jac;
  std::string name = "custom";
};

class PatchModel;
inline DenseMatrix fd_jacobian(const PatchModel& model, std::span<const double> state,
                               std::optional<double> h = std::nullopt);

class PatchModel {
 public:
  using Variant = std::variant<RosenzweigMacArthur, LotkaVolterra, RatioDependent, CustomModel>;

  [[nodiscard]] static PatchModel rosenzweig_macarthur(double gamma, double beta, double alpha) {
    return PatchModel(RosenzweigMacArthur{gamma, beta, alpha});
  }
  [[nodiscard]] static PatchModel lotka_volterra(double r, double c, double b, double m) {
    return PatchModel(LotkaVolterra{r, c, b, m});
  }
  [[nodiscard]] static PatchModel ratio_dependent(double c, double b, double m) {
    return PatchModel(RatioDependent{c, b, m});
  }
  [[nodiscard]] static PatchModel custom(std::size_t dim, CustomModel::Rhs f,
                                         std::optional<CustomModel::Jacobian> jac = std::nullopt,
                                         std::string name = "custom") {
    if (dim < 1) throw InvalidArgument("custom model: dim must be >= 1");
    if (!f) throw InvalidArgument("custom model: right-hand side is empty");
    return PatchModel(CustomModel{dim, std::move(f), std::move(jac), std::move(name)});
  }

  /// Builds a builtin from its kind name and a complete parameter map.
  [[nodiscard]] static PatchModel from_params(std::string_view kind, const ParamMap& params) {
    auto take = [&](const char* key) {
      const auto it = params.find(key);
      if (it == params.end()) {
        throw InvalidArgument(std::string(kind) + ": missing parameter '" + key + "'");
      }
      return it->second;
    };
    auto expect_count = [&](std::size_t n) {
      if (params.size() != n) {
        throw InvalidArgument(std::string(kind) + ": expected exactly " + std::to_string(n) +
                              " parameters, got " + std::to_string(params.size()));
      }
    };
    if (kind == "rosenzweig_macarthur") {
      expect_count(3);
      return rosenzweig_macarthur(take("gamma"), take("beta"), take("alpha"));
    }
    if (kind == "lotka_volterra") {
      expect_count(4);
      return lotka_volterra(take("r"), take("c"), take("b"), take("m"));
    }
    if (kind == "ratio_dependent") {
      expect_count(3);
      return ratio_dependent(take("c"), take("b"), take("m"));
    }
    throw InvalidArgument("unknown builtin model kind '" + std::string(kind) + "'");
  }

  [[nodiscard]] ModelKind kind() const noexcept {
    return static_cast<ModelKind>(impl_.index());
  }
  [[nodiscard]] std::string name() const {
    if (const auto* c = std::get_if<CustomModel>(&impl_)) return c->name;
    return std::string(to_string(kind()));
  }
  [[nodiscard]] std::size_t dim() const noexcept {
    if (const auto* c = std::get_if<CustomModel>(&impl_)) return c->dim;
    return 2;
  }
  [[nodiscard]] ParamMap params() const {
    return std::visit(
        [](const auto& m) -> ParamMap {
          if constexpr (std::is_same_v<std::decay_t<decltype(m)>, CustomModel>) {
            return {};
          } else {
            return m.params();
          }
        },
        impl_);
  }
  [[nodiscard]] const Variant& variant() const noexcept { return impl_; }

  [[nodiscard]] std::vector<double> rhs(std::span<const double> x) const {
    detail::require_state(x, dim(), name());
    auto out = std::visit([&](const auto& m) { return call_rhs(m, x); }, impl_);
    if (out.size() != dim()) throw InvalidArgument(name() + ": right-hand side has wrong length");
    return out;
  }

  [[nodiscard]] DenseMatrix jacobian(std::span<const double> x) const {
    detail::require_state(x, dim(), name());
    if (const auto* c = std::get_if<CustomModel>(&impl_)) {
      if (!c->jac) return fd_jacobian(*this, x);
      auto j = (*c->jac)(x);
      if (j.rows() != dim() || j.cols() != dim()) {
        throw InvalidArgument(name() + ": Jacobian callback returned " + j.shape());
      }
      return j;
    }
    return std::visit(
        [&](const auto& m) -> DenseMatrix {
          if constexpr (std::is_same_v<std::decay_t<decltype(m)>, CustomModel>) {
            return {};
          } else {
            return m.jacobian(x);
          }
        },
        impl_);
  }

 private:
  explicit PatchModel(Variant v) : impl_(std::move(v)) {
    std::visit(
        [](const auto& m) {
          if constexpr (!std::is_same_v<std::decay_t<decltype(m)>, CustomModel>) m.validate();
        },
        impl_);
  }

  template <class M>
  static std::vector<double> call_rhs(const M& m, std::span<const double> x) {
    if constexpr (std::is_same_v<M, CustomModel>) {
      return m.f(x);
    } else {
      return m.rhs(x);
    }
  }

  Variant impl_;
};

[[nodiscard]] inline std::vector<double> eval_f(const PatchModel& model, std::span<const double> state) {
  return model.rhs(state);
}

[[nodiscard]] inline DenseMatrix eval_jacobian(const PatchModel& model, std::span<const double> state) {
  return model.jacobian(state);
}

/**
 * @brief Central-difference Jacobian, column q = (f(x + h e_q) - f(x - h e_q)) / 2h.
 *
 * Default step per column is eps^(1/3) * max(1, |x_q|). A probe that lands
 * outside the model's domain propagates the DomainError.
 */
inline DenseMatrix fd_jacobian(const PatchModel& model, std::span<const double> state,
                               std::optional<double> h) {
  const std::size_t n = model.dim();
  detail::require_state(state, n, model.name());
  if (h && !(*h > 0.0)) throw InvalidArgument("fd_jacobian: step must be > 0");
  const double base = std::cbrt(std::numeric_limits<double>::epsilon());
  DenseMatrix j(n, n);
  std::vector<double> probe(state.begin(), state.end());
  for (std::size_t q = 0; q < n; ++q) {
    const double step = h ? *h : base * std::max(1.0, std::abs(state[q]));
    probe[q] = state[q] + step;
    const auto fp = model.rhs(probe);
    probe[q] = state[q] - step;
    const auto fm = model.rhs(probe);
    probe[q] = state[q];
    for (std::size_t p = 0; p < n; ++p) j(p, q) = (fp[p] - fm[p]) / (2.0 * step);
  }
  return j;
}

struct EquilibriumSolution {
  PatchState state;
  double residual = 0.0;
  int iterations = 0;
  std::vector<std::string> warnings;
};

inline constexpr double kEquilibriumTolerance = 1e-12;
inline constexpr int kNewtonMaxIterations = 100;
inline constexpr int kNewtonMaxHalvings = 20;

namespace detail {
inline double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}
}  // namespace detail

/**
 * @brief Damped Newton iteration for f(x) = 0 from a guess.
 *
 * Steps are halved (up to 20 times) while the residual fails to decrease.
 * Non-positive components do not fail the solve but are reported in
 * `warnings`.
 */
[[nodiscard]] inline EquilibriumSolution find_equilibrium(const PatchModel& model,
                                                          std::span<const double> guess) {
  PatchState x(guess.begin(), guess.end());
  auto r = model.rhs(x);
  double norm = detail::inf_norm(r);
  int it = 0;
  for (; norm > kEquilibriumTolerance; ++it) {
    if (it == kNewtonMaxIterations) {
      throw ConvergenceError("find_equilibrium: Newton did not converge in " +
                                 std::to_string(kNewtonMaxIterations) +
                                 " iterations (last residual " + std::to_string(norm) + ")",
                             norm, it);
    }
    const auto jac = model.jacobian(x);
    const LuDecomposition lu(jac);
    if (lu.singular() || condition_estimate(jac, lu) > 1e14) {
      throw SingularMatrixError("find_equilibrium: singular Jacobian at iterate " +
                                    std::to_string(it),
                                condition_estimate(jac, lu));
    }
    std::vector<double> neg(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) neg[i] = -r[i];
    const auto dx = lu.solve(neg);

    double lambda = 1.0;
    PatchState best = x;
    std::vector<double> best_r = r;
    bool improved = false;
    for (int halving = 0; halving <= kNewtonMaxHalvings; ++halving, lambda *= 0.5) {
      PatchState trial(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] + lambda * dx[i];
      std::vector<double> rt;
      try {
        rt = model.rhs(trial);
      } catch (const DomainError&) {
        continue;
      }
      const double nt = detail::inf_norm(rt);
      best = std::move(trial);
      best_r = std::move(rt);
      if (nt < norm) {
        improved = true;
        break;
      }
    }
    if (!improved && best == x) {
      throw ConvergenceError("find_equilibrium: every damped step left the model domain", norm, it);
    }
    x = std::move(best);
    r = std::move(best_r);
    norm = detail::inf_norm(r);
  }

  EquilibriumSolution sol{std::move(x), norm, it, {}};
  for (std::size_t i = 0; i < sol.state.size(); ++i) {
    if (sol.state[i] <= 0.0) {
      sol.warnings.push_back("component " + std::to_string(i + 1) +
                             " of the equilibrium is not positive (" +
                             std::to_string(sol.state[i]) + ")");
    }
  }
  return sol;
}

}  // namespace netstab
