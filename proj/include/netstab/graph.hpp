/**
 * @file graph.hpp
 * @brief Layered patch networks and their graph Laplacians.
 *
 * A network has m patches and one weighted undirected layer per state
 * variable. Patch indices are 1-based in the public API, matching the way
 * dispersal rates w^i_jk are written down.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "netstab/error.hpp"
#include "netstab/linalg.hpp"

namespace netstab {

struct LayerEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  double weight = 0.0;

  friend bool operator==(const LayerEdge&, const LayerEdge&) = default;
};

class LayeredNetwork {
 public:
  /// Validates endpoints, self loops, weights and duplicate pairs.
  LayeredNetwork(std::size_t patches, std::vector<std::vector<LayerEdge>> layers)
      : m_(patches), layers_(std::move(layers)) {
    if (m_ < 1) throw InvalidArgument("LayeredNetwork: need at least one patch");
    if (layers_.empty()) throw InvalidArgument("LayeredNetwork: need at least one layer");
    for (std::size_t layer = 0; layer < layers_.size(); ++layer) {
      std::set<std::pair<std::size_t, std::size_t>> seen;
      for (std::size_t k = 0; k < layers_[layer].size(); ++k) {
        const auto& e = layers_[layer][k];
        const std::string where =
            "layer " + std::to_string(layer + 1) + " edge " + std::to_string(k);
        if (e.u < 1 || e.u > m_ || e.v < 1 || e.v > m_) {
          throw InvalidArgument("LayeredNetwork: " + where + " has endpoint outside 1.." +
                                std::to_string(m_));
        }
        if (e.u == e.v) throw InvalidArgument("LayeredNetwork: " + where + " is a self loop");
        if (!std::isfinite(e.weight) || e.weight < 0.0) {
          throw InvalidArgument("LayeredNetwork: " + where + " has negative or non-finite weight " +
                                std::to_string(e.weight));
        }
        const auto key = std::minmax(e.u, e.v);
        if (!seen.insert(key).second) {
          throw InvalidArgument("LayeredNetwork: " + where + " duplicates pair (" +
                                std::to_string(key.first) + "," + std::to_string(key.second) + ")");
        }
      }
    }
  }

  /// Same edge list on every one of `layer_count` layers.
  [[nodiscard]] static LayeredNetwork uniform(std::size_t patches, std::size_t layer_count,
                                              const std::vector<LayerEdge>& edges) {
    return LayeredNetwork(patches, std::vector<std::vector<LayerEdge>>(layer_count, edges));
  }

  [[nodiscard]] std::size_t patches() const noexcept { return m_; }
  [[nodiscard]] std::size_t layer_count() const noexcept { return layers_.size(); }
  [[nodiscard]] const std::vector<LayerEdge>& layer(std::size_t index) const {
    check_layer(index);
    return layers_[index - 1];
  }
  [[nodiscard]] const std::vector<std::vector<LayerEdge>>& layers() const noexcept {
    return layers_;
  }

  void check_layer(std::size_t index) const {
    if (index < 1 || index > layers_.size()) {
      throw InvalidArgument("LayeredNetwork: layer " + std::to_string(index) + " outside 1.." +
                            std::to_string(layers_.size()));
    }
  }

  friend bool operator==(const LayeredNetwork&, const LayeredNetwork&) = default;

 private:
  std::size_t m_;
  std::vector<std::vector<LayerEdge>> layers_;
};

struct LaplacianSet {
  std::vector<DenseMatrix> matrices;
  std::vector<double> fiedler_per_layer;
  double fiedler_min = 0.0;
};

/// D - A for one layer; zero-weight edges contribute nothing.
[[nodiscard]] inline DenseMatrix build_laplacian(const LayeredNetwork& network, std::size_t layer) {
  const auto& edges = network.layer(layer);
  const std::size_t m = network.patches();
  DenseMatrix l(m, m);
  for (const auto& e : edges) {
    if (e.weight == 0.0) continue;
    const std::size_t a = e.u - 1;
    const std::size_t b = e.v - 1;
    l(a, b) -= e.weight;
    l(b, a) -= e.weight;
    l(a, a) += e.weight;
    l(b, b) += e.weight;
  }
  return l;
}

namespace detail {

inline void require_laplacian(const DenseMatrix& l, const char* who) {
  require_square(l, who);
  require_finite(l, who);
  const std::size_t m = l.rows();
  const double scale = std::max(1.0, l.max_abs());
  for (std::size_t i = 0; i < m; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      row_sum += l(i, j);
      if (i != j && l(i, j) > 0.0) {
        throw InvalidArgument(std::string(who) + ": positive off-diagonal entry at (" +
                              std::to_string(i) + "," + std::to_string(j) + ")");
      }
      if (l(i, j) != l(j, i)) {
        throw InvalidArgument(std::string(who) + ": matrix is not symmetric");
      }
    }
    if (l(i, i) < 0.0) throw InvalidArgument(std::string(who) + ": negative diagonal entry");
    if (std::abs(row_sum) > 1e-12 * scale) {
      throw InvalidArgument(std::string(who) + ": row " + std::to_string(i) +
                            " does not sum to zero (" + std::to_string(row_sum) + ")");
    }
  }
}

}  // namespace detail

/// Second-smallest Laplacian eigenvalue (algebraic connectivity). 0 for m = 1.
[[nodiscard]] inline double fiedler_value(const DenseMatrix& laplacian) {
  detail::require_laplacian(laplacian, "fiedler_value");
  if (laplacian.rows() < 2) return 0.0;
  const auto spec = sym_eigen(laplacian);
  if (spec.eigenvalues.front() < -1e-10) {
    throw InvalidArgument("fiedler_value: Laplacian is not positive semidefinite");
  }
  return spec.eigenvalues[1];
}

[[nodiscard]] inline double network_fiedler(const LaplacianSet& set) {
  if (set.fiedler_per_layer.empty()) throw InvalidArgument("network_fiedler: empty Laplacian set");
  return *std::min_element(set.fiedler_per_layer.begin(), set.fiedler_per_layer.end());
}

[[nodiscard]] inline LaplacianSet make_laplacian_set(const LayeredNetwork& network) {
  LaplacianSet set;
  for (std::size_t layer = 1; layer <= network.layer_count(); ++layer) {
    set.matrices.push_back(build_laplacian(network, layer));
    set.fiedler_per_layer.push_back(fiedler_value(set.matrices.back()));
  }
  set.fiedler_min = network_fiedler(set);
  return set;
}

/// Union-find over positive-weight edges.
[[nodiscard]] inline bool is_connected(const LayeredNetwork& network, std::size_t layer) {
  const auto& edges = network.layer(layer);
  std::vector<std::size_t> parent(network.patches());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  std::size_t components = network.patches();
  for (const auto& e : edges) {
    if (e.weight <= 0.0) continue;
    const auto a = find(e.u - 1);
    const auto b = find(e.v - 1);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

/// Multiplies every weight by s; Laplacian spectra scale by s.
[[nodiscard]] inline LayeredNetwork scale_weights(const LayeredNetwork& network, double s) {
  if (!(s >= 0.0) || !std::isfinite(s)) {
    throw InvalidArgument("scale_weights: scale must be finite and >= 0, got " + std::to_string(s));
  }
  auto layers = network.layers();
  for (auto& layer : layers)
    for (auto& e : layer) e.weight *= s;
  return LayeredNetwork(network.patches(), std::move(layers));
}

}  // namespace netstab
