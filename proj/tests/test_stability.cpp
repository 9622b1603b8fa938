#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using namespace netstab;
using namespace netstab::testing;

namespace {

PatchModel linear(const DenseMatrix& a) {
  return PatchModel::custom(a.rows(), [a](std::span<const double> x) { return a * x; },
                            [a](std::span<const double>) { return a; });
}

CoupledSystem linear_system(const std::vector<DenseMatrix>& blocks, LayeredNetwork net) {
  std::vector<PatchModel> models;
  for (const auto& a : blocks) models.push_back(linear(a));
  return CoupledSystem(std::move(models), std::move(net));
}

HomogeneousEquilibrium at_origin(const CoupledSystem& sys) {
  return make_homogeneous_equilibrium(sys, std::vector<double>(sys.variables(), 0.0));
}

TEST(ConditionA, Example1AveragedJacobian) {
  const auto sys = example1(1);
  const auto avg = average_jacobian(sys, replicate(sys, kEx1Equilibrium));
  const auto a = check_condition_a(avg, 0.0);
  EXPECT_TRUE(a.holds);
  ASSERT_EQ(a.row_margins.size(), 2u);
  EXPECT_NEAR(a.row_margins[0], 5.0 / 27, 1e-14);
  EXPECT_NEAR(a.row_margins[1], 0.0, 1e-15);
  EXPECT_FALSE(check_condition_a(avg, 0.0, true).holds);
  const auto tight = check_condition_a(avg, 0.05);
  EXPECT_FALSE(tight.holds);
  EXPECT_NEAR(tight.row_margins[1], -0.05, 1e-14);
}

TEST(ConditionA, SimpleMatrices) {
  const auto neg = check_condition_a(-1.0 * DenseMatrix::identity(3), 0.0, true);
  EXPECT_TRUE(neg.holds);
  for (double m : neg.row_margins) EXPECT_EQ(m, 1.0);
  EXPECT_FALSE(check_condition_a(DenseMatrix{{-1, 2}, {0, -3}}, 0.0).holds);
  EXPECT_FALSE(check_condition_a(DenseMatrix{{0, 0}, {0, 0}}, 0.0, true).holds);
  EXPECT_TRUE(check_condition_a(DenseMatrix{{0, 0}, {0, 0}}, 0.0).holds);
  EXPECT_THROW((void)check_condition_a(DenseMatrix{{-1}}, -0.1), InvalidArgument);
  EXPECT_THROW((void)check_condition_a(DenseMatrix(2, 3), 0.0), InvalidArgument);
}

TEST(ConditionA, Example2Fails) {
  const auto sys = example2(1);
  const auto a = check_condition_a(average_jacobian(sys, replicate(sys, kEx2Equilibrium)), 0.0);
  EXPECT_FALSE(a.holds);
}

TEST(BuildBasis, TwoPatchClosedForm) {
  const double w = 0.75, c = 1e-3;
  const auto set = make_laplacian_set(LayeredNetwork(2, {{{1, 2, w}}}));
  const auto b = build_basis(set, c);
  ASSERT_EQ(b.per_layer.size(), 1u);
  const auto& p = b.per_layer[0];
  EXPECT_EQ(p(0, 0), 1.0);
  EXPECT_EQ(p(1, 0), 1.0);
  EXPECT_NEAR(std::abs(p(0, 1)), c / std::sqrt(2.0), 1e-18);
  EXPECT_NEAR(p(0, 1), -p(1, 1), 1e-18);
  EXPECT_EQ(b.lambda[0][0], 0.0);
  EXPECT_NEAR(b.lambda[0][1], 2 * w, 1e-14);
  EXPECT_THROW((void)build_basis(set, 0.0), InvalidArgument);
  EXPECT_THROW((void)build_basis(set, 1.5), InvalidArgument);
}

TEST(BuildBasis, DiagonalisesEveryLayer) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t m = 2 + trial % 6;
    const double c = trial % 2 ? 1e-2 : 1.0;
    const auto set = make_laplacian_set(
        LayeredNetwork(m, {random_edges(rng, m, 0.5), random_edges(rng, m, 0.2)}));
    const auto b = build_basis(set, c);
    for (std::size_t i = 0; i < set.matrices.size(); ++i) {
      const auto& p = b.per_layer[i];
      for (std::size_t r = 0; r < m; ++r) EXPECT_EQ(p(r, 0), 1.0);
      const auto lam = similarity_transform(set.matrices[i], p);
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t s = 0; s < m; ++s)
          EXPECT_NEAR(lam(r, s), r == s ? b.lambda[i][r] : 0.0, 1e-9);
      for (std::size_t r = 1; r < m; ++r) EXPECT_GE(b.lambda[i][r], b.lambda[i][r - 1] - 1e-12);
    }
  }
}

TEST(ComputeTau, ZeroReactionGivesZero) {
  const auto sys = linear_system({DenseMatrix(2, 2), DenseMatrix(2, 2), DenseMatrix(2, 2)},
                                 LayeredNetwork::uniform(3, 2, {{1, 2, 1}, {2, 3, 2}}));
  const auto eq = at_origin(sys);
  const auto t = compute_tau_detail(sys, eq, build_basis(sys.laplacians(), 1e-6));
  EXPECT_EQ(t.tau, 0.0);
  EXPECT_EQ(t.first_rows_edge, 0.0);
}

TEST(ComputeTau, IdenticalPatchesAreScaleIndependent) {
  const DenseMatrix a{{-2, 0.5}, {0.3, -1.5}};
  const auto sys = linear_system({a, a, a, a},
                                 LayeredNetwork(4, {{{1, 2, 1}, {2, 3, 1}, {3, 4, 1}},
                                                    {{1, 3, 2}, {2, 4, 0.5}, {1, 4, 1}}}));
  const auto eq = at_origin(sys);
  const auto sweep = tau_sweep(sys, eq, default_tau_sweep_scalings());
  for (const auto& [c, tau] : sweep) {
    EXPECT_LE(tau, -1.0 + 1e-9) << c;
    EXPECT_NEAR(tau, sweep.front().second, 1e-6) << c;
  }
}

TEST(ComputeTau, HeterogeneousPatchesGrowLikeInverseScaling) {
  const auto sys = example1(1);
  const auto eq = make_homogeneous_equilibrium(sys, kEx1Equilibrium);
  const double t5 = compute_tau(sys, eq, build_basis(sys.laplacians(), 1e-5));
  const double t6 = compute_tau(sys, eq, build_basis(sys.laplacians(), 1e-6));
  EXPECT_GT(t6, 1e5);
  EXPECT_NEAR(t6 * 1e-6, t5 * 1e-5, 1e-2 * t5 * 1e-5);
}

TEST(ComputeTau, RejectsMismatchedBasis) {
  const auto sys = example1(1);
  const auto eq = make_homogeneous_equilibrium(sys, kEx1Equilibrium);
  const auto other = make_laplacian_set(LayeredNetwork(2, {{{1, 2, 1}}}));
  EXPECT_THROW((void)compute_tau(sys, eq, build_basis(other, 1e-3)), InvalidArgument);
}

TEST(Theorem, Example1Set1) {
  const auto sys = example1(1);
  const auto eq = make_homogeneous_equilibrium(sys, kEx1Equilibrium);
  const auto r = theorem_verdict(sys, eq);
  EXPECT_TRUE(r.condition_a.holds);
  EXPECT_NEAR(r.condition_b.lambda2, 0.1461, 5e-5);
  EXPECT_EQ(r.condition_b.scaling_c, 1e-6);
  EXPECT_FALSE(r.condition_b.holds);
  EXPECT_FALSE(r.sufficient_stable);
  EXPECT_EQ(r.verdict(), "inconclusive");
  EXPECT_LT(r.condition_b.first_rows_edge, 1e-6);
}

TEST(Theorem, Example1Set2Spectrum) {
  const auto sys = example1(2);
  const auto eq = make_homogeneous_equilibrium(sys, kEx1Equilibrium);
  const auto rep = analyze_stability(sys, eq);
  EXPECT_NEAR(rep.lambda2, 0.1, 1e-12);
  EXPECT_EQ(rep.spectral_verdict, Verdict::unstable);
  EXPECT_FALSE(rep.condition->sufficient_stable);
  EXPECT_NEAR(rep.abscissa, 0.037142, 1e-6);
}

TEST(Theorem, Example1Set1SpectrumStable) {
  const auto sys = example1(1);
  const auto rep = spectral_verdict(sys, make_homogeneous_equilibrium(sys, kEx1Equilibrium));
  EXPECT_EQ(rep.spectral_verdict, Verdict::stable);
  EXPECT_NEAR(rep.abscissa, -0.07679, 1e-5);
  EXPECT_EQ(rep.spectrum.size(), 6u);
}

TEST(Theorem, DisconnectedLayersFailConditionB) {
  const auto base = example1(1);
  const auto sys = base.with_network(scale_weights(base.network(), 0.0));
  const auto eq = make_homogeneous_equilibrium(sys, kEx1Equilibrium);
  const auto rep = analyze_stability(sys, eq);
  EXPECT_EQ(rep.lambda2, 0.0);
  EXPECT_FALSE(rep.condition->condition_b.holds);
  ASSERT_GE(rep.notes.size(), 2u);
  EXPECT_NE(rep.notes[0].find("layer 1 is disconnected"), std::string::npos);
}

TEST(Theorem, IdenticalStablePatchesAreSufficient) {
  const DenseMatrix a{{-2, 0.5}, {0.3, -1.5}};
  const auto sys = linear_system({a, a, a}, LayeredNetwork::uniform(3, 2, {{1, 2, 1}, {2, 3, 1}}));
  const auto rep = analyze_stability(sys, at_origin(sys));
  EXPECT_TRUE(rep.condition->sufficient_stable);
  EXPECT_EQ(rep.condition->verdict(), "sufficient_stable");
  EXPECT_EQ(rep.spectral_verdict, Verdict::stable);
}

TEST(Verdict, Band) {
  EXPECT_EQ(classify_abscissa(-1e-8), Verdict::stable);
  EXPECT_EQ(classify_abscissa(-1e-10), Verdict::marginal);
  EXPECT_EQ(classify_abscissa(0.0), Verdict::marginal);
  EXPECT_EQ(classify_abscissa(1e-10), Verdict::marginal);
  EXPECT_EQ(classify_abscissa(1e-8), Verdict::unstable);
  EXPECT_EQ(to_string(Verdict::marginal), "marginal");
}

TEST(Threshold, Example1Set2Base) {
  const auto sys = example1(2);
  const auto eq = make_homogeneous_equilibrium(sys, kEx1Equilibrium);
  const auto t = coupling_threshold(sys, eq, 1.0, 20.0);
  EXPECT_GT(t.abscissa_lo, 0.0);
  EXPECT_LT(t.abscissa_hi, 0.0);
  EXPECT_NEAR(t.s_star, 2.121496424324744, 1e-6);
  EXPECT_LE(std::abs(t.abscissa), 1e-5);
  EXPECT_NEAR(t.lambda2, t.s_star * 0.1, 1e-12);
}

TEST(Threshold, TwoPatchClosedForm) {
  const double alpha = 3.0, beta = 1.0, w = 0.5;
  const auto sys = linear_system({DenseMatrix{{-alpha}}, DenseMatrix{{beta}}},
                                 LayeredNetwork(2, {{{1, 2, w}}}));
  const auto t = coupling_threshold(sys, at_origin(sys), 0.0, 20.0);
  EXPECT_NEAR(t.s_star, alpha * beta / (w * (alpha - beta)), 1e-6);
}

TEST(Threshold, ScaleEquivariance) {
  const auto base = example1(2);
  const auto eq = make_homogeneous_equilibrium(base, kEx1Equilibrium);
  const double s1 = coupling_threshold(base, eq, 1.0, 20.0).s_star;
  const auto doubled = base.with_network(scale_weights(base.network(), 2.0));
  const double s2 = coupling_threshold(doubled, eq, 0.5, 10.0).s_star;
  EXPECT_NEAR(s2, s1 / 2, 2e-6);
}

TEST(Threshold, RejectsBadBrackets) {
  const auto sys = example1(2);
  const auto eq = make_homogeneous_equilibrium(sys, kEx1Equilibrium);
  EXPECT_THROW((void)coupling_threshold(sys, eq, 5.0, 20.0), InvalidArgument);
  EXPECT_THROW((void)coupling_threshold(sys, eq, 2.0, 1.0), InvalidArgument);
  EXPECT_THROW((void)coupling_threshold(sys, eq, -1.0, 1.0), InvalidArgument);
}

TEST(Weyl, Examples) {
  const auto l = build_laplacian(LayeredNetwork(3, {ex1_edges(1.0)}), 1);
  const std::vector<LayerEdge> add{{1, 2, 0.5}};
  EXPECT_TRUE(weyl_check(l, add));
  const std::vector<LayerEdge> none;
  EXPECT_TRUE(weyl_check(l, none));
  const std::vector<LayerEdge> bad{{1, 1, 0.5}};
  EXPECT_THROW((void)weyl_check(l, bad), InvalidArgument);
  const std::vector<LayerEdge> negative{{1, 2, -0.5}};
  EXPECT_THROW((void)weyl_check(l, negative), InvalidArgument);
}

TEST(Weyl, RandomEdgeAdditions) {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 2 + trial % 7;
    const auto l = build_laplacian(LayeredNetwork(m, {random_edges(rng, m, 0.4)}), 1);
    const auto extra = random_edges(rng, m, 0.3, 0.0, 5.0);
    EXPECT_TRUE(weyl_check(l, extra)) << "trial " << trial;
  }
}

// A sufficient verdict must never coexist with an unstable spectrum.
TEST(Theorem, OneSidedOverRandomSystems) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int sufficient = 0, violations = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t m = 2 + trial % 4;
    const std::size_t n = 1 + trial % 3;
    DenseMatrix a = random_matrix(rng, n);
    for (std::size_t p = 0; p < n; ++p) a(p, p) -= 1.5 * unit(rng) * static_cast<double>(n);
    const double spread = trial % 3 == 0 ? 0.0 : 1e-3 * unit(rng);
    std::vector<DenseMatrix> blocks;
    for (std::size_t j = 0; j < m; ++j) {
      DenseMatrix aj = a;
      for (double& v : aj.data()) v += spread * u(rng);
      blocks.push_back(aj);
    }
    std::vector<std::vector<LayerEdge>> layers;
    for (std::size_t i = 0; i < n; ++i) layers.push_back(random_edges(rng, m, 0.6, 0.1, 3.0));
    const auto sys = linear_system(blocks, LayeredNetwork(m, layers));
    const auto rep = analyze_stability(sys, at_origin(sys), {0.0, 1e-2, false});
    if (rep.condition->sufficient_stable) {
      ++sufficient;
      if (rep.spectral_verdict == Verdict::unstable) ++violations;
    }
  }
  EXPECT_EQ(violations, 0);
  EXPECT_GE(sufficient, 50);
}

TEST(Similarity, GershgorinContainsTransformedSpectrum) {
  const double c = 1e-2;
  for (const auto& sys : {example1(1), example1(2), example2(2)}) {
    const auto& x = sys.patches() == 3 ? kEx1Equilibrium : kEx2Equilibrium;
    const auto eq = make_homogeneous_equilibrium(sys, x);
    const auto j = coupled_jacobian(sys, eq.stacked);
    const auto p = build_basis(sys.laplacians(), c).p;
    const auto discs = gershgorin_discs(similarity_transform(j, p));
    for (const auto& z : gen_eigenvalues(j)) EXPECT_LE(distance_to_discs(z, discs), 1e-9);
  }
}

TEST(Similarity, SpectrumInvariant) {
  const auto sys = example2(2);
  const auto eq = make_homogeneous_equilibrium(sys, kEx2Equilibrium);
  const auto j = coupled_jacobian(sys, eq.stacked);
  const auto p = build_basis(sys.laplacians(), 1e-2).p;
  EXPECT_LE(spectrum_distance(gen_eigenvalues(j), gen_eigenvalues(similarity_transform(j, p))),
            1e-8);
}

}  // namespace
