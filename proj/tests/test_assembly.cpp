#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using namespace netstab;
using namespace netstab::testing;

namespace {

std::vector<double> random_state(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.05, 2.0);
  std::vector<double> x(n);
  for (double& v : x) v = u(rng);
  return x;
}

TEST(StackIndex, Examples) {
  EXPECT_EQ(stack_index(1, 1, 3, 2), 0u);
  EXPECT_EQ(stack_index(2, 1, 3, 2), 3u);
  EXPECT_EQ(stack_index(2, 5, 5, 2), 9u);
  EXPECT_THROW((void)stack_index(0, 1, 3, 2), InvalidArgument);
  EXPECT_THROW((void)stack_index(1, 4, 3, 2), InvalidArgument);
  EXPECT_THROW((void)stack_index(3, 1, 3, 2), InvalidArgument);
}

TEST(StackIndex, BijectiveWithUnstack) {
  for (std::size_t m = 1; m <= 6; ++m)
    for (std::size_t n = 1; n <= 4; ++n)
      for (std::size_t flat = 0; flat < m * n; ++flat) {
        const auto [i, j] = unstack_index(flat, m, n);
        EXPECT_EQ(stack_index(i, j, m, n), flat);
      }
  EXPECT_THROW((void)unstack_index(6, 3, 2), InvalidArgument);
}

TEST(CoupledSystem, ValidatesShapes) {
  const LayeredNetwork net(3, {ex1_edges(1.0), ex1_edges(1.0)});
  EXPECT_THROW(CoupledSystem({ex1_rm(), ex1_rm()}, net), InvalidArgument);
  const LayeredNetwork one_layer(3, {ex1_edges(1.0)});
  EXPECT_THROW(CoupledSystem({ex1_rm(), ex1_rd(), ex1_rm()}, one_layer), InvalidArgument);
}

TEST(BlockLaplacian, Example1Layout) {
  const auto l = assemble_block_laplacian(example1(1));
  const DenseMatrix layer{{0.1, 0, -0.1}, {0, 1, -1}, {-0.1, -1, 1.1}};
  EXPECT_LE(max_abs_diff(l, direct_sum({layer, layer})), 1e-15);
}

TEST(BlockLaplacian, SingleLayerUnchanged) {
  const auto sys = CoupledSystem(
      {PatchModel::custom(1, [](std::span<const double> x) { return std::vector<double>{-x[0]}; }),
       PatchModel::custom(1, [](std::span<const double> x) { return std::vector<double>{-x[0]}; })},
      LayeredNetwork(2, {{{1, 2, 0.7}}}));
  EXPECT_EQ(assemble_block_laplacian(sys), (DenseMatrix{{0.7, -0.7}, {-0.7, 0.7}}));
}

TEST(BlockLaplacian, Example2Blocks) {
  const auto sys = example2(1);
  const auto l = assemble_block_laplacian(sys);
  const auto& net = sys.network();
  EXPECT_EQ(l(0, 0), 5.0);
  EXPECT_EQ(l(5, 5), 4.0);
  EXPECT_EQ(l(5 + 2, 5 + 3), -2.0);
  EXPECT_LE(max_abs_diff(l, direct_sum({build_laplacian(net, 1), build_laplacian(net, 2)})), 0.0);
}

TEST(EvalCoupledF, ZeroAtExampleEquilibria) {
  for (int set : {1, 2}) {
    const auto s1 = example1(set);
    for (double v : eval_coupled_f(s1, replicate(s1, kEx1Equilibrium))) EXPECT_LE(std::abs(v), 1e-12);
    const auto s2 = example2(set);
    for (double v : eval_coupled_f(s2, replicate(s2, kEx2Equilibrium))) EXPECT_LE(std::abs(v), 1e-12);
  }
}

TEST(EvalCoupledF, MatchesEdgewiseForm) {
  std::mt19937_64 rng(41);
  for (const auto& sys : {example1(1), example1(2), example2(1), example2(2)}) {
    for (int k = 0; k < 20; ++k) {
      const auto x = random_state(rng, sys.size());
      const auto a = eval_coupled_f(sys, x);
      const auto b = eval_coupled_f_edgewise(sys, x);
      for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LE(std::abs(a[i] - b[i]), 1e-12);
    }
  }
}

TEST(EvalCoupledF, DomainErrorNamesPatch) {
  const auto sys = example1(1);
  auto x = replicate(sys, kEx1Equilibrium);
  x[sys.index(1, 2)] = -0.5;
  x[sys.index(2, 2)] = 0.1;
  try {
    (void)eval_coupled_f(sys, x);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("patch 2"), std::string::npos);
  }
}

TEST(CoupledJacobian, MatchesFiniteDifferences) {
  std::mt19937_64 rng(43);
  for (const auto& sys : {example1(1), example2(1)}) {
    for (int k = 0; k < 10; ++k) {
      const auto x = random_state(rng, sys.size());
      const auto j = coupled_jacobian(sys, x);
      const double h = 1e-6;
      for (std::size_t q = 0; q < sys.size(); ++q) {
        auto xp = x, xm = x;
        xp[q] += h;
        xm[q] -= h;
        const auto fp = eval_coupled_f(sys, xp);
        const auto fm = eval_coupled_f(sys, xm);
        for (std::size_t p = 0; p < sys.size(); ++p)
          EXPECT_NEAR(j(p, q), (fp[p] - fm[p]) / (2 * h), 1e-6);
      }
    }
  }
}

TEST(CoupledJacobian, BlockStructure) {
  std::mt19937_64 rng(47);
  const auto sys = example2(2);
  const auto x = random_state(rng, sys.size());
  const auto df = reaction_jacobian(sys, x);
  const std::size_t m = sys.patches();
  for (std::size_t p = 0; p < 2; ++p)
    for (std::size_t q = 0; q < 2; ++q)
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
          if (a != b) {
            EXPECT_EQ(df(p * m + a, q * m + b), 0.0);
          }
        }
  EXPECT_EQ(coupled_jacobian(sys, x), df - sys.block_laplacian());
}

TEST(CoupledJacobian, ZeroWeightsGiveBlockDiagonalOfPatchJacobians) {
  const auto sys = example1(1).with_network(scale_weights(example1(1).network(), 0.0));
  const auto x = replicate(sys, kEx1Equilibrium);
  const auto j = coupled_jacobian(sys, x);
  const auto j2 = eval_jacobian(ex1_rd(), kEx1Equilibrium);
  EXPECT_EQ(j(1, 1), j2(0, 0));
  EXPECT_EQ(j(1, 4), j2(0, 1));
  EXPECT_EQ(j(4, 1), j2(1, 0));
  EXPECT_EQ(j(0, 1), 0.0);
}

TEST(CoupledJacobian, Example2Trace) {
  const auto sys = example2(1);
  const auto j = coupled_jacobian(sys, replicate(sys, kEx2Equilibrium));
  EXPECT_NEAR(j.trace(), 3.0 / 35 - 40, 1e-12);
  EXPECT_NEAR(j.trace(), -39.91428571, 1e-8);
}

TEST(AverageJacobian, Example1) {
  const auto sys = example1(1);
  const auto avg = average_jacobian(sys, replicate(sys, kEx1Equilibrium));
  const DenseMatrix expected = (1.0 / 3) * DenseMatrix{{-13.0 / 9, -8.0 / 9}, {1.0 / 9, -1.0 / 9}};
  EXPECT_LE(max_abs_diff(avg, expected), 1e-15);
}

TEST(AverageJacobian, Example2) {
  const auto sys = example2(1);
  const auto avg = average_jacobian(sys, replicate(sys, kEx2Equilibrium));
  const auto jlv = eval_jacobian(ex2_lv(), kEx2Equilibrium);
  const auto jrm = eval_jacobian(ex2_rm(), kEx2Equilibrium);
  EXPECT_LE(max_abs_diff(avg, 0.2 * (jlv + 4.0 * jrm)), 1e-15);
  EXPECT_NEAR(avg(0, 0), 3.0 / 175, 1e-15);
  EXPECT_NEAR(avg(0, 1), -0.66, 1e-14);
  EXPECT_NEAR(avg(1, 0), 0.24514285714285713, 1e-14);
  EXPECT_NEAR(avg(1, 1), 0.0, 1e-15);
}

TEST(AverageJacobian, IdenticalPatchesAndHomogeneityCheck) {
  const auto sys = CoupledSystem({ex2_rm(), ex2_rm(), ex2_rm()},
                                 LayeredNetwork::uniform(3, 2, {{1, 2, 1}, {2, 3, 1}}));
  const auto x = replicate(sys, kEx2Equilibrium);
  EXPECT_LE(max_abs_diff(average_jacobian(sys, x), eval_jacobian(ex2_rm(), kEx2Equilibrium)),
            1e-15);
  auto y = x;
  y[1] += 0.1;
  EXPECT_THROW((void)average_jacobian(sys, y), InvalidArgument);
}

TEST(HomogeneousEquilibrium, AcceptsExampleEquilibria) {
  const auto s1 = example1(1);
  const auto e1 = make_homogeneous_equilibrium(s1, kEx1Equilibrium);
  EXPECT_LE(e1.residual_f, 1e-14);
  EXPECT_LE(e1.residual_L, 1e-12);
  EXPECT_TRUE(e1.warnings.empty());
  for (std::size_t i = 1; i <= 2; ++i)
    for (std::size_t j = 1; j <= 3; ++j) EXPECT_EQ(e1.stacked[s1.index(i, j)], e1.per_patch[i - 1]);

  const auto e2 = make_homogeneous_equilibrium(example2(1), kEx2Equilibrium);
  EXPECT_LE(e2.residual_f, 1e-12);
  EXPECT_LE(e2.residual_L, 1e-12);
}

TEST(HomogeneousEquilibrium, RejectsOffEquilibriumWithWorstPatch) {
  try {
    (void)make_homogeneous_equilibrium(example1(1), std::vector<double>{0.3, 0.16});
    FAIL();
  } catch (const EquilibriumError& e) {
    EXPECT_EQ(e.worst_patch(), 1u);
    EXPECT_NEAR(e.residual(), 0.12692307692307692, 1e-12);
  }
  EXPECT_THROW((void)make_homogeneous_equilibrium(example1(1), std::vector<double>{0.2}),
               InvalidArgument);
}

TEST(HomogeneousEquilibrium, WarnsOnNonPositive) {
  const auto lin = PatchModel::custom(1, [](std::span<const double> x) {
    return std::vector<double>{x[0] + 1.0};
  });
  const auto sys = CoupledSystem({lin, lin}, LayeredNetwork(2, {{{1, 2, 1.0}}}));
  const auto eq = make_homogeneous_equilibrium(sys, std::vector<double>{-1.0});
  EXPECT_EQ(eq.warnings.size(), 1u);
}

}  // namespace
