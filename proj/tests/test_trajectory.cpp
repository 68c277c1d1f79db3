#include <doctest.h>

#include <random>

#include "lqrsyn/trajectory.hpp"
#include "test_util.hpp"

using namespace lqrsyn;
using namespace lqrsyn::testing;

TEST_CASE("rollout_state_aggregate") {
  const SystemModel model = example2_model(0.9);
  MatrixXd F(1, 2);
  F << -0.5, -1.0;
  REQUIRE(is_stabilizing(model, F));

  SUBCASE("zero initial state") {
    const BlockSym S =
        rollout_state_aggregate(model, F, VectorXd::Zero(2), 50);
    CHECK(S.full().norm() == 0.0);
  }
  SUBCASE("single term at M = 0") {
    VectorXd z(2);
    z << 1, -1;
    VectorXd v(3);
    v << z, F * z;
    const BlockSym S = rollout_state_aggregate(model, F, z, 0);
    CHECK((S.full() - v * v.transpose()).norm() < 1e-14);
  }
  SUBCASE("geometric tail decay") {
    VectorXd z(2);
    z << 1, -1;
    const BlockSym S200 = rollout_state_aggregate(model, F, z, 200);
    const BlockSym S400 = rollout_state_aggregate(model, F, z, 400);
    CHECK((S200.full() - S400.full()).norm() <= 1e-6);
  }
  SUBCASE("converges to the Stein covariance") {
    VectorXd z(2);
    z << 1, -1;
    MatrixXd stack(3, 2);
    stack.topRows(2) = MatrixXd::Identity(2, 2);
    stack.bottomRows(1) = F;
    const BlockSym S_exact = solve_stein_covariance(
        model, F, stack * z * z.transpose() * stack.transpose());
    const int M = default_horizon(model, F, 1e-10);
    const BlockSym S_sim = rollout_state_aggregate(model, F, z, M);
    CHECK((S_sim.full() - S_exact.full()).norm() <
          1e-8 * (1.0 + S_exact.full().norm()));
  }
  CHECK_THROWS(rollout_state_aggregate(model, F, VectorXd::Zero(2), -1));
}

TEST_CASE("rollout_adjoint_aggregate") {
  SUBCASE("zero Lambda") {
    const SystemModel model = example2_model(0.9);
    MatrixXd F(1, 2);
    F << -0.5, -1.0;
    std::vector<VectorXd> xi = {VectorXd::Zero(3)};
    const BlockSym P =
        rollout_adjoint_aggregate(model, F, xi, MatrixXd::Zero(3, 3), 10);
    CHECK(P.full().norm() == 0.0);
  }
  SUBCASE("A_F = 0 gives P = Lambda") {
    SystemModel model(MatrixXd::Zero(2, 2), MatrixXd::Zero(2, 1), 0.9);
    const MatrixXd Lambda = example2_cost().lambda();
    const auto xi = psd_factor_columns(Lambda);
    const BlockSym P =
        rollout_adjoint_aggregate(model, MatrixXd::Zero(1, 2), xi, Lambda, 5);
    CHECK((P.full() - Lambda).norm() < 1e-12);
  }
  SUBCASE("Gram mismatch is rejected") {
    const SystemModel model = example2_model(0.9);
    MatrixXd F(1, 2);
    F << -0.5, -1.0;
    std::vector<VectorXd> xi = {VectorXd::Ones(3)};
    CHECK_THROWS_AS(rollout_adjoint_aggregate(model, F, xi,
                                              example2_cost().lambda(), 10),
                    std::invalid_argument);
  }
  SUBCASE("matches the Stein value solution") {
    std::mt19937 rng(23);
    const auto inst = random_stabilizing(rng, 2, 1, 0.9);
    const MatrixXd Lambda = example2_cost().lambda();
    const BlockSym P_exact = solve_stein_value(inst.model, inst.F, Lambda);
    const BlockSym P_sim = rollout_adjoint_aggregate(
        inst.model, inst.F, psd_factor_columns(Lambda), Lambda, 300);
    CHECK((P_sim.full() - P_exact.full()).norm() <=
          1e-5 * P_exact.full().norm());
  }
}

TEST_CASE("rollout_augmented") {
  const SystemModel model = example2_model(0.9);
  MatrixXd F(1, 2);
  F << -0.5, -1.0;
  const MatrixXd Af = closed_loop(model, F).augmented;

  SUBCASE("one-term sums") {
    VectorXd v(3);
    v << 1, 2, 3;
    const auto agg = rollout_augmented(model, F, {v}, 0);
    CHECK((agg.S.full() - v * v.transpose()).norm() < 1e-14);
    CHECK((agg.W - (Af * v) * v.transpose()).norm() < 1e-14);
  }
  SUBCASE("identity seeds approach the Stein covariance with N = I") {
    std::vector<VectorXd> seeds;
    for (int i = 0; i < 3; ++i) seeds.push_back(VectorXd::Unit(3, i));
    const BlockSym S_exact =
        solve_stein_covariance(model, F, MatrixXd::Identity(3, 3));
    const int M = default_horizon(model, F, 1e-10);
    const auto agg = rollout_augmented(model, F, seeds, M);
    CHECK((agg.S.full() - S_exact.full()).norm() <
          1e-7 * (1.0 + S_exact.full().norm()));
  }
  SUBCASE("W equals A_F S at every finite horizon") {
    std::mt19937 rng(29);
    for (int trial = 0; trial < 20; ++trial) {
      const auto inst = random_stabilizing(rng, 3, 2, 0.9);
      const MatrixXd Afi = closed_loop(inst.model, inst.F).augmented;
      std::vector<VectorXd> seeds;
      for (int i = 0; i < 5; ++i) seeds.push_back(random_matrix(rng, 5, 1));
      const auto agg = rollout_augmented(inst.model, inst.F, seeds, 40);
      CHECK((agg.W - Afi * agg.S.full()).norm() <=
            1e-10 * (1.0 + agg.S.full().norm()));
    }
  }
  CHECK_THROWS(rollout_augmented(model, F, {}, 10));
}

TEST_CASE("discounted_cost") {
  const SystemModel model = example2_model(0.9);
  const CostSpec cost = example2_cost();
  MatrixXd F(1, 2);
  F << -0.5, -1.0;

  SUBCASE("zero state costs nothing") {
    CHECK(discounted_cost(model, F, VectorXd::Zero(2), cost, 100) == 0.0);
  }
  SUBCASE("first-term cost") {
    VectorXd z(2);
    z << 2, -1;
    const double expected =
        (z.transpose() * cost.Q * z).value() +
        (z.transpose() * F.transpose() * cost.R * F * z).value();
    CHECK(discounted_cost(model, F, z, cost, 0) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("value-function identity at the Riccati optimum") {
    const SystemModel m1 = example2_model(1.0);
    const auto r = dare_oracle(m1, cost);
    const VectorXd z = VectorXd::Unit(2, 0);
    const double J = discounted_cost(m1, r.gain.F, z, cost, 500);
    CHECK(J == doctest::Approx(r.P(0, 0)).epsilon(1e-6));
  }
  SUBCASE("cost equals trace(Lambda S~)") {
    VectorXd z(2);
    z << 1, -1;
    const BlockSym S = rollout_state_aggregate(model, F, z, 77);
    CHECK(discounted_cost(model, F, z, cost, 77) ==
          doctest::Approx((cost.lambda() * S.full()).trace()).epsilon(1e-12));
  }
}

TEST_CASE("default_horizon tail bound") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = random_stabilizing(rng, 2, 1, 0.9);
    const VectorXd z = random_matrix(rng, 2, 1);
    const int M = default_horizon(inst.model, inst.F, 1e-8);
    const BlockSym S1 = rollout_state_aggregate(inst.model, inst.F, z, M);
    const BlockSym S2 = rollout_state_aggregate(inst.model, inst.F, z, 2 * M);
    CHECK((S1.full() - S2.full()).norm() <=
          1e-6 * (1.0 + S1.full().norm()));
  }
}
