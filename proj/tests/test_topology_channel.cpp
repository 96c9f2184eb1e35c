#include <gtest/gtest.h>

#include <vector>

#include "otaform/properties.hpp"
#include "otaform/topology_channel.hpp"

using namespace otaform;

namespace {

DirectedGraph complete(std::size_t n) {
  DirectedGraph g(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) g.add_arc(j, i);
    }
  }
  return g;
}

// Receiver 0 hears agents 0, 1, 2 with gains (0.2, 0.3, 0.5).
ChannelRealization three_way() {
  const DirectedGraph g = complete(3);
  Eigen::MatrixXd xi = Eigen::MatrixXd::Constant(3, 3, 1.0);
  xi.row(0) << 0.2, 0.3, 0.5;
  return ChannelRealization(g, xi, 0);
}

}  // namespace

TEST(Superpose, Examples) {
  const DirectedGraph g = complete(2);
  const ChannelRealization half(g, Eigen::MatrixXd::Constant(2, 2, 0.5), 0);
  const std::vector<double> a{2.0, 4.0}, zeros{0.0, 0.0};
  EXPECT_DOUBLE_EQ(superpose(half, 0, a), 3.0);
  EXPECT_DOUBLE_EQ(superpose(half, 1, zeros), 0.0);
  const std::vector<double> ones{1.0, 1.0, 1.0};
  EXPECT_NEAR(superpose(three_way(), 0, ones), 1.0, 1e-15);
}

TEST(NormalizedAggregate, Examples) {
  const ChannelRealization real = three_way();
  const std::vector<Vec2> payload{{1, 0}, {0, 1}, {1, 1}};
  const Vec2 agg = normalized_aggregate(real, 0, payload);
  EXPECT_NEAR(agg.x(), 0.7, 1e-15);
  EXPECT_NEAR(agg.y(), 0.8, 1e-15);

  const std::vector<Vec2> same(3, Vec2(2.5, -1.25));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(normalized_aggregate(real, i, same), same[0]);

  const ChannelRealization pair(complete(2), Eigen::MatrixXd::Ones(2, 2), 0);
  const std::vector<Vec2> two{{0, 0}, {2, 0}};
  EXPECT_EQ(normalized_aggregate(pair, 0, two), Vec2(1, 0));
}

TEST(EffectiveMatrix, Examples) {
  const ChannelRealization solo(DirectedGraph(1), Eigen::MatrixXd::Constant(1, 1, 0.4), 0);
  EXPECT_EQ(effective_matrix(solo).matrix(), Eigen::MatrixXd::Ones(1, 1));

  const ChannelRealization pair(complete(2), Eigen::MatrixXd::Constant(2, 2, 0.7), 0);
  EXPECT_EQ(effective_matrix(pair).matrix(), Eigen::MatrixXd::Constant(2, 2, 0.5));

  const RowStochasticMatrix h = effective_matrix(three_way());
  EXPECT_NEAR(h(0, 0), 0.2, 1e-15);
  EXPECT_NEAR(h(0, 1), 0.3, 1e-15);
  EXPECT_NEAR(h(0, 2), 0.5, 1e-15);
}

TEST(ChannelRealization, RejectsGainsOffArcsOrOutOfRange) {
  DirectedGraph g(2);
  g.add_arc(0, 1);
  Eigen::MatrixXd xi = Eigen::MatrixXd::Identity(2, 2);
  xi(1, 0) = 0.5;
  EXPECT_NO_THROW(ChannelRealization(g, xi, 0));
  Eigen::MatrixXd off = xi;
  off(0, 1) = 0.5;  // no arc 1 -> 0
  EXPECT_THROW(ChannelRealization(g, off, 0), ValidationError);
  Eigen::MatrixXd big = xi;
  big(1, 0) = 1.5;
  EXPECT_THROW(ChannelRealization(g, big, 0), ValidationError);
  Eigen::MatrixXd missing = xi;
  missing(1, 0) = 0.0;
  EXPECT_THROW(ChannelRealization(g, missing, 0), ValidationError);
}

TEST(Generator, TwoAgentsNeedBothCrossArcs) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto seq = generate_topology_sequence(2, 5, TopologyParams{}, seed);
    for (const auto& real : seq) {
      const auto& g = real.graph();
      EXPECT_TRUE(g.has_arc(0, 1) && g.has_arc(1, 0) && g.has_arc(0, 0) && g.has_arc(1, 1));
    }
  }
}

TEST(Generator, DeterministicAndStronglyConnected) {
  TopologyParams p;
  const auto a = generate_topology_sequence(6, 50, p, 9);
  const auto b = generate_topology_sequence(6, 50, p, 9);
  const auto c = generate_topology_sequence(6, 50, p, 10);
  bool differs = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].coefficients(), b[k].coefficients());
    EXPECT_TRUE(a[k].graph().strongly_connected());
    EXPECT_EQ(a[k].instant(), k);
    differs = differs || a[k].coefficients() != c[k].coefficients();
    for (Eigen::Index i = 0; i < 6; ++i) {
      for (Eigen::Index j = 0; j < 6; ++j) {
        const double x = a[k].coefficients()(i, j);
        if (a[k].graph().has_arc(static_cast<std::size_t>(j), static_cast<std::size_t>(i))) {
          EXPECT_GE(x, p.xi_min);
          EXPECT_LE(x, 1.0);
        } else {
          EXPECT_EQ(x, 0.0);
        }
      }
    }
  }
  EXPECT_TRUE(differs);
}

TEST(Generator, InfeasibleParamsAreConfigErrors) {
  TopologyParams p;
  p.cycle_backbone = false;
  p.edge_probability = 0.0;
  EXPECT_THROW(generate_topology_sequence(3, 2, p, 1), ConfigError);
  TopologyParams q;
  q.xi_min = 0.0;
  EXPECT_THROW(generate_topology_sequence(3, 2, q, 1), ConfigError);
  TopologyParams r;
  r.edge_probability = 1.5;
  EXPECT_THROW(generate_topology_sequence(3, 2, r, 1), ConfigError);
}

TEST(Generator, WithoutBackboneStillConnected) {
  TopologyParams p;
  p.cycle_backbone = false;
  p.edge_probability = 0.5;
  for (const auto& real : generate_topology_sequence(5, 30, p, 4)) EXPECT_TRUE(real.graph().strongly_connected());
}

TEST(Ledger, Examples) {
  const ChannelRealization full(complete(6), Eigen::MatrixXd::Constant(6, 6, 0.5), 0);
  TransmissionLedger ledger;
  EXPECT_EQ(ledger.ota_count, 0u);
  EXPECT_EQ(ledger.n2n_count, 0u);
  for (int k = 0; k < 300; ++k) ledger = record_instant(ledger, full, 2);
  EXPECT_EQ(ledger.ota_count, 900u);
  EXPECT_EQ(ledger.n2n_count, 18000u);
  EXPECT_EQ(ledger.instants, 300u);
}

TEST(Ledger, CountsRealizedArcs) {
  const auto seq = generate_topology_sequence(6, 300, TopologyParams{}, 3);
  TransmissionLedger ledger;
  std::uint64_t arcs = 0;
  for (const auto& real : seq) {
    ledger = record_instant(ledger, real, 2);
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 6; ++j) arcs += (i != j && real.graph().has_arc(j, i)) ? 1 : 0;
    }
  }
  EXPECT_EQ(ledger.ota_count, 900u);
  EXPECT_EQ(ledger.n2n_count, 2 * arcs);
  EXPECT_GE(ledger.n2n_count, 3000u);
  EXPECT_LE(ledger.n2n_count, 18000u);
}

TEST(HullAndScaleInvariance, Suite) {
  const auto r = suite_hull(4, 1000);
  EXPECT_EQ(r.violations, 0u) << r.counterexample;
}
