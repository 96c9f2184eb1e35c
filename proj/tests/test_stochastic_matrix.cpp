#include <gtest/gtest.h>

#include <vector>

#include "otaform/properties.hpp"
#include "otaform/stochastic_matrix.hpp"

using namespace otaform;

namespace {

Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace

TEST(RowStochasticMatrix, RejectsBadRowsAndShapes) {
  EXPECT_THROW(RowStochasticMatrix(mat({{0.5, 0.6}, {0.5, 0.5}})), ValidationError);
  EXPECT_THROW(RowStochasticMatrix(mat({{1.5, -0.5}, {0.5, 0.5}})), ValidationError);
  EXPECT_THROW(RowStochasticMatrix(Eigen::MatrixXd::Constant(2, 3, 1.0 / 3.0)), ValidationError);
  EXPECT_THROW(RowStochasticMatrix(Eigen::MatrixXd(0, 0)), ValidationError);
}

TEST(RowStochasticMatrix, RenormalizesWithinTolerance) {
  const RowStochasticMatrix m(mat({{0.5 + 4e-13, 0.5}, {0.25, 0.75}}));
  EXPECT_NEAR(m.matrix().row(0).sum(), 1.0, 1e-15);
  // Reconstruction from an already normalized matrix is bit-exact.
  const RowStochasticMatrix again(m.matrix());
  EXPECT_EQ((again.matrix() - m.matrix()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Tau1, Examples) {
  EXPECT_DOUBLE_EQ(tau1(RowStochasticMatrix::identity(2)), 1.0);
  EXPECT_DOUBLE_EQ(tau1_overlap(RowStochasticMatrix::identity(2)), 1.0);
  for (std::size_t n : {1, 2, 5, 9}) {
    EXPECT_NEAR(tau1(RowStochasticMatrix::uniform(n)), 0.0, 1e-15);
    EXPECT_NEAR(tau1_overlap(RowStochasticMatrix::uniform(n)), 0.0, 1e-15);
  }
  const Eigen::MatrixXd a = mat({{0.5, 0.5}, {0.25, 0.75}});
  EXPECT_NEAR(tau1(a), 0.25, 1e-15);
  EXPECT_NEAR(tau1_overlap(a), 0.25, 1e-15);
}

TEST(Tau1, RawMatrixIsValidated) {
  EXPECT_THROW(tau1(mat({{0.7, 0.7}, {0.5, 0.5}})), ValidationError);
  EXPECT_THROW(tau1_overlap(mat({{-0.1, 1.1}, {0.5, 0.5}})), ValidationError);
}

TEST(Tau1, RangeAgreementAndSubmultiplicativity) {
  const auto r = suite_tau1(11, 1000);
  EXPECT_EQ(r.violations, 0u) << r.counterexample;
}

TEST(Tau1, SubmultiplicativeOnThreeByThreePairs) {
  Rng rng(5);
  for (int t = 0; t < 1000; ++t) {
    const RowStochasticMatrix a(random_stochastic(3, rng)), b(random_stochastic(3, rng));
    EXPECT_LE(tau1(a * b), tau1(a) * tau1(b) + 1e-12);
  }
}

TEST(WindowProduct, EmptyWindowIsIdentity) {
  const std::vector<RowStochasticMatrix> seq{RowStochasticMatrix::uniform(3)};
  EXPECT_EQ(window_product(seq, 0, 0).matrix(), Eigen::MatrixXd::Identity(3, 3));
  EXPECT_EQ(window_product(seq, 1, 0).matrix(), Eigen::MatrixXd::Identity(3, 3));
}

TEST(WindowProduct, UniformIsIdempotent) {
  const std::vector<RowStochasticMatrix> seq(4, RowStochasticMatrix::uniform(4));
  EXPECT_LT((window_product(seq, 0, 4).matrix() - RowStochasticMatrix::uniform(4).matrix()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(WindowProduct, LaterMatricesMultiplyOnTheLeft) {
  const RowStochasticMatrix a(mat({{1, 0}, {1, 0}})), b(mat({{0, 1}, {0.5, 0.5}}));
  const std::vector<RowStochasticMatrix> seq{a, b};
  const Eigen::MatrixXd expected = b.matrix() * a.matrix();
  EXPECT_EQ(window_product(seq, 0, 2).matrix(), expected);
  EXPECT_THROW(window_product(seq, 1, 2), ValidationError);
}

TEST(SigmaModify, Examples) {
  const RowStochasticMatrix h(mat({{0.5, 0.5}, {0.5, 0.5}}));
  const std::vector<double> half{0.5, 0.5};
  const Eigen::MatrixXd expected = mat({{0.75, 0.25}, {0.25, 0.75}});
  EXPECT_LT((sigma_modify(h, half).matrix() - expected).cwiseAbs().maxCoeff(), 1e-15);

  const std::vector<double> ones{1.0, 1.0};
  EXPECT_EQ(sigma_modify(h, ones).matrix(), h.matrix());

  const std::vector<double> zero{0.0, 1.0}, big{1.2, 1.0}, short_list{1.0};
  EXPECT_THROW(sigma_modify(h, zero), ValidationError);
  EXPECT_THROW(sigma_modify(h, big), ValidationError);
  EXPECT_THROW(sigma_modify(h, short_list), ValidationError);
}

TEST(SigmaSchedule, RejectsOutOfRange) {
  EXPECT_THROW(SigmaSchedule({{0.5, 0.0}}), ValidationError);
  EXPECT_THROW(SigmaSchedule({{0.5, 0.5}, {0.5}}), ValidationError);
  const SigmaSchedule s({{0.5, 1.0}, {0.3, 0.9}});
  EXPECT_DOUBLE_EQ(s.sigma_min(), 0.3);
}

TEST(CertifyMixing, Examples) {
  const std::vector<RowStochasticMatrix> uniform(5, RowStochasticMatrix::uniform(4));
  const auto u = certify_mixing(uniform, 1);
  EXPECT_NEAR(u.contraction_margin, 1.0, 1e-15);
  EXPECT_TRUE(u.certified());

  const std::vector<RowStochasticMatrix> ident(5, RowStochasticMatrix::identity(4));
  for (std::size_t l = 1; l <= 5; ++l) {
    const auto c = certify_mixing(ident, l);
    EXPECT_EQ(c.contraction_margin, 0.0);
    EXPECT_FALSE(c.certified());
  }
  EXPECT_THROW(certify_mixing(ident, 6), ValidationError);
  EXPECT_THROW(certify_mixing(ident, 0), ValidationError);
}

TEST(CertifyMixing, GeneratedSequenceIsCertifiedAtDefaultWindow) {
  for (std::size_t n = 2; n <= 8; ++n) {
    const auto channel = generate_topology_sequence(n, 60, TopologyParams{}, 100 + n);
    std::vector<RowStochasticMatrix> hs;
    for (const auto& c : channel) hs.push_back(effective_matrix(c));
    const auto cert = certify_mixing(hs);
    EXPECT_EQ(cert.window_length, n - 1);
    EXPECT_GT(cert.contraction_margin, 0.0) << "n = " << n;
  }
}

TEST(SigmaModifiedWindows, BoundHoldsOnRandomSequences) {
  const auto r = suite_lemma1(21, 500);
  EXPECT_EQ(r.violations, 0u) << r.counterexample;
}

TEST(SigmaModifiedWindows, DominationCatchesCorruption) {
  // A hook that breaks row sums must surface as a violation, not pass silently.
  const auto r = suite_lemma1(21, 20, [](Eigen::MatrixXd& m) { m(0, 0) += 0.5; });
  EXPECT_GT(r.violations, 0u);
  EXPECT_NE(r.counterexample.find("invalid matrix"), std::string::npos);
}
