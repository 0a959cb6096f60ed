#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <graphcap/bounds.hpp>
#include <graphcap/qfa.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace graphcap;

namespace {

CMatrix random_unitary(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  CMatrix z{Eigen::Index(dim), Eigen::Index(dim)};
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = cplx(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<CMatrix> qr(z);
  return qr.householderQ() * CMatrix::Identity(z.rows(), z.cols());
}

// Two-dimensional QFA: A and N are rank one and orthogonal, R is zero.
QFA random_qubit_qfa(std::size_t symbols, std::mt19937_64& rng) {
  QFA q;
  q.dim = 2;
  for (std::size_t s = 0; s < symbols; ++s) q.unitaries.push_back(random_unitary(2, rng));
  CMatrix basis = random_unitary(2, rng);
  CVector a = basis.col(0), b = basis.col(1);
  q.accept = a * a.adjoint();
  q.neutral = b * b.adjoint();
  q.reject = CMatrix::Zero(2, 2);
  CMatrix v = random_unitary(2, rng);
  q.init = v.col(0);
  q.validate();
  return q;
}

QFA rotation_qfa() {
  const double c = std::cos(std::numbers::pi / 4), s = std::sin(std::numbers::pi / 4);
  QFA q;
  q.dim = 2;
  CMatrix u(2, 2);
  u << c, -s, s, c;
  q.unitaries = {u};
  q.accept = CMatrix::Zero(2, 2);
  q.accept(0, 0) = 1;
  q.neutral = CMatrix::Zero(2, 2);
  q.neutral(1, 1) = 1;
  q.reject = CMatrix::Zero(2, 2);
  q.init = CVector::Zero(2);
  q.init(1) = 1;
  q.validate();
  return q;
}

// Product of explicit matrices, written out separately from the library path.
double oracle_prob(const QFA& q, const Word& w) {
  CMatrix m = CMatrix::Identity(Eigen::Index(q.dim), Eigen::Index(q.dim));
  for (Symbol x : w) m = q.unitaries[std::size_t(x)] * q.neutral * m;
  CVector out = q.accept * m * q.init;
  return out.squaredNorm();
}

std::vector<PartialDFA> reversible_fixtures() {
  Graph c5 = cycle_graph(5);
  std::vector<PartialDFA> out = {fixture::one_state(5, {0, 2}), fixture::c5_block(), fixture::c7_fixture().machine,
                                 rewind_dfa(c5, fixture::c5_code()), rewind_dfa(c5, {{0}})};
  for (const char* name : {"c5_two.dfa", "c5_zero_one.dfa", "c5block.dfa", "c7_follower.dfa"}) {
    std::ifstream in(std::string(GRAPHCAP_FIXTURE_DIR) + "/" + name);
    out.push_back(read_dfa(in));
  }
  return out;
}

}  // namespace

TEST(Qfa, RotationByHand) {
  auto q = rotation_qfa();
  EXPECT_NEAR(accept_prob(q, {0}), 0.5, 1e-15);
  EXPECT_NEAR(accept_prob(q, {}), 0.0, 1e-15);
  // After each step the neutral amplitude shrinks by cos(π/4) and A sees sin(π/4) of it.
  for (std::size_t n = 1; n <= 6; ++n) {
    EXPECT_NEAR(accept_prob(q, Word(n, 0)), std::pow(0.5, double(n)), 1e-14);
    EXPECT_NEAR(capacity_finite_n(q, n), 0.5, 1e-12);
    EXPECT_NEAR(growth_rate_nondet(q, n), 1.0, 1e-12);
  }
  EXPECT_NEAR(capacity_spectral(q), 0.5, 1e-12);
}

TEST(Qfa, EmptyAcceptProjector) {
  auto q = rotation_qfa();
  q.accept = CMatrix::Zero(2, 2);
  q.reject(0, 0) = 1;
  q.validate();
  EXPECT_DOUBLE_EQ(growth_rate_nondet(q, 3), 0.0);
  EXPECT_DOUBLE_EQ(capacity_spectral(q), 0.0);
}

TEST(Qfa, Validation) {
  auto q = rotation_qfa();
  auto bad = q;
  bad.unitaries[0](0, 0) = 2.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = q;
  bad.init(0) = 1;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = q;
  bad.reject(0, 0) = 1;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = q;
  bad.neutral(0, 0) = 1;
  EXPECT_NO_THROW(bad.validate());
  EXPECT_EQ(bad.layout(), ProjectorLayout::nested);
  EXPECT_EQ(q.layout(), ProjectorLayout::disjoint);
  bad = q;
  bad.accept(0, 1) = 0.5;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  EXPECT_THROW(accept_prob(q, {1}), std::invalid_argument);
}

TEST(Qfa, OneStateEmbedding) {
  auto q = from_reversible_dfa(fixture::one_state(5, {0, 2}));
  EXPECT_LE(q.dim, 2u);
  EXPECT_DOUBLE_EQ(accept_prob(q, {0}), 1.0);
  EXPECT_DOUBLE_EQ(accept_prob(q, {1}), 0.0);
  EXPECT_NEAR(acceptance_mass(q, 3), 8.0, 1e-12);
  EXPECT_NEAR(capacity_finite_n(q, 3), 2.0, 1e-12);
  EXPECT_NEAR(capacity_spectral(q), 2.0, 1e-9);
}

TEST(Qfa, BlockEmbeddingMatchesMembership) {
  auto m = fixture::c5_block();
  auto q = from_reversible_dfa(m);
  EXPECT_LE(q.dim, 2 * m.d);
  for (std::size_t n = 0; n <= 4; ++n)
    for (const auto& w : oracle::all_strings(5, int(n))) EXPECT_EQ(accept_prob(q, w), m.accepts(w) ? 1.0 : 0.0);
  EXPECT_NEAR(acceptance_mass(q, 4), 25.0, 1e-12);
  EXPECT_NEAR(capacity_finite_n(q, 4), std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(capacity_spectral(q), std::sqrt(5.0), 1e-9);
}

TEST(Qfa, EmbeddingRejectsIrreversible) {
  PartialDFA m(2, 2, 0);
  m.set(0, 0, 1);
  m.set(1, 0, 1);
  EXPECT_THROW(from_reversible_dfa(m), std::invalid_argument);
}

TEST(Qfa, SpectralEqualsGrowthOnReversibleFixtures) {
  for (const auto& m : reversible_fixtures()) {
    ASSERT_TRUE(is_reversible(m));
    auto q = from_reversible_dfa(m);
    EXPECT_LE(q.dim, 2 * m.d);
    EXPECT_NEAR(capacity_spectral(q), growth_rate(m), 1e-9) << m.d;
    for (std::size_t n = 1; n <= 4; ++n) EXPECT_DOUBLE_EQ(growth_rate_nondet(q, n), capacity_finite_n(q, n));
  }
}

TEST(Qfa, SpectralEqualsGrowthOnRandomReversibleMachines) {
  std::mt19937_64 rng(99);
  int checked = 0;
  while (checked < 150) {
    auto m = oracle::random_partial_dfa(1 + rng() % 6, 2 + rng() % 4, 0.35, rng);
    if (!is_reversible(m)) continue;
    auto q = from_reversible_dfa(m);
    EXPECT_NEAR(capacity_spectral(q), growth_rate(m), 1e-9);
    for (std::size_t n = 1; n <= 3; ++n)
      EXPECT_NEAR(acceptance_mass(q, n), double(oracle::count_accepted(m, int(n))), 1e-9);
    ++checked;
  }
}

TEST(Qfa, ValidEmbeddedMachinesStayBelowC5Capacity) {
  Graph c5 = cycle_graph(5);
  std::mt19937_64 rng(12);
  int checked = 0;
  for (int rep = 0; rep < 400; ++rep) {
    auto m = oracle::random_simplified_dfa(1 + rng() % 6, 5, rng, 0.1);
    if (!is_reversible(m) || !check_code_product(c5, m).valid) continue;
    EXPECT_LE(capacity_spectral(from_reversible_dfa(m)), std::sqrt(5.0) + 1e-9);
    ++checked;
  }
  EXPECT_GT(checked, 10);
}

TEST(Qfa, TransferMatchesEnumerationOnRandomQubits) {
  std::mt19937_64 rng(2718);
  for (int rep = 0; rep < 50; ++rep) {
    auto q = random_qubit_qfa(2 + rep % 2, rng);
    for (std::size_t n = 1; n <= 5; ++n) {
      EXPECT_NEAR(capacity_finite_n(q, n), capacity_finite_n_enumerated(q, n), 1e-10);
      double mass = 0;
      for (const auto& w : oracle::all_strings(int(q.alphabet()), int(n))) {
        double p = accept_prob(q, w);
        EXPECT_GE(p, -1e-15);
        EXPECT_LE(p, 1 + 1e-12);
        EXPECT_NEAR(p, oracle_prob(q, w), 1e-12);
        mass += p;
      }
      EXPECT_NEAR(acceptance_mass(q, n), mass, 1e-10);
    }
  }
}

TEST(Qfa, FiniteNApproachesSpectral) {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 20; ++rep) {
    auto q = random_qubit_qfa(3, rng);
    double spectral = capacity_spectral(q);
    auto err = [&](std::size_t n) { return std::abs(std::pow(acceptance_mass(q, n), 1.0 / double(n)) - spectral); };
    EXPECT_LT(err(400), err(10) + 1e-12);
    EXPECT_LT(err(400), 0.05 * std::max(1.0, spectral));
  }
}

TEST(Qfa, EnumerationLimit) {
  auto q = from_reversible_dfa(fixture::c5_block());
  EXPECT_THROW(capacity_finite_n(q, 11), std::invalid_argument);
  EXPECT_NO_THROW(capacity_finite_n(q, 10));
  EXPECT_THROW(capacity_finite_n_enumerated(q, 7), std::invalid_argument);
  EXPECT_THROW(capacity_finite_n(q, 0), std::invalid_argument);
}

TEST(Qfa, DiagonalObjectiveOnEmbeddings) {
  auto q = from_reversible_dfa(fixture::c5_block());
  EXPECT_NEAR(capacity_objective_diagonal(q), std::sqrt(5.0), 1e-9);
}

TEST(Qfa, JsonRoundTrip) {
  std::mt19937_64 rng(6);
  for (const auto& q : {random_qubit_qfa(3, rng), from_reversible_dfa(fixture::c5_block())}) {
    auto back = qfa_from_json(nlohmann::json::parse(to_json(q).dump()));
    EXPECT_EQ(back.dim, q.dim);
    ASSERT_EQ(back.alphabet(), q.alphabet());
    for (std::size_t s = 0; s < q.alphabet(); ++s) EXPECT_LT((back.unitaries[s] - q.unitaries[s]).norm(), 1e-15);
    EXPECT_LT((back.accept - q.accept).norm(), 1e-15);
    EXPECT_LT((back.init - q.init).norm(), 1e-15);
  }
  auto j = nlohmann::json::parse(R"({"dim":1,"unitaries":[[[[1,0]]]],"accept":[1],"reject":[0],"neutral":[1],
                                      "init":[[1,0]]})");
  auto q = qfa_from_json(j);
  EXPECT_NEAR(capacity_spectral(q), 1.0, 1e-12);
}
