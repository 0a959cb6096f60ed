#include <gtest/gtest.h>

#include <random>

#include <graphcap/code_check.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace graphcap;

namespace {

void expect_witness_sound(const Graph& g, const PartialDFA& m, const CodeVerdict& v) {
  if (v.valid) {
    EXPECT_FALSE(v.witness.has_value());
    return;
  }
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_TRUE(replays_as_confusion(g, m, v.witness->first, v.witness->second))
      << format_word(v.witness->first) << " / " << format_word(v.witness->second);
}

// Pairs that reach the diagonal, by backward search over the pair graph.
std::vector<char> reach_diagonal_oracle(const Graph& g, const PartialDFA& m) {
  const std::size_t d = m.d;
  std::vector<char> mark(d * d, 0);
  std::vector<std::size_t> queue;
  for (std::size_t i = 0; i < d; ++i) {
    mark[i * d + i] = 1;
    queue.push_back(i * d + i);
  }
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    std::size_t ti = queue[qi] / d, tj = queue[qi] % d;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        if (mark[i * d + j]) continue;
        bool hit = false;
        for (std::size_t u = 0; u < m.k && !hit; ++u)
          for (std::size_t v = 0; v < m.k && !hit; ++v)
            hit = confusable(g, u, v) && m.next(i, int(u)) == int(ti) && m.next(j, int(v)) == int(tj);
        if (hit) {
          mark[i * d + j] = 1;
          queue.push_back(i * d + j);
        }
      }
  }
  return mark;
}

}  // namespace

TEST(CodeCheck, Fixtures) {
  Graph c5 = cycle_graph(5);
  auto block = fixture::c5_block();
  EXPECT_TRUE(check_code_floodfill(c5, SimplifiedDFA::certify(block)).valid);
  EXPECT_TRUE(check_code_product(c5, block).valid);

  auto bad = fixture::one_state(5, {0, 1});
  auto f = check_code_floodfill(c5, SimplifiedDFA::certify(bad));
  auto p = check_code_product(c5, bad);
  EXPECT_FALSE(f.valid);
  EXPECT_FALSE(p.valid);
  ASSERT_TRUE(f.witness && p.witness);
  EXPECT_EQ(f.witness->first, Word{0});
  EXPECT_EQ(f.witness->second, Word{1});
  EXPECT_EQ(p.witness->first, Word{0});
  EXPECT_EQ(p.witness->second, Word{1});

  auto good = fixture::one_state(5, {0, 2});
  EXPECT_TRUE(check_code_floodfill(c5, SimplifiedDFA::certify(good)).valid);
  EXPECT_TRUE(check_code_product(c5, good).valid);
}

TEST(CodeCheck, C7Fixture) {
  const auto& fx = fixture::c7_fixture();
  Graph c7 = cycle_graph(7);
  Graph c7sq = strong_product(c7, c7);
  std::vector<std::size_t> verts;
  for (auto [a, b] : fx.set) verts.push_back(std::size_t(a * 7 + b));
  EXPECT_EQ(fx.set.size(), 10u);
  EXPECT_TRUE(is_independent(c7sq, verts));
  EXPECT_TRUE(is_reversible(fx.machine));
  EXPECT_TRUE(check_code_floodfill(c7, SimplifiedDFA::certify(fx.machine)).valid);
  EXPECT_TRUE(check_code_product(c7, fx.machine).valid);
  EXPECT_NEAR(growth_rate(fx.machine), std::sqrt(10.0), 1e-9);

  // A second maximum set with the same follower shape.
  auto alternate = fixture::c7_alternate();
  std::vector<std::size_t> pv;
  for (auto [a, b] : alternate) pv.push_back(std::size_t(a * 7 + b));
  EXPECT_TRUE(is_independent(c7sq, pv));
  auto pm = fixture::follower_machine(alternate, 7);
  ASSERT_TRUE(pm.has_value());
  EXPECT_EQ(pm->d, 6u);
  EXPECT_TRUE(check_code_product(c7, *pm).valid);
}

TEST(CodeCheck, EmptyLanguageIsValid) {
  PartialDFA m(2, 3, 0);
  m.set(0, 0, 0);
  m.accepting[1] = 1;
  EXPECT_TRUE(check_code_product(complete_graph(3), m).valid);
}

TEST(CodeCheck, AlphabetMismatch) {
  EXPECT_THROW(check_code_product(cycle_graph(5), fixture::one_state(4, {0})), std::invalid_argument);
  EXPECT_THROW(check_code_floodfill(cycle_graph(5), SimplifiedDFA::certify(fixture::one_state(4, {0}))),
               std::invalid_argument);
}

TEST(CodeCheck, RandomAgreement) {
  std::mt19937_64 rng(2024);
  const std::vector<std::size_t> sizes = {3, 5, 7};
  int valid = 0, invalid = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    std::size_t k = sizes[rep % 3];
    Graph g = cycle_graph(k);
    auto m = oracle::random_simplified_dfa(1 + rng() % 5, k, rng, 0.05 + 0.1 * (rep % 4));
    auto f = check_code_floodfill(g, SimplifiedDFA::certify(m));
    auto p = check_code_product(g, m);
    EXPECT_EQ(f.valid, p.valid);
    expect_witness_sound(g, m, f);
    expect_witness_sound(g, m, p);
    (p.valid ? valid : invalid)++;
  }
  EXPECT_GT(valid, 50);
  EXPECT_GT(invalid, 50);
}

TEST(CodeCheck, ProductMatchesBruteForceOnArbitraryMachines) {
  std::mt19937_64 rng(77);
  for (int rep = 0; rep < 200; ++rep) {
    std::size_t k = rep % 2 ? 3 : 5;
    Graph g = cycle_graph(k);
    auto m = oracle::random_partial_dfa(1 + rng() % 2, k, 0.4, rng);
    auto p = check_code_product(g, m);
    // The phased pair automaton has 2 d^2 states, so a shortest witness is shorter.
    EXPECT_EQ(p.valid, oracle::valid_up_to(g, m, int(2 * m.d * m.d - 1)));
    expect_witness_sound(g, m, p);
  }
}

TEST(CodeCheck, ExhaustiveTotalMachinesOnC3) {
  Graph c3 = cycle_graph(3);
  int compared = 0, total = 0;
  for (std::size_t d = 1; d <= 2; ++d) {
    std::size_t cells = d * 3, tables = 1;
    for (std::size_t i = 0; i < cells; ++i) tables *= d;
    for (std::size_t code = 0; code < tables; ++code)
      for (std::size_t init = 0; init < d; ++init)
        for (std::size_t acc = 0; acc < (1u << d); ++acc) {
          PartialDFA m(d, 3, init);
          std::size_t c = code;
          for (std::size_t s = 0; s < d; ++s)
            for (int x = 0; x < 3; ++x) {
              m.set(s, x, int(c % d));
              c /= d;
            }
          for (std::size_t s = 0; s < d; ++s) m.accepting[s] = (acc >> s) & 1u;
          ++total;
          auto p = check_code_product(c3, m);
          EXPECT_EQ(p.valid, oracle::valid_up_to(c3, m, 7));
          expect_witness_sound(c3, m, p);
          try {
            auto s = SimplifiedDFA::certify(m);
            auto f = check_code_floodfill(c3, s);
            EXPECT_EQ(f.valid, p.valid);
            expect_witness_sound(c3, m, f);
            ++compared;
          } catch (const std::invalid_argument&) {
          }
        }
  }
  EXPECT_EQ(total, 2 + 64 * 2 * 4);
  EXPECT_GT(compared, 0);
}

TEST(CodeCheck, FinalTableIsLeastFixedPoint) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 200; ++rep) {
    std::size_t k = rep % 2 ? 5 : 7;
    Graph g = cycle_graph(k);
    auto m = oracle::random_simplified_dfa(1 + rng() % 6, k, rng, 0.2);
    auto pr = pair_reach(g, m);
    auto ref = reach_diagonal_oracle(g, m);
    for (std::size_t i = 0; i < m.d; ++i)
      for (std::size_t j = 0; j < m.d; ++j) {
        EXPECT_EQ(bool(pr(i, j)), bool(ref[i * m.d + j]));
        EXPECT_EQ(pr(i, j), pr(j, i));
      }
    // Closure: one more propagation sweep adds nothing.
    for (std::size_t i = 0; i < m.d; ++i)
      for (std::size_t j = 0; j < m.d; ++j)
        for (std::size_t u = 0; u < k; ++u)
          for (std::size_t v = 0; v < k; ++v) {
            int ni = m.next(i, int(u)), nj = m.next(j, int(v));
            if (confusable(g, u, v) && ni != kUndefined && nj != kUndefined && pr(ni, nj)) EXPECT_TRUE(pr(i, j));
          }
  }
}

TEST(CodeCheck, AddingTransitionsNeverRepairs) {
  std::mt19937_64 rng(13);
  int checked = 0;
  for (int rep = 0; rep < 300; ++rep) {
    Graph g = cycle_graph(5);
    auto m = oracle::random_simplified_dfa(1 + rng() % 4, 5, rng, 0.3);
    auto v = check_code_product(g, m);
    if (v.valid) continue;
    auto grown = m;
    for (std::size_t s = 0; s < grown.d; ++s)
      for (int x = 0; x < 5; ++x)
        if (grown.next(s, x) == kUndefined && rng() % 2) grown.set(s, x, int(rng() % grown.d));
    EXPECT_TRUE(replays_as_confusion(g, grown, v.witness->first, v.witness->second));
    EXPECT_FALSE(check_code_product(g, grown).valid);
    EXPECT_FALSE(check_code_floodfill(g, SimplifiedDFA::certify(grown)).valid);
    ++checked;
  }
  EXPECT_GT(checked, 20);
}
