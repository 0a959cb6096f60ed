#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include <graphcap/dfa.hpp>
#include <graphcap/graph.hpp>

namespace fixture {

using graphcap::PartialDFA;
using graphcap::Word;

// Optimal length-2 code for C5 (0-based translation of {(1,1),(2,3),(3,5),(4,2),(5,4)}).
inline std::vector<Word> c5_code() { return {{0, 0}, {1, 2}, {2, 4}, {3, 1}, {4, 3}}; }

inline PartialDFA c5_block() { return graphcap::block_code_dfa(c5_code(), 5); }

// One-state machine accepting the given symbols.
inline PartialDFA one_state(std::size_t k, const std::vector<int>& symbols) {
  PartialDFA m(1, k, 0);
  for (int x : symbols) m.set(0, x, 0);
  m.accepting[0] = 1;
  return m;
}

// All maximum independent sets of C_m^{⊠2}, as sorted coordinate-pair lists.
inline std::vector<std::vector<std::pair<int, int>>> max_independent_sets_cycle_square(int m, std::size_t size) {
  const int n = m * m;
  auto adjacent = [&](int a, int b) {
    auto conf = [&](int x, int y) {
      int d = ((x - y) % m + m) % m;
      return d <= 1 || d == m - 1;
    };
    return a != b && conf(a / m, b / m) && conf(a % m, b % m);
  };
  std::vector<std::vector<std::pair<int, int>>> out;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int from) {
    if (cur.size() == size) {
      std::vector<std::pair<int, int>> s;
      for (int v : cur) s.emplace_back(v / m, v % m);
      out.push_back(s);
      return;
    }
    for (int v = from; v < n; ++v) {
      if (int(size - cur.size()) > n - v) return;
      bool ok = std::none_of(cur.begin(), cur.end(), [&](int u) { return adjacent(u, v); });
      if (!ok) continue;
      cur.push_back(v);
      rec(v + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

// Machine reading pairs (a,b): the first symbol selects a state keyed by the
// follower set of a; the second returns to the root. Returns std::nullopt
// unless distinct follower sets are pairwise disjoint.
inline std::optional<PartialDFA> follower_machine(const std::vector<std::pair<int, int>>& set, std::size_t k) {
  std::map<int, std::set<int>> followers;
  for (auto [a, b] : set) followers[a].insert(b);
  std::vector<std::set<int>> distinct;
  std::map<int, int> state_of;
  for (const auto& [a, f] : followers) {
    auto it = std::find(distinct.begin(), distinct.end(), f);
    if (it == distinct.end()) {
      distinct.push_back(f);
      it = distinct.end() - 1;
    }
    state_of[a] = int(it - distinct.begin()) + 1;
  }
  for (std::size_t i = 0; i < distinct.size(); ++i)
    for (std::size_t j = i + 1; j < distinct.size(); ++j)
      for (int b : distinct[i])
        if (distinct[j].count(b)) return std::nullopt;
  PartialDFA m(distinct.size() + 1, k, 0);
  m.accepting[0] = 1;
  for (const auto& [a, s] : state_of) m.set(0, a, s);
  for (std::size_t i = 0; i < distinct.size(); ++i)
    for (int b : distinct[i]) m.set(i + 1, b, 0);
  return m;
}

// The C7 machine: the lexicographically first maximum independent set of
// C7^{⊠2} whose merged follower sets are pairwise disjoint and number five.
struct C7Fixture {
  std::vector<std::pair<int, int>> set;
  PartialDFA machine;
};

inline const C7Fixture& c7_fixture() {
  static const C7Fixture fx = [] {
    for (const auto& s : max_independent_sets_cycle_square(7, 10)) {
      auto m = follower_machine(s, 7);
      if (m && m->d == 6) return C7Fixture{s, *m};
    }
    throw std::runtime_error("no C7 follower-structured code found");
  }();
  return fx;
}

// Another maximum independent set of C7^{⊠2} with five disjoint follower classes.
inline std::vector<std::pair<int, int>> c7_alternate() {
  return {{0, 2}, {0, 4}, {1, 6}, {2, 1}, {2, 3}, {3, 5}, {4, 1}, {4, 3}, {5, 5}, {6, 0}};
}

}  // namespace fixture
