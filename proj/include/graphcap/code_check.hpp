#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dfa.hpp"
#include "graph.hpp"

namespace graphcap {

struct CodeVerdict {
  bool valid = true;
  std::optional<std::pair<Word, Word>> witness;
};

// Both strings accepted, equal length, aligned symbols confusable, not equal.
inline bool replays_as_confusion(const Graph& g, const PartialDFA& dfa, const Word& a, const Word& b) {
  if (a.size() != b.size() || a == b) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 0 || b[i] < 0 || std::size_t(a[i]) >= g.size() || std::size_t(b[i]) >= g.size()) return false;
    if (!confusable(g, std::size_t(a[i]), std::size_t(b[i]))) return false;
  }
  return dfa.accepts(a) && dfa.accepts(b);
}

// Pairs of states from which some pair of confusable equal-length strings leads
// to a common state. Stored symmetric; diagonal is true.
struct PairReach {
  std::size_t d = 0;
  std::vector<char> final;
  // For each marked off-diagonal pair: the symbol pair and successor pair that marked it.
  struct Step {
    Symbol u = -1, v = -1;
    std::size_t ni = 0, nj = 0;
  };
  std::vector<Step> via;

  bool operator()(std::size_t i, std::size_t j) const { return final[i * d + j]; }
};

namespace detail {

inline void require_alphabet(const Graph& g, const PartialDFA& dfa) {
  if (dfa.k != g.size())
    throw std::invalid_argument("alphabet size " + std::to_string(dfa.k) + " does not match graph size " +
                                std::to_string(g.size()));
}

// Shortest word driving the machine from one state to another (BFS).
inline std::optional<Word> shortest_path(const PartialDFA& dfa, std::size_t from, std::size_t to) {
  std::vector<long> parent(dfa.d, -2);
  std::vector<Symbol> by(dfa.d, -1);
  std::vector<std::size_t> queue{from};
  parent[from] = -1;
  for (std::size_t qi = 0; qi < queue.size() && parent[to] == -2; ++qi)
    for (std::size_t x = 0; x < dfa.k; ++x) {
      int t = dfa.next(queue[qi], Symbol(x));
      if (t == kUndefined || parent[std::size_t(t)] != -2) continue;
      parent[std::size_t(t)] = long(queue[qi]);
      by[std::size_t(t)] = Symbol(x);
      queue.push_back(std::size_t(t));
    }
  if (parent[to] == -2) return std::nullopt;
  Word w;
  for (std::size_t s = to; s != from; s = std::size_t(parent[s])) w.push_back(by[s]);
  std::reverse(w.begin(), w.end());
  return w;
}

}  // namespace detail

// Least fixed point of the Final propagation over the upper triangle.
inline PairReach pair_reach(const Graph& g, const PartialDFA& dfa) {
  detail::require_alphabet(g, dfa);
  const std::size_t d = dfa.d, k = dfa.k;
  PairReach pr{d, std::vector<char>(d * d, 0), std::vector<PairReach::Step>(d * d)};
  for (std::size_t i = 0; i < d; ++i) pr.final[i * d + i] = 1;
  std::vector<std::pair<Symbol, Symbol>> moves;
  for (std::size_t u = 0; u < k; ++u)
    for (std::size_t v = 0; v < k; ++v)
      if (confusable(g, u, v)) moves.emplace_back(Symbol(u), Symbol(v));
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) {
        if (pr.final[i * d + j]) continue;
        for (auto [u, v] : moves) {
          int ni = dfa.next(i, u), nj = dfa.next(j, v);
          if (ni == kUndefined || nj == kUndefined || !pr.final[std::size_t(ni) * d + std::size_t(nj)]) continue;
          pr.final[i * d + j] = pr.final[j * d + i] = 1;
          pr.via[i * d + j] = {u, v, std::size_t(ni), std::size_t(nj)};
          pr.via[j * d + i] = {v, u, std::size_t(nj), std::size_t(ni)};
          changed = true;
          break;
        }
      }
  }
  return pr;
}

// Flood-fill on a simplified machine: reject iff a diagonal state reaches a
// Final pair through one confusable, unequal symbol pair.
inline CodeVerdict check_code_floodfill(const Graph& g, const SimplifiedDFA& sdfa) {
  const PartialDFA& dfa = sdfa.dfa;
  detail::require_alphabet(g, dfa);
  const std::size_t d = dfa.d;
  PairReach pr = pair_reach(g, dfa);
  for (std::size_t i = 0; i < d; ++i)
    for (auto [u, v] : g.edges()) {
      int ni = dfa.next(i, Symbol(u)), nj = dfa.next(i, Symbol(v));
      if (ni == kUndefined || nj == kUndefined || !pr(std::size_t(ni), std::size_t(nj))) continue;
      Word a, b;
      auto prefix = detail::shortest_path(dfa, dfa.initial, i);
      a = b = *prefix;
      a.push_back(Symbol(u));
      b.push_back(Symbol(v));
      std::size_t x = std::size_t(ni), y = std::size_t(nj);
      while (x != y) {
        const auto& st = pr.via[x * d + y];
        a.push_back(st.u);
        b.push_back(st.v);
        x = st.ni;
        y = st.nj;
      }
      auto tail = detail::shortest_path(dfa, x, dfa.initial);
      a.insert(a.end(), tail->begin(), tail->end());
      b.insert(b.end(), tail->begin(), tail->end());
      return {false, std::make_pair(std::move(a), std::move(b))};
    }
  return {true, std::nullopt};
}

// Product route: run two copies in lockstep over confusable symbol pairs,
// with a phase bit recording whether an unequal pair has been read, and search
// for an accepting pair in the second phase. Works on any partial DFA.
inline CodeVerdict check_code_product(const Graph& g, const PartialDFA& dfa) {
  detail::require_alphabet(g, dfa);
  dfa.validate();
  const std::size_t d = dfa.d, k = dfa.k;
  auto id = [&](std::size_t p, std::size_t q, std::size_t phase) { return (p * d + q) * 2 + phase; };
  const std::size_t total = d * d * 2;
  struct Parent {
    long prev = -2;
    Symbol u = -1, v = -1;
  };
  std::vector<Parent> parent(total);
  std::vector<std::size_t> queue{id(dfa.initial, dfa.initial, 0)};
  parent[queue[0]].prev = -1;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    std::size_t cur = queue[qi];
    std::size_t phase = cur % 2, p = (cur / 2) / d, q = (cur / 2) % d;
    if (phase == 1 && dfa.accepting[p] && dfa.accepting[q]) {
      Word a, b;
      for (std::size_t s = cur; parent[s].prev != -1; s = std::size_t(parent[s].prev)) {
        a.push_back(parent[s].u);
        b.push_back(parent[s].v);
      }
      std::reverse(a.begin(), a.end());
      std::reverse(b.begin(), b.end());
      return {false, std::make_pair(std::move(a), std::move(b))};
    }
    for (std::size_t u = 0; u < k; ++u)
      for (std::size_t v = 0; v < k; ++v) {
        if (!confusable(g, u, v)) continue;
        int np = dfa.next(p, Symbol(u)), nq = dfa.next(q, Symbol(v));
        if (np == kUndefined || nq == kUndefined) continue;
        std::size_t nphase = (phase == 1 || u != v) ? 1 : 0;
        std::size_t nxt = id(std::size_t(np), std::size_t(nq), nphase);
        if (parent[nxt].prev != -2) continue;
        parent[nxt] = {long(cur), Symbol(u), Symbol(v)};
        queue.push_back(nxt);
      }
  }
  return {true, std::nullopt};
}

}  // namespace graphcap
