#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <unordered_map>
#include <vector>

#include "graph.hpp"

namespace graphcap {

inline constexpr std::uint64_t kUnlimited = std::numeric_limits<std::uint64_t>::max();

struct IndependenceResult {
  std::size_t size = 0;
  std::vector<std::size_t> witness;  // sorted vertex indices
  bool exact = false;
  std::uint64_t work = 0;            // search nodes or layer transitions consumed
};

namespace detail {

// Maximum clique in the complement graph with greedy-coloring bounds.
class CliqueSearch {
 public:
  CliqueSearch(const Graph& g, std::uint64_t budget) : budget_(budget) {
    const std::size_t n = g.size();
    std::vector<std::size_t> cdeg(n);
    for (std::size_t v = 0; v < n; ++v) cdeg[v] = n - 1 - g.degree(v);
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return cdeg[a] > cdeg[b]; });
    nbr_.assign(n, BitRow(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && !g.has_edge(order_[i], order_[j])) nbr_[i].set(j);
  }

  void seed(const std::vector<std::size_t>& independent_set) {
    std::vector<std::size_t> pos(order_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) pos[order_[i]] = i;
    best_.clear();
    for (auto v : independent_set) best_.push_back(pos[v]);
  }

  IndependenceResult run() {
    BitRow all(order_.size());
    all.fill();
    if (all.any()) expand(all);
    IndependenceResult r;
    for (auto v : best_) r.witness.push_back(order_[v]);
    std::sort(r.witness.begin(), r.witness.end());
    r.size = r.witness.size();
    r.exact = !aborted_;
    r.work = nodes_;
    return r;
  }

 private:
  void expand(BitRow p) {
    if (nodes_ >= budget_) {
      aborted_ = true;
      return;
    }
    ++nodes_;
    std::vector<std::size_t> verts, colors;
    BitRow uncolored = p;
    std::size_t color = 0;
    while (uncolored.any()) {
      ++color;
      BitRow q = uncolored;
      while (q.any()) {
        std::size_t v = q.first();
        q.reset(v);
        q.subtract(nbr_[v]);
        uncolored.reset(v);
        verts.push_back(v);
        colors.push_back(color);
      }
    }
    for (std::size_t i = verts.size(); i-- > 0;) {
      if (cur_.size() + colors[i] <= best_.size()) return;
      std::size_t v = verts[i];
      cur_.push_back(v);
      BitRow next = p;
      next &= nbr_[v];
      if (next.any())
        expand(std::move(next));
      else if (cur_.size() > best_.size())
        best_ = cur_;
      cur_.pop_back();
      p.reset(v);
      if (aborted_) return;
    }
  }

  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  bool aborted_ = false;
  std::vector<std::size_t> order_;
  std::vector<BitRow> nbr_;
  std::vector<std::size_t> cur_, best_;
};

inline std::vector<std::size_t> greedy_independent_set(const Graph& g) {
  std::vector<std::size_t> order(g.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return g.degree(a) < g.degree(b); });
  BitRow blocked(g.size());
  std::vector<std::size_t> out;
  for (auto v : order) {
    if (blocked.test(v)) continue;
    out.push_back(v);
    blocked.set(v);
    blocked |= g.neighbors(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

using Mask = std::uint64_t;

// Automorphisms of a graph on at most 64 vertices, enumerated by backtracking.
// Stops after `limit` automorphisms; any subset of the group is still usable for
// orbit pruning because the orbit minimum passes every check.
inline std::vector<std::vector<int>> automorphisms(const Graph& h, std::size_t limit = 4096,
                                                   std::uint64_t node_cap = 2'000'000) {
  const int n = static_cast<int>(h.size());
  std::vector<int> order;
  std::vector<char> seen(n, 0);
  for (int s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<int> queue{s};
    seen[s] = 1;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      int v = queue[qi];
      order.push_back(v);
      h.neighbors(v).for_each([&](std::size_t w) {
        if (!seen[w]) {
          seen[w] = 1;
          queue.push_back(static_cast<int>(w));
        }
      });
    }
  }
  std::vector<std::vector<int>> out;
  std::vector<int> image(n, -1);
  std::vector<char> used(n, 0);
  std::uint64_t nodes = 0;
  auto rec = [&](auto&& self, int i) -> void {
    if (out.size() >= limit || nodes >= node_cap) return;
    ++nodes;
    if (i == n) {
      out.push_back(image);
      return;
    }
    int v = order[i];
    for (int c = 0; c < n; ++c) {
      if (used[c] || h.degree(c) != h.degree(v)) continue;
      bool ok = true;
      for (int j = 0; j < i && ok; ++j)
        ok = h.has_edge(v, order[j]) == h.has_edge(c, image[order[j]]);
      if (!ok) continue;
      image[v] = c;
      used[c] = 1;
      self(self, i + 1);
      used[c] = 0;
      image[v] = -1;
    }
  };
  rec(rec, 0);
  return out;
}

// Exact independence number of C_m ⊠ H for a fiber graph H with at most 64
// vertices. Vertex (j, x) of the product is j*|H| + x. Each layer j is an
// independent set of H; consecutive layers (cyclically) must be disjoint and
// non-adjacent in H. Rotating the cycle puts a smallest layer at position 0, and
// fiber automorphisms reduce layer 0 to orbit representatives.
class CycleProductSearch {
 public:
  CycleProductSearch(std::size_t m, const Graph& h, std::uint64_t budget)
      : m_(static_cast<int>(m)), h_(static_cast<int>(h.size())), budget_(budget) {
    if (m < 3) throw std::invalid_argument("cycle length must be >= 3");
    if (h.size() > 64 || h.size() == 0) throw std::invalid_argument("fiber graph must have 1..64 vertices");
    all_ = h.size() == 64 ? ~Mask{0} : ((Mask{1} << h.size()) - 1);
    nb_.resize(h.size());
    for (std::size_t v = 0; v < h.size(); ++v) {
      nb_[v] = Mask{1} << v;
      h.neighbors(v).for_each([&](std::size_t w) { nb_[v] |= Mask{1} << w; });
    }
    CliqueSearch fiber(h, kUnlimited);
    alpha_h_ = static_cast<int>(fiber.run().size);
    perms_ = automorphisms(h);
  }

  int fiber_alpha() const { return alpha_h_; }
  std::size_t automorphism_count() const { return perms_.size(); }

  IndependenceResult run(std::vector<std::size_t> lower_witness) {
    IndependenceResult r;
    int best = static_cast<int>(lower_witness.size());
    for (int target = (m_ * alpha_h_) / 2; target > best; --target) {
      auto found = search(target);
      if (aborted_) break;
      if (found) {
        lower_witness = *found;
        best = target;
        break;
      }
    }
    std::sort(lower_witness.begin(), lower_witness.end());
    r.size = lower_witness.size();
    r.witness = std::move(lower_witness);
    r.exact = !aborted_;
    r.work = work_;
    return r;
  }

 private:
  Mask closed(Mask s) const {
    Mask x = 0;
    while (s) {
      x |= nb_[std::countr_zero(s)];
      s &= s - 1;
    }
    return x;
  }

  Mask permute(const std::vector<int>& p, Mask s) const {
    Mask r = 0;
    while (s) {
      r |= Mask{1} << p[std::countr_zero(s)];
      s &= s - 1;
    }
    return r;
  }

  void enumerate(Mask p, Mask cur, int size, int lo, int hi, std::vector<Mask>& out) const {
    if (size >= lo) out.push_back(cur);
    if (size == hi) return;
    while (p) {
      int v = std::countr_zero(p);
      p &= p - 1;
      enumerate(p & ~nb_[v], cur | (Mask{1} << v), size + 1, lo, hi, out);
    }
  }

  // rest[j][x]: largest total of layers j+1..m-1 when layer j has x vertices.
  std::vector<std::vector<int>> rest_table(int a0) const {
    const int hi = alpha_h_ - a0;
    constexpr int kNeg = -1'000'000;
    std::vector<std::vector<int>> rest(m_, std::vector<int>(alpha_h_ + 1, kNeg));
    for (int x = a0; x <= hi; ++x) rest[m_ - 1][x] = 0;
    for (int j = m_ - 2; j >= 1; --j)
      for (int x = a0; x <= hi; ++x)
        for (int y = a0; y <= std::min(hi, alpha_h_ - x); ++y)
          if (rest[j + 1][y] > kNeg) rest[j][x] = std::max(rest[j][x], y + rest[j + 1][y]);
    return rest;
  }

  std::optional<std::vector<std::size_t>> search(int target) {
    std::vector<int> feasible_a0;
    for (int a0 = 0; 2 * a0 <= alpha_h_; ++a0) {
      auto rest = rest_table(a0);
      if (a0 + max_first(rest, a0) >= target) feasible_a0.push_back(a0);
    }
    if (feasible_a0.empty()) return std::nullopt;
    std::vector<Mask> sets;
    enumerate(all_, 0, 0, feasible_a0.front(), feasible_a0.back(), sets);
    for (Mask i0 : sets) {
      int a0 = std::popcount(i0);
      if (std::find(feasible_a0.begin(), feasible_a0.end(), a0) == feasible_a0.end()) continue;
      bool canonical = true;
      for (const auto& p : perms_)
        if (permute(p, i0) < i0) {
          canonical = false;
          break;
        }
      if (!canonical) continue;
      auto hit = extend(i0, target);
      if (aborted_) return std::nullopt;
      if (hit) return hit;
    }
    return std::nullopt;
  }

  int max_first(const std::vector<std::vector<int>>& rest, int a0) const {
    int best = -1'000'000;
    for (int x = a0; x <= alpha_h_ - a0; ++x) best = std::max(best, x + rest[1][x]);
    return best;
  }

  std::optional<std::vector<std::size_t>> extend(Mask i0, int target) {
    const int a0 = std::popcount(i0);
    const int hi = alpha_h_ - a0;
    const Mask n0 = closed(i0);
    auto rest = rest_table(a0);
    struct Entry {
      int value;
      Mask prev;
    };
    std::vector<std::unordered_map<Mask, Entry>> layer(m_);
    layer[0][i0] = {0, 0};
    std::vector<Mask> cand;
    for (int j = 1; j < m_; ++j) {
      for (const auto& [s, e] : layer[j - 1]) {
        Mask p = all_ & ~closed(s);
        if (j == m_ - 1) p &= ~n0;
        cand.clear();
        enumerate(p, 0, 0, a0, hi, cand);
        for (Mask t : cand) {
          if (work_ >= budget_) {
            aborted_ = true;
            return std::nullopt;
          }
          ++work_;
          int c = std::popcount(t);
          int v = e.value + c;
          if (a0 + v + rest[j][c] < target) continue;
          auto it = layer[j].find(t);
          if (it == layer[j].end())
            layer[j].emplace(t, Entry{v, s});
          else if (v > it->second.value)
            it->second = Entry{v, s};
        }
      }
      if (layer[j].empty()) return std::nullopt;
    }
    // Deterministic choice among final states: highest value, then smallest mask.
    Mask last = 0;
    int best = -1;
    for (const auto& [t, e] : layer[m_ - 1])
      if (e.value > best || (e.value == best && t < last)) {
        best = e.value;
        last = t;
      }
    if (a0 + best < target) return std::nullopt;
    std::vector<std::size_t> out;
    Mask cur = last;
    for (int j = m_ - 1; j >= 0; --j) {
      for (Mask s = cur; s; s &= s - 1)
        out.push_back(static_cast<std::size_t>(j) * h_ + std::countr_zero(s));
      if (j > 0) cur = layer[j].at(cur).prev;
    }
    return out;
  }

  int m_, h_;
  std::uint64_t budget_;
  Mask all_ = 0;
  std::vector<Mask> nb_;
  int alpha_h_ = 0;
  std::vector<std::vector<int>> perms_;
  std::uint64_t work_ = 0;
  bool aborted_ = false;
};

// Detect G = C_m ⊠ H (row-major, cycle outermost) with |H| <= 64.
inline std::optional<std::pair<std::size_t, Graph>> as_cycle_product(const Graph& g) {
  const std::size_t n = g.size();
  for (std::size_t hsize = 1; hsize <= 64 && hsize <= n; ++hsize) {
    if (n % hsize) continue;
    std::size_t m = n / hsize;
    if (m < 4) continue;
    std::vector<std::size_t> fiber(hsize);
    std::iota(fiber.begin(), fiber.end(), 0);
    Graph h = induced_subgraph(g, fiber);
    if (strong_product(cycle_graph(m), h) == g) return std::make_pair(m, std::move(h));
  }
  return std::nullopt;
}

}  // namespace detail

// Exact α(C_m ⊠ H) by the layered search; budget counts layer transitions.
inline IndependenceResult independence_number_cycle_product(std::size_t m, const Graph& h,
                                                            std::uint64_t budget = kUnlimited) {
  detail::CycleProductSearch search(m, h, budget);
  Graph g = strong_product(cycle_graph(m), h);
  detail::CliqueSearch quick(g, 2000);
  quick.seed(detail::greedy_independent_set(g));
  auto lower = quick.run();
  return search.run(lower.witness);
}

// α(G) with a witness. Budget counts search nodes; when it runs out the result
// is a valid lower bound with exact = false. Large graphs recognised as a cycle
// strong product are routed to the layered search.
inline IndependenceResult independence_number(const Graph& g, std::uint64_t budget = kUnlimited) {
  if (g.size() == 0) return {0, {}, true, 0};
  if (g.size() > 128) {
    if (auto cp = detail::as_cycle_product(g)) return independence_number_cycle_product(cp->first, cp->second, budget);
  }
  detail::CliqueSearch search(g, budget);
  search.seed(detail::greedy_independent_set(g));
  return search.run();
}

}  // namespace graphcap
