#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "code_check.hpp"
#include "dfa.hpp"
#include "graph.hpp"
#include "independence.hpp"

namespace graphcap {

struct BoundReport {
  std::string quantity;  // alpha_root | theta_rev_lower | theta_upper_from_rev
  double value = 0.0;
  std::optional<std::vector<Word>> witness_codewords;
  std::optional<PartialDFA> witness_dfa;
  std::size_t n = 0;
  std::string graph_id;
  std::uint64_t budget_used = 0;
  bool exact = true;
};

inline nlohmann::json dfa_to_json(const PartialDFA& m) {
  nlohmann::json t = nlohmann::json::array();
  for (std::size_t s = 0; s < m.d; ++s)
    for (std::size_t x = 0; x < m.k; ++x) {
      int to = m.next(s, Symbol(x));
      if (to != kUndefined) t.push_back({s, x, to});
    }
  std::vector<std::size_t> acc;
  for (std::size_t s = 0; s < m.d; ++s)
    if (m.accepting[s]) acc.push_back(s);
  return {{"states", m.d}, {"alphabet", m.k}, {"initial", m.initial}, {"accepting", acc}, {"transitions", t}};
}

inline nlohmann::json to_json(const BoundReport& r) {
  nlohmann::json j = {{"quantity", r.quantity}, {"value", r.value},     {"n", r.n},
                      {"graph", r.graph_id},    {"budget_used", r.budget_used}, {"exact", r.exact}};
  if (r.witness_codewords) {
    std::vector<std::string> words;
    for (const auto& w : *r.witness_codewords) words.push_back(format_word(w));
    j["witness_codewords"] = words;
  }
  if (r.witness_dfa) j["witness_dfa"] = dfa_to_json(*r.witness_dfa);
  return j;
}

// α(G^⊠n)^{1/n} with the maximum set decoded into length-n codewords.
inline BoundReport block_lower_bound(const Graph& g, std::size_t n, std::uint64_t budget = kUnlimited,
                                     const std::string& graph_id = "") {
  if (n == 0) throw std::invalid_argument("block_lower_bound: n must be >= 1");
  Graph p = strong_power(g, n);
  auto res = independence_number(p, budget);
  BoundReport r;
  r.quantity = "alpha_root";
  r.n = n;
  r.graph_id = graph_id;
  r.budget_used = res.work;
  r.exact = res.exact;
  r.value = res.size ? std::pow(double(res.size), 1.0 / double(n)) : 0.0;
  std::vector<Word> words;
  for (auto v : res.witness) {
    auto c = product_coords(v, g.size(), n);
    words.emplace_back(c.begin(), c.end());
  }
  r.witness_codewords = std::move(words);
  return r;
}

// Number of base-|G| digits used to index M codewords (at least one).
inline std::size_t index_digits(std::size_t graph_size, std::size_t m) {
  std::size_t digits = 1;
  std::size_t reach = graph_size;
  while (reach < m) {
    reach *= graph_size;
    ++digits;
  }
  return digits;
}

// Reversible machine for (w_m · index(m))*, where index(m) is m-1 written in
// base |G| with most significant digit first. Codewords are read through a
// trie; the index digits are read through states keyed by the digits still to
// come, so every state has one predecessor per symbol.
inline PartialDFA rewind_dfa(const Graph& g, const std::vector<Word>& codewords) {
  const std::size_t k = g.size();
  if (k < 2) throw std::invalid_argument("rewind_dfa: graph needs at least 2 vertices");
  if (codewords.empty()) throw std::invalid_argument("rewind_dfa: no codewords");
  const std::size_t n = codewords.front().size();
  if (n == 0) throw std::invalid_argument("rewind_dfa: empty codeword");
  for (const auto& w : codewords) {
    if (w.size() != n) throw std::invalid_argument("rewind_dfa: codewords have unequal lengths");
    for (Symbol x : w)
      if (x < 0 || std::size_t(x) >= k) throw std::invalid_argument("rewind_dfa: symbol out of range");
  }
  for (std::size_t a = 0; a < codewords.size(); ++a)
    for (std::size_t b = a + 1; b < codewords.size(); ++b) {
      bool conf = true;
      for (std::size_t i = 0; i < n && conf; ++i)
        conf = confusable(g, std::size_t(codewords[a][i]), std::size_t(codewords[b][i]));
      if (conf) throw std::invalid_argument("rewind_dfa: codewords " + std::to_string(a) + " and " +
                                            std::to_string(b) + " are confusable");
    }
  const std::size_t digits = index_digits(k, codewords.size());
  std::vector<std::vector<int>> table{std::vector<int>(k, kUndefined)};
  auto fresh = [&] {
    table.emplace_back(k, kUndefined);
    return int(table.size() - 1);
  };
  std::map<Word, int> pending{{Word{}, 0}};
  auto pending_state = [&](const Word& rest) {
    auto it = pending.find(rest);
    if (it != pending.end()) return it->second;
    int s = fresh();
    pending.emplace(rest, s);
    return s;
  };
  for (std::size_t m = 0; m < codewords.size(); ++m) {
    Word index(digits);
    for (std::size_t i = digits, v = m; i-- > 0; v /= k) index[i] = Symbol(v % k);
    int s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      int& t = table[std::size_t(s)][std::size_t(codewords[m][i])];
      if (t == kUndefined) t = fresh();
      s = t;
    }
    for (std::size_t i = 0; i < digits; ++i) {
      Word rest(index.begin() + std::ptrdiff_t(i) + 1, index.end());
      int t = pending_state(rest);
      table[std::size_t(s)][std::size_t(index[i])] = t;
      s = t;
    }
  }
  PartialDFA dfa(table.size(), k, 0);
  for (std::size_t s = 0; s < table.size(); ++s)
    for (std::size_t x = 0; x < k; ++x) dfa.set(s, Symbol(x), table[s][x]);
  dfa.accepting[0] = 1;
  return dfa;
}

inline double rev_lower_bound(double graph_size, double theta) {
  if (graph_size < 2) throw std::invalid_argument("rev_lower_bound: graph size must be >= 2");
  if (!(theta >= 1)) throw std::invalid_argument("rev_lower_bound: theta must be >= 1");
  const double lg = std::log(graph_size), lt = std::log(theta);
  return std::exp(lg * lt / (lg + lt));
}

inline double shannon_upper_from_rev(double theta_rev, double graph_size) {
  if (graph_size < 2) throw std::invalid_argument("shannon_upper_from_rev: graph size must be >= 2");
  if (!(theta_rev >= 1)) throw std::invalid_argument("shannon_upper_from_rev: theta_rev must be >= 1");
  if (!(theta_rev < graph_size))
    throw std::invalid_argument("shannon_upper_from_rev: theta_rev must be below the graph size");
  const double lg = std::log(graph_size), lt = std::log(theta_rev);
  return std::exp(lt * lg / (lg - lt));
}

// Smallest i with |G| + i >= |G|^{1 + log|G| / log(1+eps)}.
inline std::uint64_t required_join_size(std::size_t graph_size, double epsilon) {
  if (!(epsilon > 0)) throw std::invalid_argument("required_join_size: epsilon must be > 0");
  if (graph_size < 1) throw std::invalid_argument("required_join_size: graph size must be >= 1");
  const double g = double(graph_size);
  const double target = std::pow(g, 1.0 + std::log(g) / std::log1p(epsilon));
  if (!std::isfinite(target) || target > 9.0e18)
    throw std::overflow_error("required_join_size: bound exceeds the 64-bit range");
  const double need = std::ceil(target - g - 1e-9 * target);
  return need > 0 ? std::uint64_t(need) : 0;
}

// Relabels states in order of first appearance, scanning rows in state order
// and symbols in increasing order from the initial state. Unreachable states
// are dropped; the initial state becomes 0 and is the only accepting state.
inline PartialDFA canonical_form(const PartialDFA& m) {
  std::vector<int> label(m.d, -1);
  std::vector<std::size_t> order{m.initial};
  label[m.initial] = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t x = 0; x < m.k; ++x) {
      int t = m.next(order[i], Symbol(x));
      if (t == kUndefined || label[std::size_t(t)] != -1) continue;
      label[std::size_t(t)] = int(order.size());
      order.push_back(std::size_t(t));
    }
  PartialDFA c(order.size(), m.k, 0);
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t x = 0; x < m.k; ++x) {
      int t = m.next(order[i], Symbol(x));
      if (t != kUndefined) c.set(i, Symbol(x), label[std::size_t(t)]);
    }
  c.accepting[0] = 1;
  return c;
}

namespace detail {

// Depth-first enumeration of reversible partial machines in canonical form.
class ReversibleSearch {
 public:
  ReversibleSearch(const Graph& g, std::size_t d, std::uint64_t budget)
      : g_(g), d_(d), k_(g.size()), budget_(budget), table_(d * k_, kUndefined), column_(k_, 0) {}

  void run() {
    created_ = 1;
    descend(0);
  }

  // Offers a machine found by other means; kept only if it is a valid,
  // strongly connected, reversible machine within the state limit.
  void offer(const PartialDFA& m) {
    PartialDFA c = canonical_form(m);
    if (c.d > d_ || c.k != k_ || !is_reversible(c)) return;
    consider_machine(c);
  }

  std::optional<PartialDFA> best() const { return best_; }
  double best_growth() const { return best_growth_; }
  std::uint64_t nodes() const { return nodes_; }
  bool exhausted() const { return aborted_; }

 private:
  PartialDFA machine(std::size_t states) const {
    PartialDFA m(states, k_, 0);
    for (std::size_t s = 0; s < states; ++s)
      for (std::size_t x = 0; x < k_; ++x) m.set(s, Symbol(x), table_[s * k_ + x]);
    m.accepting[0] = 1;
    return m;
  }

  void consider(std::size_t states) { consider_machine(machine(states)); }

  void consider_machine(const PartialDFA& m) {
    if (m.transition_count() == 0) return;
    std::size_t ncomp = 0;
    strongly_connected_components(m.d, successor_lists(m), &ncomp);
    if (ncomp != 1) return;
    auto s = SimplifiedDFA::certify(m);
    if (!check_code_floodfill(g_, s).valid) return;
    double growth = growth_rate_simple(s);
    bool better = !best_ || growth > best_growth_ + 1e-12;
    if (!better && best_ && std::abs(growth - best_growth_) <= 1e-12) {
      auto key = [](const PartialDFA& a) {
        std::vector<long> v{long(a.d)};
        v.insert(v.end(), a.delta.begin(), a.delta.end());
        return v;
      };
      better = key(m) < key(*best_);
    }
    if (better) {
      best_ = m;
      best_growth_ = growth;
    }
  }

  void descend(std::size_t cell) {
    if (aborted_) return;
    if (nodes_ >= budget_) {
      aborted_ = true;
      return;
    }
    ++nodes_;
    const std::size_t s = cell / k_, x = cell % k_;
    if (s >= created_) {
      consider(created_);
      return;
    }
    // Options: a fresh state, existing states, or leave undefined.
    auto try_target = [&](int t) {
      std::uint64_t bit = std::uint64_t{1} << t;
      if (column_[x] & bit) return;
      table_[cell] = t;
      column_[x] |= bit;
      if (check_code_product(g_, machine(created_)).valid) descend(cell + 1);
      column_[x] &= ~bit;
      table_[cell] = kUndefined;
    };
    if (created_ < d_) {
      ++created_;
      try_target(int(created_ - 1));
      --created_;
    }
    for (std::size_t t = 0; t < created_ && !aborted_; ++t) try_target(int(t));
    if (!aborted_) descend(cell + 1);
  }

  const Graph& g_;
  std::size_t d_, k_;
  std::uint64_t budget_;
  std::vector<int> table_;
  std::vector<std::uint64_t> column_;
  std::size_t created_ = 1;
  std::uint64_t nodes_ = 0;
  bool aborted_ = false;
  std::optional<PartialDFA> best_;
  double best_growth_ = 0.0;
};

}  // namespace detail

// Best valid reversible machine with at most d states, by growth rate. The
// incumbent starts from block-code and rewind machines built on maximum
// independent sets of small strong powers; the enumeration then covers every
// canonical machine unless the budget runs out.
inline BoundReport search_reversible(const Graph& g, std::size_t d, std::uint64_t budget = kUnlimited,
                                     const std::string& graph_id = "") {
  if (d == 0) throw std::invalid_argument("search_reversible: d must be >= 1");
  if (d > 64) throw std::invalid_argument("search_reversible: d must be <= 64");
  detail::ReversibleSearch search(g, d, budget);
  if (g.size() >= 2) {
    std::size_t vertices = g.size();
    for (std::size_t n = 1; n <= d && vertices <= 1024; ++n, vertices *= g.size()) {
      auto res = independence_number(strong_power(g, n), 1000000);
      std::vector<Word> words;
      for (auto v : res.witness) {
        auto c = product_coords(v, g.size(), n);
        words.emplace_back(c.begin(), c.end());
      }
      if (words.empty()) continue;
      search.offer(block_code_dfa(words, g.size()));
      search.offer(rewind_dfa(g, words));
    }
  }
  search.run();
  BoundReport r;
  r.quantity = "theta_rev_lower";
  r.value = search.best() ? search.best_growth() : 0.0;
  r.witness_dfa = search.best();
  r.n = d;
  r.graph_id = graph_id;
  r.budget_used = search.nodes();
  r.exact = !search.exhausted();
  return r;
}

// Variable layout of the reversible-machine CNF.
struct CnfLayout {
  std::size_t graph_size = 0, states = 0;
  std::size_t transition(std::size_t s, std::size_t u, std::size_t t) const {
    return 1 + (s * graph_size + u) * states + t;
  }
  std::size_t transition_vars() const { return states * graph_size * states; }
  // Final(i,j) for i < j, upper triangle in row order.
  std::size_t final_pair(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    return 1 + transition_vars() + i * states - i * (i + 1) / 2 + (j - i - 1);
  }
  std::size_t final_vars() const { return states * (states - 1) / 2; }
  std::size_t total_vars() const { return transition_vars() + final_vars(); }
};

struct Cnf {
  std::size_t vars = 0;
  std::vector<std::string> comments;
  std::vector<std::vector<long>> clauses;
};

inline Cnf search_cnf(const Graph& g, std::size_t d) {
  if (d == 0) throw std::invalid_argument("export_search_cnf: d must be >= 1");
  const std::size_t k = g.size();
  CnfLayout L{k, d};
  Cnf cnf;
  cnf.vars = L.total_vars();
  auto x = [&](std::size_t s, std::size_t u, std::size_t t) { return long(L.transition(s, u, t)); };
  auto f = [&](std::size_t i, std::size_t j) { return long(L.final_pair(i, j)); };
  cnf.comments = {
      "graphcap reversible-dfa graph_size=" + std::to_string(k) + " states=" + std::to_string(d),
      "graphcap vars transitions=" + std::to_string(L.transition_vars()) + " final=" + std::to_string(L.final_vars()) +
          " total=" + std::to_string(L.total_vars()),
      "graphcap x(s,u,t) = 1 + (s*" + std::to_string(k) + " + u)*" + std::to_string(d) + " + t",
      "graphcap F(i,j) i<j = " + std::to_string(L.transition_vars() + 1) + " + i*" + std::to_string(d) +
          " - i*(i+1)/2 + (j-i-1)",
      "graphcap closure encoded as implications only; any closed superset of Final certifies validity",
      "graphcap initial=accepting=0; strong connectivity is not encoded"};
  auto& cl = cnf.clauses;
  for (std::size_t s = 0; s < d; ++s)
    for (std::size_t u = 0; u < k; ++u)
      for (std::size_t t = 0; t < d; ++t)
        for (std::size_t t2 = t + 1; t2 < d; ++t2) cl.push_back({-x(s, u, t), -x(s, u, t2)});
  for (std::size_t u = 0; u < k; ++u)
    for (std::size_t t = 0; t < d; ++t)
      for (std::size_t s = 0; s < d; ++s)
        for (std::size_t s2 = s + 1; s2 < d; ++s2) cl.push_back({-x(s, u, t), -x(s2, u, t)});
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j)
      for (std::size_t u = 0; u < k; ++u)
        for (std::size_t v = 0; v < k; ++v) {
          if (!confusable(g, u, v)) continue;
          for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) {
              if (a == b)
                cl.push_back({-x(i, u, a), -x(j, v, b), f(i, j)});
              else
                cl.push_back({-x(i, u, a), -x(j, v, b), -f(a, b), f(i, j)});
            }
        }
  for (std::size_t i = 0; i < d; ++i)
    for (auto [u, v] : g.edges())
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) {
          if (a == b)
            cl.push_back({-x(i, u, a), -x(i, v, b)});
          else
            cl.push_back({-x(i, u, a), -x(i, v, b), -f(a, b)});
        }
  return cnf;
}

inline void write_dimacs(std::ostream& os, const Cnf& cnf) {
  for (const auto& c : cnf.comments) os << "c " << c << '\n';
  os << "p cnf " << cnf.vars << ' ' << cnf.clauses.size() << '\n';
  for (const auto& c : cnf.clauses) {
    for (long lit : c) os << lit << ' ';
    os << "0\n";
  }
}

inline void export_search_cnf(std::ostream& os, const Graph& g, std::size_t d) { write_dimacs(os, search_cnf(g, d)); }

// Model as a truth vector indexed by variable (entry 0 unused) or parsed from
// solver output ("v 1 -2 ... 0" lines, or bare literals).
inline std::vector<char> parse_sat_model(std::istream& is, std::size_t vars) {
  std::vector<char> model(vars + 1, 0);
  std::string tok;
  while (is >> tok) {
    if (tok == "v" || tok == "s" || tok == "SAT" || tok == "SATISFIABLE") continue;
    long lit = 0;
    try {
      lit = std::stol(tok);
    } catch (const std::exception&) {
      continue;
    }
    if (lit == 0) continue;
    std::size_t var = std::size_t(lit > 0 ? lit : -lit);
    if (var > vars) throw std::invalid_argument("model literal " + tok + " exceeds variable count");
    model[var] = lit > 0;
  }
  return model;
}

inline PartialDFA decode_sat_model(const std::vector<char>& model, std::size_t graph_size, std::size_t d) {
  CnfLayout L{graph_size, d};
  if (model.size() < L.total_vars() + 1) throw std::invalid_argument("decode_sat_model: model too short");
  PartialDFA m(d, graph_size, 0);
  m.accepting[0] = 1;
  for (std::size_t s = 0; s < d; ++s)
    for (std::size_t u = 0; u < graph_size; ++u)
      for (std::size_t t = 0; t < d; ++t)
        if (model[L.transition(s, u, t)]) {
          if (m.next(s, Symbol(u)) != kUndefined)
            throw std::invalid_argument("decode_sat_model: two targets for one transition");
          m.set(s, Symbol(u), int(t));
        }
  return m;
}

}  // namespace graphcap
