#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace graphcap {

using Symbol = int;
using Word = std::vector<Symbol>;

inline constexpr int kUndefined = -1;

// Deterministic automaton whose transition function may be undefined. An
// undefined transition rejects immediately.
struct PartialDFA {
  std::size_t d = 0;  // states 0..d-1
  std::size_t k = 0;  // symbols 0..k-1
  std::vector<int> delta;  // row-major d x k, kUndefined where missing
  std::size_t initial = 0;
  std::vector<char> accepting;

  PartialDFA() = default;
  PartialDFA(std::size_t states, std::size_t symbols, std::size_t init = 0)
      : d(states), k(symbols), delta(states * symbols, kUndefined), initial(init), accepting(states, 0) {}

  int next(std::size_t s, Symbol x) const { return delta[s * k + static_cast<std::size_t>(x)]; }
  void set(std::size_t s, Symbol x, int t) { delta[s * k + static_cast<std::size_t>(x)] = t; }

  bool accepts(const Word& w) const {
    long s = static_cast<long>(initial);
    for (Symbol x : w) {
      if (x < 0 || static_cast<std::size_t>(x) >= k) return false;
      s = next(static_cast<std::size_t>(s), x);
      if (s == kUndefined) return false;
    }
    return accepting[static_cast<std::size_t>(s)];
  }

  std::size_t transition_count() const {
    return static_cast<std::size_t>(std::count_if(delta.begin(), delta.end(), [](int t) { return t != kUndefined; }));
  }

  void validate() const {
    if (d == 0) throw std::invalid_argument("DFA needs at least one state");
    if (delta.size() != d * k) throw std::invalid_argument("DFA transition table has wrong size");
    if (initial >= d) throw std::invalid_argument("DFA initial state out of range");
    if (accepting.size() != d) throw std::invalid_argument("DFA accepting vector has wrong size");
    for (int t : delta)
      if (t != kUndefined && (t < 0 || static_cast<std::size_t>(t) >= d))
        throw std::invalid_argument("DFA transition targets state " + std::to_string(t) + " out of range");
  }

  bool operator==(const PartialDFA&) const = default;
};

// R[s][s'] = number of symbols carrying s to s'.
struct ReducedMatrix {
  std::size_t d = 0;
  std::vector<std::int64_t> entries;

  std::int64_t operator()(std::size_t s, std::size_t t) const { return entries[s * d + t]; }
  Eigen::MatrixXd dense() const {
    Eigen::MatrixXd m(d, d);
    for (std::size_t s = 0; s < d; ++s)
      for (std::size_t t = 0; t < d; ++t) m(s, t) = static_cast<double>(entries[s * d + t]);
    return m;
  }
};

inline ReducedMatrix reduced_matrix(const PartialDFA& dfa) {
  ReducedMatrix r{dfa.d, std::vector<std::int64_t>(dfa.d * dfa.d, 0)};
  for (std::size_t s = 0; s < dfa.d; ++s)
    for (std::size_t x = 0; x < dfa.k; ++x) {
      int t = dfa.next(s, static_cast<Symbol>(x));
      if (t != kUndefined) ++r.entries[s * dfa.d + static_cast<std::size_t>(t)];
    }
  return r;
}

// Strongly connected components (iterative Tarjan). comp[v] is the component
// id; ids are assigned in reverse topological order.
inline std::vector<int> strongly_connected_components(std::size_t n,
                                                      const std::vector<std::vector<std::size_t>>& succ,
                                                      std::size_t* count = nullptr) {
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<std::size_t> stack;
  std::vector<char> on_stack(n, 0);
  int next_index = 0, next_comp = 0;
  struct Frame {
    std::size_t v, edge;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& f = call.back();
      if (f.edge < succ[f.v].size()) {
        std::size_t w = succ[f.v][f.edge++];
        if (index[w] == -1) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        std::size_t v = f.v;
        if (low[v] == index[v]) {
          std::size_t w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp[w] = next_comp;
          } while (w != v);
          ++next_comp;
        }
        call.pop_back();
        if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      }
    }
  }
  if (count) *count = static_cast<std::size_t>(next_comp);
  return comp;
}

inline std::vector<std::vector<std::size_t>> successor_lists(const PartialDFA& dfa) {
  std::vector<std::vector<std::size_t>> succ(dfa.d);
  for (std::size_t s = 0; s < dfa.d; ++s)
    for (std::size_t x = 0; x < dfa.k; ++x) {
      int t = dfa.next(s, static_cast<Symbol>(x));
      if (t != kUndefined) succ[s].push_back(static_cast<std::size_t>(t));
    }
  return succ;
}

inline std::vector<char> reachable_from(const PartialDFA& dfa, std::size_t start) {
  std::vector<char> seen(dfa.d, 0);
  std::vector<std::size_t> queue{start};
  seen[start] = 1;
  for (std::size_t i = 0; i < queue.size(); ++i)
    for (std::size_t x = 0; x < dfa.k; ++x) {
      int t = dfa.next(queue[i], static_cast<Symbol>(x));
      if (t != kUndefined && !seen[static_cast<std::size_t>(t)]) {
        seen[static_cast<std::size_t>(t)] = 1;
        queue.push_back(static_cast<std::size_t>(t));
      }
    }
  return seen;
}

inline std::vector<char> coreachable(const PartialDFA& dfa) {
  std::vector<std::vector<std::size_t>> pred(dfa.d);
  for (std::size_t s = 0; s < dfa.d; ++s)
    for (std::size_t x = 0; x < dfa.k; ++x) {
      int t = dfa.next(s, static_cast<Symbol>(x));
      if (t != kUndefined) pred[static_cast<std::size_t>(t)].push_back(s);
    }
  std::vector<char> seen(dfa.d, 0);
  std::vector<std::size_t> queue;
  for (std::size_t s = 0; s < dfa.d; ++s)
    if (dfa.accepting[s]) {
      seen[s] = 1;
      queue.push_back(s);
    }
  for (std::size_t i = 0; i < queue.size(); ++i)
    for (std::size_t p : pred[queue[i]])
      if (!seen[p]) {
        seen[p] = 1;
        queue.push_back(p);
      }
  return seen;
}

namespace detail {

inline constexpr std::size_t kDenseLimit = 512;

// Perron root of a nonnegative matrix. Dense eigenvalues up to kDenseLimit,
// otherwise power iteration on A + I.
inline double perron_root(const Eigen::MatrixXd& a) {
  const auto n = a.rows();
  if (n == 0) return 0.0;
  if (n == 1) return a(0, 0);
  if (static_cast<std::size_t>(n) <= kDenseLimit) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
    double best = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) best = std::max(best, es.eigenvalues()[i].real());
    return best;
  }
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n) / static_cast<double>(n);
  double prev = 0.0;
  for (int it = 0; it < 1'000'000; ++it) {
    Eigen::VectorXd y = a * x + x;
    double norm = y.lpNorm<1>();
    if (norm == 0.0) return 0.0;
    x = y / norm;
    double est = norm - 1.0;
    if (it > 0 && std::abs(est - prev) <= 1e-12 * std::max(1.0, est)) return est;
    prev = est;
  }
  return prev;
}

}  // namespace detail

// Growth rate of L(dfa): the Perron root of R restricted to states that are
// reachable from the initial state and can reach an accepting state. It is
// evaluated component by component, so equal dominant roots in chained
// components do not degrade accuracy.
inline double growth_rate(const PartialDFA& dfa) {
  dfa.validate();
  auto fwd = reachable_from(dfa, dfa.initial);
  auto bwd = coreachable(dfa);
  std::vector<std::size_t> keep;
  std::vector<long> pos(dfa.d, -1);
  for (std::size_t s = 0; s < dfa.d; ++s)
    if (fwd[s] && bwd[s]) {
      pos[s] = static_cast<long>(keep.size());
      keep.push_back(s);
    }
  if (keep.empty()) return 0.0;
  std::vector<std::vector<std::size_t>> succ(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i)
    for (std::size_t x = 0; x < dfa.k; ++x) {
      int t = dfa.next(keep[i], static_cast<Symbol>(x));
      if (t != kUndefined && pos[static_cast<std::size_t>(t)] >= 0)
        succ[i].push_back(static_cast<std::size_t>(pos[static_cast<std::size_t>(t)]));
    }
  std::size_t ncomp = 0;
  auto comp = strongly_connected_components(keep.size(), succ, &ncomp);
  std::vector<std::vector<std::size_t>> members(ncomp);
  for (std::size_t i = 0; i < keep.size(); ++i) members[static_cast<std::size_t>(comp[i])].push_back(i);
  double best = 0.0;
  for (const auto& m : members) {
    std::vector<long> local(keep.size(), -1);
    for (std::size_t j = 0; j < m.size(); ++j) local[m[j]] = static_cast<long>(j);
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(m.size()));
    bool any = false;
    for (std::size_t j = 0; j < m.size(); ++j)
      for (std::size_t t : succ[m[j]])
        if (local[t] >= 0) {
          block(static_cast<Eigen::Index>(j), local[t]) += 1.0;
          any = true;
        }
    if (any) best = std::max(best, detail::perron_root(block));
  }
  return best;
}

// Machine satisfying the simplified-form invariants: the defined-transition
// graph is strongly connected and the single accepting state is the initial one.
struct SimplifiedDFA {
  PartialDFA dfa;
  bool single_component = true;
  bool absorbing_removed = true;

  static SimplifiedDFA certify(PartialDFA m) {
    m.validate();
    std::size_t accepting = 0;
    for (std::size_t s = 0; s < m.d; ++s) accepting += m.accepting[s] ? 1 : 0;
    if (accepting != 1 || !m.accepting[m.initial])
      throw std::invalid_argument("simplified DFA needs exactly one accepting state equal to the initial state");
    std::size_t ncomp = 0;
    strongly_connected_components(m.d, successor_lists(m), &ncomp);
    if (ncomp != 1) throw std::invalid_argument("simplified DFA must be strongly connected");
    return SimplifiedDFA{std::move(m), true, true};
  }
};

// Perron root of the full reduced matrix of a simplified machine.
inline double growth_rate_simple(const SimplifiedDFA& s) {
  auto checked = SimplifiedDFA::certify(s.dfa);
  return detail::perron_root(reduced_matrix(checked.dfa).dense());
}

// Restrict to one strongly connected component whose Perron root reaches the
// target (lowest-numbered state wins ties), drop every transition leaving it,
// and make its lowest state both initial and accepting.
inline SimplifiedDFA simplify(const PartialDFA& dfa, std::optional<double> target_growth = std::nullopt) {
  const double g = growth_rate(dfa);
  if (g < 0.5) throw std::invalid_argument("simplify: language has zero growth rate");
  const double target = target_growth.value_or(g);
  if (target > g + 1e-9) throw std::invalid_argument("simplify: target growth exceeds the machine's growth rate");

  auto fwd = reachable_from(dfa, dfa.initial);
  auto bwd = coreachable(dfa);
  auto succ = successor_lists(dfa);
  std::vector<std::vector<std::size_t>> trimmed(dfa.d);
  for (std::size_t s = 0; s < dfa.d; ++s)
    if (fwd[s] && bwd[s])
      for (std::size_t t : succ[s])
        if (fwd[t] && bwd[t]) trimmed[s].push_back(t);
  std::size_t ncomp = 0;
  auto comp = strongly_connected_components(dfa.d, trimmed, &ncomp);

  std::vector<std::vector<std::size_t>> members(ncomp);
  for (std::size_t s = 0; s < dfa.d; ++s)
    if (fwd[s] && bwd[s]) members[static_cast<std::size_t>(comp[s])].push_back(s);

  std::optional<std::vector<std::size_t>> chosen;
  for (const auto& m : members) {
    if (m.empty()) continue;
    PartialDFA sub(m.size(), dfa.k, 0);
    std::vector<long> local(dfa.d, -1);
    for (std::size_t j = 0; j < m.size(); ++j) local[m[j]] = static_cast<long>(j);
    for (std::size_t j = 0; j < m.size(); ++j)
      for (std::size_t x = 0; x < dfa.k; ++x) {
        int t = dfa.next(m[j], static_cast<Symbol>(x));
        if (t != kUndefined && local[static_cast<std::size_t>(t)] >= 0)
          sub.set(j, static_cast<Symbol>(x), static_cast<int>(local[static_cast<std::size_t>(t)]));
      }
    double rho = detail::perron_root(reduced_matrix(sub).dense());
    if (rho + 1e-9 >= target && rho > 0.5 && (!chosen || m.front() < chosen->front())) chosen = m;
  }
  if (!chosen) throw std::invalid_argument("simplify: no component reaches the target growth");

  const auto& m = *chosen;
  PartialDFA out(m.size(), dfa.k, 0);
  std::vector<long> local(dfa.d, -1);
  for (std::size_t j = 0; j < m.size(); ++j) local[m[j]] = static_cast<long>(j);
  for (std::size_t j = 0; j < m.size(); ++j)
    for (std::size_t x = 0; x < dfa.k; ++x) {
      int t = dfa.next(m[j], static_cast<Symbol>(x));
      if (t != kUndefined && local[static_cast<std::size_t>(t)] >= 0)
        out.set(j, static_cast<Symbol>(x), static_cast<int>(local[static_cast<std::size_t>(t)]));
    }
  out.accepting[0] = 1;
  return SimplifiedDFA::certify(std::move(out));
}

// Column sums of every T_x are at most 1.
inline bool is_reversible(const PartialDFA& dfa) {
  for (std::size_t x = 0; x < dfa.k; ++x) {
    std::vector<char> hit(dfa.d, 0);
    for (std::size_t s = 0; s < dfa.d; ++s) {
      int t = dfa.next(s, static_cast<Symbol>(x));
      if (t == kUndefined) continue;
      if (hit[static_cast<std::size_t>(t)]) return false;
      hit[static_cast<std::size_t>(t)] = 1;
    }
  }
  return true;
}

// Trie over the codewords whose word ends loop back to the root; accepts
// exactly (codewords)*.
inline PartialDFA block_code_dfa(const std::vector<Word>& codewords, std::size_t k) {
  if (codewords.empty()) throw std::invalid_argument("block_code_dfa: no codewords");
  const std::size_t n = codewords.front().size();
  if (n == 0) throw std::invalid_argument("block_code_dfa: empty codeword");
  std::vector<std::vector<int>> table{std::vector<int>(k, kUndefined)};
  for (const auto& w : codewords) {
    if (w.size() != n) throw std::invalid_argument("block_code_dfa: codewords have unequal lengths");
    std::size_t s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (w[i] < 0 || static_cast<std::size_t>(w[i]) >= k)
        throw std::invalid_argument("block_code_dfa: symbol " + std::to_string(w[i]) + " out of range");
      int& t = table[s][static_cast<std::size_t>(w[i])];
      if (i + 1 == n) {
        if (t != kUndefined) throw std::invalid_argument("block_code_dfa: duplicate codeword");
        t = 0;
      } else {
        if (t == kUndefined) {
          t = static_cast<int>(table.size());
          table.emplace_back(k, kUndefined);
        }
        s = static_cast<std::size_t>(t);
      }
    }
  }
  PartialDFA dfa(table.size(), k, 0);
  for (std::size_t s = 0; s < table.size(); ++s)
    for (std::size_t x = 0; x < k; ++x) dfa.set(s, static_cast<Symbol>(x), table[s][x]);
  dfa.accepting[0] = 1;
  return dfa;
}

// Number of accepted words of each length 0..n, by dynamic programming over states.
inline std::vector<double> word_counts(const PartialDFA& dfa, std::size_t n) {
  std::vector<double> cur(dfa.d, 0.0), out;
  cur[dfa.initial] = 1.0;
  for (std::size_t len = 0;; ++len) {
    double total = 0.0;
    for (std::size_t s = 0; s < dfa.d; ++s)
      if (dfa.accepting[s]) total += cur[s];
    out.push_back(total);
    if (len == n) break;
    std::vector<double> nxt(dfa.d, 0.0);
    for (std::size_t s = 0; s < dfa.d; ++s)
      if (cur[s] != 0.0)
        for (std::size_t x = 0; x < dfa.k; ++x) {
          int t = dfa.next(s, static_cast<Symbol>(x));
          if (t != kUndefined) nxt[static_cast<std::size_t>(t)] += cur[s];
        }
    cur.swap(nxt);
  }
  return out;
}

// Digits "0012" for alphabets up to 10 symbols, otherwise comma separated "10,3".
inline Word parse_word(const std::string& text) {
  Word w;
  if (text.find(',') != std::string::npos) {
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) w.push_back(std::stoi(tok));
    return w;
  }
  for (char c : text) {
    if (c < '0' || c > '9') throw std::invalid_argument("bad symbol '" + std::string(1, c) + "' in word");
    w.push_back(c - '0');
  }
  return w;
}

inline std::string format_word(const Word& w) {
  bool wide = std::any_of(w.begin(), w.end(), [](Symbol x) { return x > 9; });
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (wide && i) s += ',';
    s += std::to_string(w[i]);
  }
  return s;
}

inline void write_dfa(std::ostream& os, const PartialDFA& dfa) {
  os << "dfa " << dfa.d << ' ' << dfa.k << '\n';
  os << "init " << dfa.initial << '\n';
  os << "accept";
  for (std::size_t s = 0; s < dfa.d; ++s)
    if (dfa.accepting[s]) os << ' ' << s;
  os << '\n';
  for (std::size_t s = 0; s < dfa.d; ++s)
    for (std::size_t x = 0; x < dfa.k; ++x) {
      int t = dfa.next(s, static_cast<Symbol>(x));
      if (t != kUndefined) os << "t " << s << ' ' << x << ' ' << t << '\n';
    }
}

inline PartialDFA read_dfa(std::istream& is) {
  PartialDFA dfa;
  bool header = false;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw std::invalid_argument("dfa line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "dfa") {
      std::size_t d = 0, k = 0;
      if (header) fail("duplicate header");
      if (!(ls >> d >> k) || d == 0) fail("expected 'dfa <d> <k>' with d >= 1");
      dfa = PartialDFA(d, k, 0);
      header = true;
      continue;
    }
    if (!header) fail("record before 'dfa' header");
    if (tag == "init") {
      long s = -1;
      if (!(ls >> s) || s < 0 || static_cast<std::size_t>(s) >= dfa.d) fail("bad initial state");
      dfa.initial = static_cast<std::size_t>(s);
    } else if (tag == "accept") {
      long s;
      while (ls >> s) {
        if (s < 0 || static_cast<std::size_t>(s) >= dfa.d) fail("accepting state out of range");
        dfa.accepting[static_cast<std::size_t>(s)] = 1;
      }
      if (!ls.eof()) fail("bad accepting state list");
    } else if (tag == "t") {
      long s = -1, x = -1, t = -1;
      if (!(ls >> s >> x >> t)) fail("expected 't <s> <x> <s2>'");
      if (s < 0 || static_cast<std::size_t>(s) >= dfa.d || t < 0 || static_cast<std::size_t>(t) >= dfa.d)
        fail("state out of range");
      if (x < 0 || static_cast<std::size_t>(x) >= dfa.k) fail("symbol out of range");
      if (dfa.next(static_cast<std::size_t>(s), static_cast<Symbol>(x)) != kUndefined) fail("duplicate transition");
      dfa.set(static_cast<std::size_t>(s), static_cast<Symbol>(x), static_cast<int>(t));
    } else {
      fail("unknown record '" + tag + "'");
    }
  }
  if (!header) throw std::invalid_argument("dfa: missing header");
  return dfa;
}

}  // namespace graphcap
