#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace graphcap {

// Fixed-width bit row used for adjacency and candidate sets.
class BitRow {
 public:
  BitRow() = default;
  explicit BitRow(std::size_t nbits) : nbits_(nbits), w_((nbits + 63) / 64, 0) {}

  std::size_t size() const { return nbits_; }
  std::size_t words() const { return w_.size(); }
  std::uint64_t word(std::size_t i) const { return w_[i]; }
  std::uint64_t& word(std::size_t i) { return w_[i]; }

  bool test(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i) { w_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) { w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

  void fill() {
    std::fill(w_.begin(), w_.end(), ~std::uint64_t{0});
    trim();
  }
  void clear() { std::fill(w_.begin(), w_.end(), 0); }

  bool any() const {
    for (auto x : w_)
      if (x) return true;
    return false;
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto x : w_) c += static_cast<std::size_t>(std::popcount(x));
    return c;
  }
  // Index of the lowest set bit, or size() when empty.
  std::size_t first() const {
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i]) return i * 64 + static_cast<std::size_t>(std::countr_zero(w_[i]));
    return nbits_;
  }

  BitRow& operator&=(const BitRow& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
    return *this;
  }
  BitRow& operator|=(const BitRow& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
    return *this;
  }
  // this &= ~o
  BitRow& subtract(const BitRow& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= ~o.w_[i];
    return *this;
  }
  bool intersects(const BitRow& o) const {
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] & o.w_[i]) return true;
    return false;
  }
  bool operator==(const BitRow& o) const = default;

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < w_.size(); ++i) {
      std::uint64_t x = w_[i];
      while (x) {
        f(i * 64 + static_cast<std::size_t>(std::countr_zero(x)));
        x &= x - 1;
      }
    }
  }

 private:
  void trim() {
    if (nbits_ % 64 && !w_.empty()) w_.back() &= (std::uint64_t{1} << (nbits_ % 64)) - 1;
  }

  std::size_t nbits_ = 0;
  std::vector<std::uint64_t> w_;
};

// Undirected simple graph on vertices 0..n-1 stored as adjacency bit rows.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n) : n_(n), adj_(n, BitRow(n)) {}

  std::size_t size() const { return n_; }

  void add_edge(std::size_t u, std::size_t v) {
    check_vertex(u);
    check_vertex(v);
    if (u == v) throw std::invalid_argument("self-loop on vertex " + std::to_string(u));
    adj_[u].set(v);
    adj_[v].set(u);
  }

  bool has_edge(std::size_t u, std::size_t v) const {
    check_vertex(u);
    check_vertex(v);
    return adj_[u].test(v);
  }

  const BitRow& neighbors(std::size_t v) const { return adj_[v]; }

  std::size_t degree(std::size_t v) const { return adj_[v].count(); }

  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (const auto& r : adj_) twice += r.count();
    return twice / 2;
  }

  // Edges (u,v) with u < v in increasing order.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t u = 0; u < n_; ++u)
      adj_[u].for_each([&](std::size_t v) {
        if (u < v) out.emplace_back(u, v);
      });
    return out;
  }

  void check_vertex(std::size_t v) const {
    if (v >= n_)
      throw std::out_of_range("vertex " + std::to_string(v) + " out of range for graph of size " +
                              std::to_string(n_));
  }

  bool operator==(const Graph& o) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<BitRow> adj_;
};

inline bool confusable(const Graph& g, std::size_t u, std::size_t v) {
  g.check_vertex(u);
  g.check_vertex(v);
  return u == v || g.has_edge(u, v);
}

inline Graph cycle_graph(std::size_t n) {
  if (n < 3) throw std::invalid_argument("cycle_graph needs n >= 3, got " + std::to_string(n));
  Graph g(n);
  for (std::size_t i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

inline Graph complete_graph(std::size_t n) {
  Graph g(n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) g.add_edge(u, v);
  return g;
}

inline Graph empty_graph(std::size_t n) { return Graph(n); }

// Vertex (g,h) of the product has index g*|H| + h.
inline Graph strong_product(const Graph& g, const Graph& h) {
  const std::size_t gn = g.size(), hn = h.size();
  Graph p(gn * hn);
  for (std::size_t a = 0; a < gn; ++a)
    for (std::size_t b = 0; b < hn; ++b)
      for (std::size_t c = a; c < gn; ++c) {
        if (!confusable(g, a, c)) continue;
        for (std::size_t d = 0; d < hn; ++d) {
          if (c == a && d <= b) continue;
          if (confusable(h, b, d)) p.add_edge(a * hn + b, c * hn + d);
        }
      }
  return p;
}

inline Graph strong_power(const Graph& g, std::size_t k) {
  if (k == 0) return Graph(1);
  Graph p = g;
  for (std::size_t i = 1; i < k; ++i) p = strong_product(g, p);
  return p;
}

inline Graph disjoint_union(const Graph& g, const Graph& h) {
  Graph u(g.size() + h.size());
  for (auto [a, b] : g.edges()) u.add_edge(a, b);
  for (auto [a, b] : h.edges()) u.add_edge(g.size() + a, g.size() + b);
  return u;
}

inline Graph join(const Graph& g, const Graph& h) {
  Graph u = disjoint_union(g, h);
  for (std::size_t a = 0; a < g.size(); ++a)
    for (std::size_t b = 0; b < h.size(); ++b) u.add_edge(a, g.size() + b);
  return u;
}

inline Graph induced_subgraph(const Graph& g, const std::vector<std::size_t>& verts) {
  Graph s(verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i)
    for (std::size_t j = i + 1; j < verts.size(); ++j)
      if (g.has_edge(verts[i], verts[j])) s.add_edge(i, j);
  return s;
}

// Decode a product vertex index into per-factor coordinates, most significant first.
inline std::vector<std::size_t> product_coords(std::size_t index, std::size_t base, std::size_t k) {
  std::vector<std::size_t> c(k);
  for (std::size_t i = k; i-- > 0;) {
    c[i] = index % base;
    index /= base;
  }
  return c;
}

inline bool is_independent(const Graph& g, const std::vector<std::size_t>& set) {
  for (std::size_t i = 0; i < set.size(); ++i)
    for (std::size_t j = i + 1; j < set.size(); ++j)
      if (set[i] == set[j] || g.has_edge(set[i], set[j])) return false;
  return true;
}

inline void write_graph(std::ostream& os, const Graph& g) {
  os << "p " << g.size() << ' ' << g.edge_count() << '\n';
  for (auto [u, v] : g.edges()) os << "e " << u << ' ' << v << '\n';
}

inline Graph read_graph(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  std::size_t n = 0, m = 0, seen = 0;
  Graph g;
  auto fail = [&](const std::string& msg) {
    throw std::invalid_argument("graph line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag == "c") continue;
    if (tag == "p") {
      if (have_header) fail("duplicate header");
      if (!(ls >> n >> m)) fail("expected 'p <n> <m>'");
      g = Graph(n);
      have_header = true;
    } else if (tag == "e") {
      if (!have_header) fail("edge before header");
      long long u = -1, v = -1;
      if (!(ls >> u >> v) || u < 0 || v < 0) fail("expected 'e <u> <v>'");
      if (static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n) fail("vertex out of range");
      if (u == v) fail("self-loop");
      if (g.has_edge(u, v)) fail("duplicate edge");
      g.add_edge(u, v);
      ++seen;
    } else {
      fail("unknown record '" + tag + "'");
    }
  }
  if (!have_header) throw std::invalid_argument("graph: missing 'p' header");
  if (seen != m)
    throw std::invalid_argument("graph: header declares " + std::to_string(m) + " edges, found " +
                                std::to_string(seen));
  return g;
}

// Named graphs: c<N>, k<N>, e<N> (edgeless), prodpow:<name>:<k>.
inline Graph named_graph(const std::string& name) {
  auto number = [&](const std::string& s) -> std::size_t {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw std::invalid_argument("unknown graph name '" + name + "'");
    return std::stoul(s);
  };
  if (name.rfind("prodpow:", 0) == 0) {
    auto rest = name.substr(8);
    auto colon = rest.rfind(':');
    if (colon == std::string::npos) throw std::invalid_argument("expected prodpow:<name>:<k>");
    std::size_t k = number(rest.substr(colon + 1));
    if (k == 0) throw std::invalid_argument("prodpow power must be >= 1");
    return strong_power(named_graph(rest.substr(0, colon)), k);
  }
  if (name.size() >= 2 && name[0] == 'c') return cycle_graph(number(name.substr(1)));
  if (name.size() >= 2 && name[0] == 'k') return complete_graph(number(name.substr(1)));
  if (name.size() >= 2 && name[0] == 'e') return empty_graph(number(name.substr(1)));
  throw std::invalid_argument("unknown graph name '" + name + "'");
}

}  // namespace graphcap
