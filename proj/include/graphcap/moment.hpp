#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "ncpoly.hpp"
#include "npo.hpp"

namespace graphcap {

struct RewriteRule {
  NCMonomial lhs;
  NCPolynomial rhs;
};

// Rules derived from the problem's hints. Commuting letters are put in
// increasing variable-index order and the swap S is moved to the front.
inline std::vector<RewriteRule> rewrite_rules(const NCProblem& p) {
  using K = RewriteHint::Kind;
  std::vector<RewriteRule> rules;
  auto letters = [&](std::size_t v) {
    std::vector<Letter> out{p.letter(v)};
    if (!p.variables[v].hermitian) out.push_back(p.letter(v, true));
    return out;
  };
  auto word = [](std::initializer_list<Letter> ls) { return NCMonomial{std::vector<Letter>(ls)}; };
  for (const auto& h : p.hints) {
    const auto& v = h.vars;
    switch (h.kind) {
      case K::involution:
        rules.push_back({word({p.letter(v[0]), p.letter(v[0])}), NCPolynomial(1)});
        break;
      case K::idempotent:
        rules.push_back({word({p.letter(v[0]), p.letter(v[0])}), p.var(v[0])});
        break;
      case K::commute: {
        std::size_t lo = std::min(v[0], v[1]), hi = std::max(v[0], v[1]);
        for (Letter x : letters(lo))
          for (Letter y : letters(hi)) rules.push_back({word({y, x}), NCPolynomial(word({x, y}))});
        break;
      }
      case K::intertwine: {
        Letter s = p.letter(v[0]);
        auto a = letters(v[1]), b = letters(v[2]);
        for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
          rules.push_back({word({a[i], s}), NCPolynomial(word({s, b[i]}))});
          rules.push_back({word({b[i], s}), NCPolynomial(word({s, a[i]}))});
        }
        break;
      }
      case K::expand:
        rules.push_back({word({p.letter(v[0])}), p.var(v[1]) * p.var(v[2])});
        if (!p.variables[v[0]].hermitian)
          rules.push_back({word({p.letter(v[0], true)}), p.var(v[2], true) * p.var(v[1], true)});
        break;
      case K::expand_part: {
        auto full = [&](std::size_t hpart, std::size_t apart) {
          NCPolynomial x = p.var(hpart);
          if (apart != kNoVariable) x += p.var(apart) * CRational::i();
          return x;
        };
        NCPolynomial prod = full(v[1], v[2]) * full(v[3], v[4]);
        rules.push_back({word({p.letter(v[0])}), h.part == 0 ? prod.hermitian_part() : prod.antihermitian_part()});
        break;
      }
    }
  }
  return rules;
}

class Reducer {
 public:
  explicit Reducer(std::vector<RewriteRule> rules) : rules_(std::move(rules)) {}

  const std::vector<RewriteRule>& rules() const { return rules_; }

  struct Match {
    std::size_t pos = 0, rule = 0;
  };

  std::vector<Match> matches(const NCMonomial& m) const {
    std::vector<Match> out;
    for (std::size_t i = 0; i < m.word.size(); ++i)
      for (std::size_t r = 0; r < rules_.size(); ++r)
        if (matches_at(m, i, rules_[r].lhs)) out.push_back({i, r});
    return out;
  }

  NCPolynomial apply(const NCMonomial& m, Match at) const {
    const auto& lhs = rules_[at.rule].lhs.word;
    NCMonomial pre{{m.word.begin(), m.word.begin() + std::ptrdiff_t(at.pos)}};
    NCMonomial post{{m.word.begin() + std::ptrdiff_t(at.pos + lhs.size()), m.word.end()}};
    return NCPolynomial(pre) * rules_[at.rule].rhs * NCPolynomial(post);
  }

  bool irreducible(const NCMonomial& m) const {
    for (std::size_t i = 0; i < m.word.size(); ++i)
      for (const auto& r : rules_)
        if (matches_at(m, i, r.lhs)) return false;
    return true;
  }

  // Leftmost position, first rule, repeated to a normal form.
  NCPolynomial reduce(const NCMonomial& m) const {
    if (auto it = cache_.find(m); it != cache_.end()) return it->second;
    NCPolynomial out;
    if (auto first = first_match(m)) {
      NCPolynomial step = apply(m, *first);
      if (++depth_ > kDepthLimit) throw std::logic_error("rewrite system does not terminate");
      for (const auto& [w, c] : step.terms()) out += reduce(w) * c;
      --depth_;
    } else {
      out = NCPolynomial(m);
    }
    cache_.emplace(m, out);
    return out;
  }

  NCPolynomial reduce(const NCPolynomial& p) const {
    NCPolynomial out;
    for (const auto& [m, c] : p.terms()) out += reduce(m) * c;
    return out;
  }

 private:
  static constexpr int kDepthLimit = 10000;
  std::vector<RewriteRule> rules_;
  mutable std::map<NCMonomial, NCPolynomial> cache_;
  mutable int depth_ = 0;

  static bool matches_at(const NCMonomial& m, std::size_t i, const NCMonomial& lhs) {
    if (i + lhs.word.size() > m.word.size()) return false;
    return std::equal(lhs.word.begin(), lhs.word.end(), m.word.begin() + std::ptrdiff_t(i));
  }

  std::optional<Match> first_match(const NCMonomial& m) const {
    for (std::size_t i = 0; i < m.word.size(); ++i)
      for (std::size_t r = 0; r < rules_.size(); ++r)
        if (matches_at(m, i, rules_[r].lhs)) return Match{i, r};
    return std::nullopt;
  }
};

// Linear functional on moments: moment index -> coefficient.
using LinForm = std::map<std::size_t, CRational>;

struct MomentBlock {
  std::string label;
  std::vector<NCMonomial> rows;
  std::vector<LinForm> entries;  // row-major, rows.size() squared

  std::size_t size() const { return rows.size(); }
  const LinForm& at(std::size_t i, std::size_t j) const { return entries[i * rows.size() + j]; }
};

struct MomentSDP {
  int level = 1;
  std::vector<std::string> names;
  std::vector<NCMonomial> basis;
  std::vector<NCMonomial> moments;      // moments[0] is the identity
  std::vector<std::size_t> adjoint_of;  // y[adjoint_of[i]] = conj(y[i])
  std::vector<MomentBlock> blocks;      // blocks[0] is the moment block
  std::vector<LinForm> equalities;      // each form = 0
  std::vector<std::string> equality_labels;
  LinForm objective;
  std::size_t normalization = 0;
  std::vector<std::string> warnings;
  double shift = 0;
};

namespace detail {

using FormKey = std::vector<std::tuple<std::size_t, std::int64_t, std::int64_t, std::int64_t, std::int64_t>>;

inline FormKey form_key(const LinForm& f) {
  FormKey k;
  for (const auto& [i, c] : f) k.emplace_back(i, c.re.num(), c.re.den(), c.im.num(), c.im.den());
  return k;
}

class MomentIndex {
 public:
  MomentIndex(MomentSDP& sdp, const Reducer& red) : sdp_(sdp), red_(red) { id(NCMonomial{}); }

  std::size_t id(const NCMonomial& m) {
    if (auto it = index_.find(m); it != index_.end()) return it->second;
    NCMonomial adj = reduced_adjoint(m);
    std::size_t i = push(m);
    if (adj == m) return i;
    if (!(reduced_adjoint(adj) == m))
      throw std::logic_error("moment adjoint pairing is not an involution: " + to_string(m, sdp_.names) + " / " +
                             to_string(adj, sdp_.names) + " / " + to_string(reduced_adjoint(adj), sdp_.names));
    if (index_.count(adj)) throw std::logic_error("moment adjoint pairing is inconsistent");
    std::size_t j = push(adj);
    sdp_.adjoint_of[i] = j;
    sdp_.adjoint_of[j] = i;
    return i;
  }

  LinForm form(const NCPolynomial& p) {
    LinForm f;
    const NCPolynomial reduced = red_.reduce(p);
    for (const auto& [m, c] : reduced.terms()) {
      auto& slot = f[id(m)];
      slot = slot + c;
    }
    std::erase_if(f, [](const auto& kv) { return kv.second.is_zero(); });
    return f;
  }

 private:
  MomentSDP& sdp_;
  const Reducer& red_;
  std::map<NCMonomial, std::size_t> index_;

  std::size_t push(const NCMonomial& m) {
    std::size_t i = sdp_.moments.size();
    index_.emplace(m, i);
    sdp_.moments.push_back(m);
    sdp_.adjoint_of.push_back(i);
    return i;
  }

  NCMonomial reduced_adjoint(const NCMonomial& m) const {
    NCPolynomial adj = red_.reduce(m.adjoint());
    if (adj.size() != 1 || !(adj.terms().begin()->second == CRational(1)))
      throw std::logic_error("adjoint of a reduced monomial does not reduce to a monomial");
    return adj.terms().begin()->first;
  }
};

}  // namespace detail

// Irreducible words of degree at most `level`, in monomial order.
inline std::vector<NCMonomial> reduced_basis(const NCProblem& p, const Reducer& red, int level) {
  std::vector<NCMonomial> out{NCMonomial{}}, frontier{NCMonomial{}};
  for (int deg = 1; deg <= level; ++deg) {
    std::vector<NCMonomial> next;
    for (const auto& w : frontier)
      for (std::size_t v = 0; v < p.variables.size(); ++v)
        for (bool adj : {false, true}) {
          if (adj && p.variables[v].hermitian) continue;
          NCMonomial x = w;
          x.word.push_back(p.letter(v, adj));
          if (red.irreducible(x)) next.push_back(x);
        }
    std::sort(next.begin(), next.end());
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

inline MomentSDP npa_moment_matrix(const NCProblem& p, int level) {
  if (level < 1) throw std::invalid_argument("relaxation level must be at least 1");
  if (!p.hermitian_only()) throw std::invalid_argument("moment relaxation needs a hermitian-only problem");
  p.validate();
  MomentSDP sdp;
  sdp.level = level;
  sdp.names = p.names();
  sdp.shift = p.shift;
  Reducer red(rewrite_rules(p));
  detail::MomentIndex index(sdp, red);
  sdp.basis = reduced_basis(p, red, level);
  const std::size_t top = std::size_t(2 * level);

  auto block = [&](const std::string& label, const std::vector<NCMonomial>& rows, const NCPolynomial& mid) {
    MomentBlock b{label, rows, {}};
    b.entries.reserve(rows.size() * rows.size());
    for (const auto& u : rows)
      for (const auto& v : rows) b.entries.push_back(index.form(NCPolynomial(u.adjoint()) * mid * NCPolynomial(v)));
    return b;
  };
  sdp.blocks.push_back(block("moment", sdp.basis, NCPolynomial(1)));

  std::set<detail::FormKey> seen;
  for (const auto& c : p.equalities) {
    NCPolynomial q = red.reduce(c.poly);
    if (q.is_zero()) continue;
    if (q.degree() > top) {
      sdp.warnings.push_back("equality " + c.group + " " + c.label + " has degree " + std::to_string(q.degree()) +
                             " > " + std::to_string(top) + "; skipped");
      continue;
    }
    for (const auto& u : sdp.basis)
      for (const auto& v : sdp.basis) {
        if (u.degree() + v.degree() + q.degree() > top) continue;
        LinForm f = index.form(NCPolynomial(u.adjoint()) * q * NCPolynomial(v));
        if (f.empty() || !seen.insert(detail::form_key(f)).second) continue;
        sdp.equalities.push_back(std::move(f));
        sdp.equality_labels.push_back(c.group + " " + c.label);
      }
  }

  for (const auto& c : p.psd) {
    NCPolynomial r = red.reduce(c.poly);
    int sub = level - int((r.degree() + 1) / 2);
    if (sub < 0) {
      sdp.warnings.push_back("psd constraint " + c.group + " " + c.label + " needs level " +
                             std::to_string((r.degree() + 1) / 2) + "; skipped");
      continue;
    }
    std::vector<NCMonomial> rows;
    for (const auto& w : sdp.basis)
      if (int(w.degree()) <= sub) rows.push_back(w);
    sdp.blocks.push_back(block(c.group + " " + c.label, rows, r));
  }

  NCPolynomial obj = red.reduce(p.objective);
  if (obj.degree() > top)
    sdp.warnings.push_back("objective has degree " + std::to_string(obj.degree()) + " > " + std::to_string(top) +
                           "; its moments are not constrained by the moment block");
  sdp.objective = index.form(obj);
  return sdp;
}

// ---------------------------------------------------------------------------
// Sparse SDPA data: minimize c.x subject to sum_k x_k F_k - F_0 >= 0.

struct SdpaEntry {
  int mat = 0, block = 1, i = 1, j = 1;
  double value = 0;

  friend bool operator==(const SdpaEntry&, const SdpaEntry&) = default;
};

struct SdpaProblem {
  std::vector<std::string> comments;
  std::size_t m = 0;
  std::vector<long> blocks;
  std::vector<double> c;
  std::vector<SdpaEntry> entries;

  friend bool operator==(const SdpaProblem&, const SdpaProblem&) = default;

  void sort_entries() {
    std::sort(entries.begin(), entries.end(), [](const SdpaEntry& a, const SdpaEntry& b) {
      return std::tie(a.mat, a.block, a.i, a.j) < std::tie(b.mat, b.block, b.i, b.j);
    });
  }
};

inline std::string format_sdpa_number(double v) {
  if (v == 0) v = 0;  // no negative zero
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_sdpa(std::ostream& os, const SdpaProblem& p) {
  for (const auto& c : p.comments) os << '"' << c << "\n";
  os << p.m << "\n" << p.blocks.size() << "\n";
  for (std::size_t b = 0; b < p.blocks.size(); ++b) os << (b ? " " : "") << p.blocks[b];
  os << "\n";
  for (std::size_t k = 0; k < p.c.size(); ++k) os << (k ? " " : "") << format_sdpa_number(p.c[k]);
  os << "\n";
  SdpaProblem sorted = p;
  sorted.sort_entries();
  for (const auto& e : sorted.entries)
    os << e.mat << " " << e.block << " " << e.i << " " << e.j << " " << format_sdpa_number(e.value) << "\n";
}

inline void export_sdpa(const SdpaProblem& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_sdpa(out, p);
  if (!out) throw std::runtime_error("write failed for " + path);
}

inline SdpaProblem read_sdpa(std::istream& is) {
  SdpaProblem p;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& what) -> void {
    throw std::invalid_argument("sdpa line " + std::to_string(lineno) + ": " + what);
  };
  auto tokens = [](std::string s) {
    for (char& ch : s)
      if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')') ch = ' ';
    std::istringstream ss(s);
    std::vector<std::string> out;
    for (std::string t; ss >> t;) out.push_back(t);
    return out;
  };
  auto to_long = [&](const std::string& t) {
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(t, &used);
    } catch (const std::exception&) {
      fail("expected an integer, got '" + t + "'");
    }
    if (used != t.size()) fail("expected an integer, got '" + t + "'");
    return v;
  };
  auto to_double = [&](const std::string& t) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      fail("expected a number, got '" + t + "'");
    }
    if (used != t.size()) fail("expected a number, got '" + t + "'");
    return v;
  };

  int stage = 0;  // 0 mDIM, 1 nBLOCK, 2 block sizes, 3 cost vector, 4 entries
  long nblock = 0;
  bool header = true;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (header && !line.empty() && (line[0] == '"' || line[0] == '*')) {
      p.comments.push_back(line.substr(1));
      continue;
    }
    header = false;
    auto t = tokens(line);
    if (t.empty()) continue;
    switch (stage) {
      case 0: {
        long m = to_long(t[0]);
        if (m < 0) fail("negative mDIM");
        p.m = std::size_t(m);
        stage = 1;
        break;
      }
      case 1:
        nblock = to_long(t[0]);
        if (nblock < 1) fail("nBLOCK must be positive");
        stage = 2;
        break;
      case 2:
        for (const auto& s : t) {
          if (long(p.blocks.size()) == nblock) break;
          long b = to_long(s);
          if (b == 0) fail("zero block size");
          p.blocks.push_back(b);
        }
        if (long(p.blocks.size()) != nblock) fail("expected " + std::to_string(nblock) + " block sizes");
        stage = 3;
        break;
      case 3:
        for (const auto& s : t) {
          if (p.c.size() == p.m) break;
          p.c.push_back(to_double(s));
        }
        if (p.c.size() != p.m) fail("expected " + std::to_string(p.m) + " cost coefficients");
        stage = 4;
        break;
      default: {
        if (t.size() != 5) fail("expected 5 fields in an entry line");
        SdpaEntry e{int(to_long(t[0])), int(to_long(t[1])), int(to_long(t[2])), int(to_long(t[3])), to_double(t[4])};
        if (e.mat < 0 || std::size_t(e.mat) > p.m) fail("matrix number out of range");
        if (e.block < 1 || e.block > nblock) fail("block number out of range");
        long size = std::abs(p.blocks[std::size_t(e.block - 1)]);
        if (e.i < 1 || e.j < e.i || e.j > size) fail("entry index out of range");
        if (p.blocks[std::size_t(e.block - 1)] < 0 && e.i != e.j) fail("off-diagonal entry in a diagonal block");
        p.entries.push_back(e);
      }
    }
  }
  if (stage < 4) {
    ++lineno;
    fail("unexpected end of file");
  }
  return p;
}

inline SdpaProblem parse_sdpa(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_sdpa(in);
}

// ---------------------------------------------------------------------------
// Real form of a moment relaxation. Each conjugate pair of moments {y, conj y}
// contributes a real-part variable and, unless the moment is self-adjoint, an
// imaginary-part variable; the identity moment is fixed to 1. Hermitian blocks
// M become [[Re M, -Im M], [Im M, Re M]]; every equality contributes its real
// and imaginary parts as a pair of opposite entries in one diagonal block.

struct MomentCoordinate {
  int re = -1, im = -1;  // variable indices (0-based), -1 when absent
  double sign = 1;       // y = x[re] + i sign x[im]
};

struct SdpaExport {
  SdpaProblem sdpa;
  std::vector<MomentCoordinate> coords;
  double objective_offset = 0;  // maximized value = -(c.x) + offset
  std::size_t equality_rows = 0;

  std::vector<double> point(const std::vector<cplx>& y) const {
    std::vector<double> x(sdpa.m, 0.0);
    for (std::size_t i = 0; i < coords.size(); ++i) {
      const auto& k = coords[i];
      if (k.re >= 0 && k.sign > 0) x[std::size_t(k.re)] = y[i].real();
      if (k.im >= 0 && k.sign > 0) x[std::size_t(k.im)] = y[i].imag();
    }
    return x;
  }
};

namespace detail {

// Affine real expression: constant + sum coeff * x_k.
struct Affine {
  double constant = 0;
  std::map<int, double> coeff;

  void add(int var, double v) {
    if (v == 0) return;
    if (var < 0) constant += v;
    else coeff[var] += v;
  }
  bool is_zero() const {
    if (constant != 0) return false;
    for (const auto& [k, v] : coeff)
      if (v != 0) return false;
    return true;
  }
};

inline void split_form(const LinForm& f, const std::vector<MomentCoordinate>& coords, Affine& re, Affine& im) {
  for (const auto& [m, c] : f) {
    const double cr = c.re.to_double(), ci = c.im.to_double();
    const auto& k = coords[m];
    if (m == 0) {
      re.add(-1, cr);
      im.add(-1, ci);
      continue;
    }
    // (cr + i ci)(a + i s b) = (cr a - s ci b) + i (ci a + s cr b)
    re.add(k.re, cr);
    im.add(k.re, ci);
    if (k.im >= 0) {
      re.add(k.im, -k.sign * ci);
      im.add(k.im, k.sign * cr);
    }
  }
}

}  // namespace detail

inline SdpaExport to_sdpa(const MomentSDP& sdp) {
  SdpaExport ex;
  const std::size_t nm = sdp.moments.size();
  ex.coords.assign(nm, {});
  int next = 0;
  for (std::size_t i = 1; i < nm; ++i) {
    std::size_t j = sdp.adjoint_of[i];
    if (j < i) {
      ex.coords[i] = {ex.coords[j].re, ex.coords[j].im, -1};
      continue;
    }
    ex.coords[i].re = next++;
    if (j != i) ex.coords[i].im = next++;
  }
  auto& out = ex.sdpa;
  out.m = std::size_t(next);

  auto emit = [&](int blk, int i, int j, const detail::Affine& a) {
    if (a.constant != 0) out.entries.push_back({0, blk, i, j, -a.constant});
    for (const auto& [k, v] : a.coeff)
      if (v != 0) out.entries.push_back({k + 1, blk, i, j, v});
  };

  int blk = 0;
  for (const auto& b : sdp.blocks) {
    ++blk;
    const int n = int(b.size());
    out.blocks.push_back(2L * n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        detail::Affine re, im;
        detail::split_form(b.at(std::size_t(i), std::size_t(j)), ex.coords, re, im);
        emit(blk, i + 1, j + 1, re);
        emit(blk, n + i + 1, n + j + 1, re);
        // upper-right block: (i, n + j) = -Im M_ij and (j, n + i) = Im M_ij
        detail::Affine neg;
        neg.constant = -im.constant;
        for (const auto& [k, v] : im.coeff) neg.coeff[k] = -v;
        emit(blk, i + 1, n + j + 1, neg);
        if (i != j) emit(blk, j + 1, n + i + 1, im);
      }
  }

  std::vector<detail::Affine> rows;
  for (const auto& f : sdp.equalities) {
    detail::Affine re, im;
    detail::split_form(f, ex.coords, re, im);
    for (auto* a : {&re, &im})
      if (!a->is_zero()) rows.push_back(*a);
  }
  ex.equality_rows = rows.size();
  if (!rows.empty()) {
    ++blk;
    out.blocks.push_back(-2L * long(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      emit(blk, int(2 * r + 1), int(2 * r + 1), rows[r]);
      detail::Affine neg;
      neg.constant = -rows[r].constant;
      for (const auto& [k, v] : rows[r].coeff) neg.coeff[k] = -v;
      emit(blk, int(2 * r + 2), int(2 * r + 2), neg);
    }
  }

  detail::Affine obj_re, obj_im;
  detail::split_form(sdp.objective, ex.coords, obj_re, obj_im);
  out.c.assign(out.m, 0.0);
  for (const auto& [k, v] : obj_re.coeff) out.c[std::size_t(k)] = v == 0 ? 0.0 : -v;
  ex.objective_offset = obj_re.constant;

  // Merge duplicate positions.
  out.sort_entries();
  std::vector<SdpaEntry> merged;
  for (const auto& e : out.entries) {
    if (!merged.empty() && merged.back().mat == e.mat && merged.back().block == e.block && merged.back().i == e.i &&
        merged.back().j == e.j)
      merged.back().value += e.value;
    else
      merged.push_back(e);
  }
  std::erase_if(merged, [](const SdpaEntry& e) { return e.value == 0; });
  out.entries = std::move(merged);

  out.comments.push_back("graphcap moment relaxation level=" + std::to_string(sdp.level) + " basis=" +
                         std::to_string(sdp.basis.size()) + " moments=" + std::to_string(nm));
  out.comments.push_back("c graphcap sense=max offset=" + format_sdpa_number(ex.objective_offset));
  if (sdp.shift != 0) out.comments.push_back("c graphcap shift=" + format_sdpa_number(sdp.shift));
  return ex;
}

// ---------------------------------------------------------------------------
// Evaluation of candidate points.

struct MomentFeasibility {
  double max_linear_residual = 0;
  double min_block_eigenvalue = std::numeric_limits<double>::infinity();
  double objective = 0;
};

inline double form_value_real(const LinForm& f, const std::vector<cplx>& y, cplx* full = nullptr) {
  cplx s = 0;
  for (const auto& [m, c] : f) s += c.to_complex() * y[m];
  if (full) *full = s;
  return s.real();
}

inline MomentFeasibility check_moment_point(const MomentSDP& sdp, const std::vector<cplx>& y) {
  if (y.size() != sdp.moments.size()) throw std::invalid_argument("moment vector has the wrong length");
  MomentFeasibility r;
  r.max_linear_residual = std::abs(y[sdp.normalization] - cplx(1));
  for (std::size_t i = 0; i < y.size(); ++i)
    r.max_linear_residual = std::max(r.max_linear_residual, std::abs(y[sdp.adjoint_of[i]] - std::conj(y[i])));
  for (const auto& f : sdp.equalities) {
    cplx v;
    form_value_real(f, y, &v);
    r.max_linear_residual = std::max(r.max_linear_residual, std::abs(v));
  }
  for (const auto& b : sdp.blocks) {
    const Eigen::Index n = Eigen::Index(b.size());
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        cplx v;
        form_value_real(b.at(std::size_t(i), std::size_t(j)), y, &v);
        m(i, j) = v;
      }
    r.max_linear_residual = std::max(r.max_linear_residual, (m - m.adjoint()).cwiseAbs().maxCoeff());
    double lo = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(Eigen::MatrixXcd((m + m.adjoint()) / 2.0),
                                                                  Eigen::EigenvaluesOnly)
                    .eigenvalues()
                    .minCoeff();
    r.min_block_eigenvalue = std::min(r.min_block_eigenvalue, lo);
  }
  r.objective = form_value_real(sdp.objective, y);
  return r;
}

// Smallest eigenvalue over the blocks of sum_k x_k F_k - F_0 (diagonal blocks
// contribute their smallest entry), and the maximized objective -(c.x) + offset.
inline MomentFeasibility check_sdpa_point(const SdpaExport& ex, const std::vector<double>& x) {
  const auto& p = ex.sdpa;
  if (x.size() != p.m) throw std::invalid_argument("point has the wrong length");
  std::vector<Eigen::MatrixXd> mats;
  for (long b : p.blocks) mats.push_back(Eigen::MatrixXd::Zero(std::abs(b), std::abs(b)));
  for (const auto& e : p.entries) {
    double w = e.mat == 0 ? -1.0 : x[std::size_t(e.mat - 1)];
    auto& m = mats[std::size_t(e.block - 1)];
    m(e.i - 1, e.j - 1) += w * e.value;
    if (e.i != e.j) m(e.j - 1, e.i - 1) += w * e.value;
  }
  MomentFeasibility r;
  for (std::size_t b = 0; b < mats.size(); ++b) {
    double lo = p.blocks[b] < 0 ? mats[b].diagonal().minCoeff()
                                : Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(mats[b], Eigen::EigenvaluesOnly)
                                      .eigenvalues()
                                      .minCoeff();
    r.min_block_eigenvalue = std::min(r.min_block_eigenvalue, lo);
    if (p.blocks[b] < 0) r.max_linear_residual = std::max(r.max_linear_residual, mats[b].diagonal().cwiseAbs().maxCoeff());
  }
  double cx = 0;
  for (std::size_t k = 0; k < p.m; ++k) cx += p.c[k] * x[k];
  r.objective = -cx + ex.objective_offset;
  return r;
}

// Moments <psi| w |psi> of a concrete assignment.
inline std::vector<cplx> moments_from_assignment(const MomentSDP& sdp, const NCProblem& p, const OperatorAssignment& a,
                                                 const Eigen::VectorXcd& psi) {
  auto values = a.ordered(p);
  std::vector<cplx> y;
  y.reserve(sdp.moments.size());
  for (const auto& m : sdp.moments) {
    Eigen::VectorXcd v = psi;
    for (auto it = m.word.rbegin(); it != m.word.rend(); ++it)
      v = it->adj ? Eigen::VectorXcd(values[it->var].adjoint() * v) : Eigen::VectorXcd(values[it->var] * v);
    y.push_back(psi.dot(v));
  }
  return y;
}

// Unit eigenvector for the largest eigenvalue of the (Hermitian) objective.
inline Eigen::VectorXcd top_objective_state(const NCProblem& p, const OperatorAssignment& a) {
  Eigen::MatrixXcd m = evaluate(p.objective, a.ordered(p), Eigen::Index(a.dim));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Eigen::MatrixXcd((m + m.adjoint()) / 2.0));
  return es.eigenvectors().col(es.eigenvalues().size() - 1);
}

}  // namespace graphcap
