#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "code_check.hpp"
#include "dfa.hpp"
#include "graph.hpp"
#include "ncpoly.hpp"
#include "spectrum.hpp"

namespace graphcap {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

struct NCVariable {
  std::string name;
  bool hermitian = false;
};

struct NCConstraint {
  std::string group;
  std::string label;
  NCPolynomial poly;
};

// Structural facts about the variables from which the moment module derives
// its monomial rewrite rules. Indices refer to NCProblem::variables.
//   involution  {a}        a a -> 1
//   idempotent  {a}        a a -> a
//   commute     {a, b}     every letter of b before every letter of a is swapped
//   intertwine  {s, a, b}  a s -> s b and b s -> s a (s a Hermitian involution)
//   expand      {t, a, b}  t -> a b
//   expand_part {t, ah, aa, bh, ba}, part 0 or 1
//                          t -> Hermitian (0) or anti-Hermitian (1) part of
//                          (ah + i aa)(bh + i ba); a missing aa / ba is npos
struct RewriteHint {
  enum class Kind { involution, idempotent, commute, intertwine, expand, expand_part };
  Kind kind = Kind::involution;
  std::vector<std::size_t> vars;
  int part = 0;
};

inline constexpr std::size_t kNoVariable = std::numeric_limits<std::size_t>::max();

struct NCProblem {
  std::vector<NCVariable> variables;
  std::vector<NCConstraint> equalities;
  std::vector<NCConstraint> psd;
  NCPolynomial objective;
  std::vector<RewriteHint> hints;
  std::map<std::string, std::string> metadata;
  double shift = 0;

  std::size_t add_variable(const std::string& name, bool hermitian) {
    if (find(name) != kNoVariable) throw std::invalid_argument("duplicate variable " + name);
    variables.push_back({name, hermitian});
    return variables.size() - 1;
  }

  std::size_t find(const std::string& name) const {
    for (std::size_t i = 0; i < variables.size(); ++i)
      if (variables[i].name == name) return i;
    return kNoVariable;
  }

  std::size_t index(const std::string& name) const {
    std::size_t i = find(name);
    if (i == kNoVariable) throw std::out_of_range("unknown variable " + name);
    return i;
  }

  Letter letter(std::size_t v, bool adj = false) const {
    bool h = variables.at(v).hermitian;
    return {std::uint32_t(v), adj && !h, h};
  }

  NCPolynomial var(std::size_t v, bool adj = false) const { return NCPolynomial(letter(v, adj)); }
  NCPolynomial var(const std::string& name, bool adj = false) const { return var(index(name), adj); }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& v : variables) out.push_back(v.name);
    return out;
  }

  bool hermitian_only() const {
    for (const auto& v : variables)
      if (!v.hermitian) return false;
    for (const auto* list : {&equalities, &psd})
      for (const auto& c : *list)
        if (!c.poly.is_hermitian()) return false;
    return objective.is_hermitian();
  }

  std::size_t constraint_count() const { return equalities.size() + psd.size(); }

  std::map<std::string, std::size_t> group_counts() const {
    std::map<std::string, std::size_t> out;
    for (const auto* list : {&equalities, &psd})
      for (const auto& c : *list) ++out[c.group];
    return out;
  }

  void validate() const {
    auto check = [&](const NCPolynomial& p, const std::string& where) {
      for (const auto& [m, c] : p.terms())
        for (const Letter& l : m.word) {
          if (l.var >= variables.size()) throw std::invalid_argument(where + ": undeclared variable");
          if (l.herm != variables[l.var].hermitian || (l.herm && l.adj))
            throw std::invalid_argument(where + ": inconsistent Hermitian flag on " + variables[l.var].name);
        }
    };
    for (const auto* list : {&equalities, &psd})
      for (const auto& c : *list) check(c.poly, c.label);
    check(objective, "objective");
  }
};

enum class NpoVariant { direct, conjugation };

// literal:   F T_gh D = 0 and F U_gh D U_gh^* F = 0.
// corrected: the adjoint forms D T_gh F = 0 and D U_gh F U_gh^* D = 0.
enum class RejectionForm { corrected, literal };

struct CapacityOptions {
  NpoVariant variant = NpoVariant::direct;
  RejectionForm rejection = RejectionForm::corrected;
  bool redundant_swap = false;
};

inline std::string to_string(NpoVariant v) { return v == NpoVariant::direct ? "direct" : "conjugation"; }
inline std::string to_string(RejectionForm r) { return r == RejectionForm::corrected ? "corrected" : "literal"; }

inline std::string operator_name(const std::string& prefix, std::size_t g, std::size_t h) {
  auto part = [](std::size_t x) { return x == kNoVariable ? std::string(".") : std::to_string(x); };
  return prefix + "[" + part(g) + "," + part(h) + "]";
}

inline NCProblem build_capacity_problem(const Graph& g, CapacityOptions opt = {}) {
  const std::size_t k = g.size();
  if (k < 2) throw std::invalid_argument("capacity problem needs at least two vertices");
  const std::string pre = opt.variant == NpoVariant::direct ? "T" : "U";
  NCProblem p;
  const std::size_t s = p.add_variable("S", true), d = p.add_variable("D", true), f = p.add_variable("F", true);
  std::vector<std::size_t> left(k), right(k), pair(k * k);
  for (std::size_t u = 0; u < k; ++u) left[u] = p.add_variable(operator_name(pre, u, kNoVariable), false);
  for (std::size_t u = 0; u < k; ++u) right[u] = p.add_variable(operator_name(pre, kNoVariable, u), false);
  for (std::size_t u = 0; u < k; ++u)
    for (std::size_t v = 0; v < k; ++v) pair[u * k + v] = p.add_variable(operator_name(pre, u, v), false);

  auto X = [&](std::size_t v, bool adj = false) { return p.var(v, adj); };
  auto name = [&](std::size_t v) { return p.variables[v].name; };
  const NCPolynomial I(1);
  auto eq = [&](const std::string& group, const std::string& label, NCPolynomial poly) {
    p.equalities.push_back({group, label, std::move(poly)});
  };
  auto ge = [&](const std::string& group, const std::string& label, NCPolynomial poly) {
    p.psd.push_back({group, label, std::move(poly)});
  };

  for (std::size_t u = 0; u < k; ++u)
    for (std::size_t v = 0; v < k; ++v)
      eq("commutation", "[" + name(right[v]) + "," + name(left[u]) + "]",
         X(right[v]) * X(left[u]) - X(left[u]) * X(right[v]));
  for (std::size_t u = 0; u < k; ++u)
    for (std::size_t v = 0; v < k; ++v)
      eq("product", name(pair[u * k + v]), X(pair[u * k + v]) - X(left[u]) * X(right[v]));

  std::vector<std::size_t> single(left);
  single.insert(single.end(), right.begin(), right.end());
  for (std::size_t t : single) {
    ge("contraction", name(t) + "^*" + name(t), X(t, true) * X(t));
    ge("contraction", "1-" + name(t) + "^*" + name(t), I - X(t, true) * X(t));
  }
  for (std::size_t t : single) {
    ge("co-contraction", name(t) + name(t) + "^*", X(t) * X(t, true));
    ge("co-contraction", "1-" + name(t) + name(t) + "^*", I - X(t) * X(t, true));
  }
  for (std::size_t t : single) eq("subpermutation", name(t), X(t) * X(t, true) * X(t) - X(t));

  eq("projector", "S^2", X(s) * X(s) - I);
  eq("projector", "D^2", X(d) * X(d) - X(d));
  eq("projector", "F^2", X(f) * X(f) - X(f));
  for (std::size_t u = 0; u < k; ++u)
    eq("swap", "S" + name(left[u]), X(s) * X(left[u]) - X(right[u]) * X(s));
  eq("symmetry", "SD", X(s) * X(d) - X(d) * X(s));
  eq("symmetry", "SF", X(s) * X(f) - X(f) * X(s));
  eq("symmetry", "DF", X(d) * X(f) - X(f) * X(d));

  const bool literal = opt.rejection == RejectionForm::literal;
  if (opt.variant == NpoVariant::direct) {
    for (std::size_t u = 0; u < k; ++u) {
      std::size_t t = pair[u * k + u];
      eq("diagonal_closure", name(t), X(d) * X(t) * X(d) - X(t) * X(d));
    }
    ge("final_contains_diagonal", "F-D", X(f) - X(d));
    for (std::size_t u = 0; u < k; ++u) {
      std::size_t t = pair[u * k + u];
      eq("final_closure_diagonal", name(t), X(f) * X(t) * X(f) - X(t) * X(f));
    }
    for (auto [u, v] : g.edges()) {
      std::size_t t = pair[u * k + v];
      eq("final_closure_edges", name(t), X(f) * X(t) * X(f) - X(t) * X(f));
    }
    for (auto [u, v] : g.edges()) {
      std::size_t t = pair[u * k + v];
      eq("rejection", name(t), literal ? X(f) * X(t) * X(d) : X(d) * X(t) * X(f));
    }
  } else {
    auto conj = [&](std::size_t t, std::size_t mid) { return X(t) * X(mid) * X(t, true); };
    for (std::size_t u = 0; u < k; ++u) {
      std::size_t t = pair[u * k + u];
      eq("diagonal_closure", name(t), X(d) * conj(t, d) * X(d) - conj(t, d));
    }
    ge("final_contains_diagonal", "F-D", X(f) - X(d));
    for (std::size_t u = 0; u < k; ++u) {
      std::size_t t = pair[u * k + u];
      eq("final_closure_diagonal", name(t), X(f) * conj(t, f) * X(f) - conj(t, f));
    }
    for (auto [u, v] : g.edges()) {
      std::size_t t = pair[u * k + v];
      eq("final_closure_edges", name(t), X(f) * conj(t, f) * X(f) - conj(t, f));
    }
    for (auto [u, v] : g.edges()) {
      std::size_t t = pair[u * k + v];
      eq("rejection", name(t), literal ? X(f) * conj(t, d) * X(f) : X(d) * conj(t, f) * X(d));
    }
  }
  if (opt.redundant_swap)
    for (std::size_t u = 0; u < k; ++u)
      for (std::size_t v = 0; v < k; ++v)
        eq("swap_products", "S" + name(pair[u * k + v]),
           X(s) * X(pair[u * k + v]) - X(pair[v * k + u]) * X(s));

  NCPolynomial diag_sum;
  for (std::size_t u = 0; u < k; ++u) {
    std::size_t t = pair[u * k + u];
    diag_sum += (X(t) + X(t, true)) * CRational(Rational(1, 2));
  }
  p.objective = X(d) * diag_sum * X(d);

  using K = RewriteHint::Kind;
  p.hints.push_back({K::involution, {s}});
  p.hints.push_back({K::idempotent, {d}});
  p.hints.push_back({K::idempotent, {f}});
  p.hints.push_back({K::commute, {s, d}});
  p.hints.push_back({K::commute, {s, f}});
  p.hints.push_back({K::commute, {d, f}});
  for (std::size_t u = 0; u < k; ++u)
    for (std::size_t v = 0; v < k; ++v) p.hints.push_back({K::commute, {left[u], right[v]}});
  for (std::size_t u = 0; u < k; ++u) p.hints.push_back({K::intertwine, {s, left[u], right[u]}});
  for (std::size_t u = 0; u < k; ++u)
    for (std::size_t v = 0; v < k; ++v) p.hints.push_back({K::expand, {pair[u * k + v], left[u], right[v]}});

  std::string edges;
  for (auto [u, v] : g.edges()) edges += (edges.empty() ? "" : " ") + std::to_string(u) + "-" + std::to_string(v);
  p.metadata["graph_vertices"] = std::to_string(k);
  p.metadata["graph_edges"] = edges;
  p.metadata["variant"] = to_string(opt.variant);
  p.metadata["rejection"] = to_string(opt.rejection);
  p.metadata["redundant_swap"] = opt.redundant_swap ? "true" : "false";
  p.metadata["prefix"] = pre;
  return p;
}

// Nearest fraction with denominator at most 10^6; the shift must be exactly
// representable that way.
inline Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite coefficient");
  const std::int64_t den = 1'000'000;
  double scaled = std::round(x * double(den));
  if (std::abs(scaled) > 9e18) throw std::overflow_error("coefficient too large");
  Rational r(std::int64_t(scaled), den);
  if (std::abs(r.to_double() - x) > 1e-12 * std::max(1.0, std::abs(x)))
    throw std::invalid_argument("coefficient " + std::to_string(x) + " is not a multiple of 1e-6");
  return r;
}

// Adds Hermitian P with (M + k) P - P^2 = 0 and makes P the objective.
inline NCProblem eigen_gadget(NCProblem p, const NCPolynomial& m, Rational k) {
  if (k < Rational(0)) throw std::invalid_argument("gadget shift must be non-negative");
  std::string name = "P";
  for (int i = 1; p.find(name) != kNoVariable; ++i) name = "P" + std::to_string(i);
  std::size_t pv = p.add_variable(name, true);
  NCPolynomial P = p.var(pv);
  p.equalities.push_back({"gadget", "(M+k)" + name + "-" + name + "^2", (m + NCPolynomial(CRational(k))) * P - P * P});
  p.objective = P;
  p.shift += k.to_double();
  p.metadata["shift"] = k.str();
  return p;
}

inline NCProblem eigen_gadget(NCProblem p, const NCPolynomial& m, double k) {
  return eigen_gadget(std::move(p), m, rational_from_double(k));
}

inline double unshift(const NCProblem& p, double value) { return value - p.shift; }

// Rewrites every non-Hermitian variable X as X_h + i X_a and splits each
// polynomial into its Hermitian and anti-Hermitian parts. A non-Hermitian
// objective first goes through eigen_gadget with shift 0.
inline NCProblem hermitize(const NCProblem& input) {
  if (input.hermitian_only()) return input;
  NCProblem src = input.objective.is_hermitian() ? input : eigen_gadget(input, input.objective, Rational(0));

  NCProblem out;
  out.metadata = src.metadata;
  out.metadata["hermitized"] = "true";
  out.shift = src.shift;
  struct Parts {
    std::size_t h = kNoVariable, a = kNoVariable;
  };
  std::vector<Parts> parts(src.variables.size());
  for (std::size_t v = 0; v < src.variables.size(); ++v) {
    const auto& var = src.variables[v];
    if (var.hermitian) {
      parts[v].h = out.add_variable(var.name, true);
    } else {
      parts[v].h = out.add_variable(var.name + "_h", true);
      parts[v].a = out.add_variable(var.name + "_a", true);
    }
  }
  auto image = [&](Letter l) {
    const Parts& pr = parts[l.var];
    NCPolynomial h = out.var(pr.h);
    if (pr.a == kNoVariable) return h;
    NCPolynomial a = out.var(pr.a) * CRational::i();
    return l.adj ? h - a : h + a;
  };

  for (const auto& c : src.equalities) {
    NCPolynomial q = c.poly.substitute(image);
    NCPolynomial h = q.hermitian_part(), a = q.antihermitian_part();
    if (a.is_zero()) {
      out.equalities.push_back({c.group, c.label, h});
      continue;
    }
    if (!h.is_zero()) out.equalities.push_back({c.group, c.label + ".h", h});
    out.equalities.push_back({c.group, c.label + ".a", a});
  }
  for (const auto& c : src.psd) out.psd.push_back({c.group, c.label, c.poly.substitute(image).hermitian_part()});
  out.objective = src.objective.substitute(image).hermitian_part();

  using K = RewriteHint::Kind;
  auto split = [&](std::size_t v) {
    std::vector<std::size_t> r{parts[v].h};
    if (parts[v].a != kNoVariable) r.push_back(parts[v].a);
    return r;
  };
  for (const auto& hint : src.hints) {
    const auto& v = hint.vars;
    switch (hint.kind) {
      case K::involution:
      case K::idempotent:
        if (parts[v[0]].a == kNoVariable) out.hints.push_back({hint.kind, {parts[v[0]].h}});
        break;
      case K::commute:
        for (std::size_t a : split(v[0]))
          for (std::size_t b : split(v[1])) out.hints.push_back({K::commute, {a, b}});
        break;
      case K::intertwine: {
        auto a = split(v[1]), b = split(v[2]);
        if (a.size() != b.size() || parts[v[0]].a != kNoVariable) break;
        for (std::size_t i = 0; i < a.size(); ++i) out.hints.push_back({K::intertwine, {parts[v[0]].h, a[i], b[i]}});
        break;
      }
      case K::expand:
        if (parts[v[0]].a == kNoVariable) break;
        for (int part = 0; part < 2; ++part)
          out.hints.push_back({K::expand_part,
                               {part == 0 ? parts[v[0]].h : parts[v[0]].a, parts[v[1]].h, parts[v[1]].a, parts[v[2]].h,
                                parts[v[2]].a},
                               part});
        break;
      case K::expand_part:
        out.hints.push_back(hint);
        break;
    }
  }
  return out;
}

struct OperatorAssignment {
  std::size_t dim = 0;
  std::map<std::string, CMatrix> values;

  std::vector<CMatrix> ordered(const NCProblem& p) const {
    std::vector<CMatrix> out;
    for (const auto& v : p.variables) {
      auto it = values.find(v.name);
      if (it == values.end()) throw std::invalid_argument("assignment is missing " + v.name);
      if (std::size_t(it->second.rows()) != dim || std::size_t(it->second.cols()) != dim)
        throw std::invalid_argument("dimension mismatch for " + v.name);
      if (v.hermitian && (it->second - it->second.adjoint()).norm() > 1e-10)
        throw std::invalid_argument(v.name + " must be Hermitian");
      out.push_back(it->second);
    }
    return out;
  }
};

// Values of the Hermitian and anti-Hermitian parts for the variables a
// hermitized problem introduced.
inline OperatorAssignment hermitize_assignment(const OperatorAssignment& a, const NCProblem& hermitized) {
  OperatorAssignment out{a.dim, {}};
  for (const auto& v : hermitized.variables) {
    if (auto it = a.values.find(v.name); it != a.values.end()) {
      out.values[v.name] = it->second;
      continue;
    }
    std::string base = v.name.size() > 2 ? v.name.substr(0, v.name.size() - 2) : "";
    std::string tail = v.name.size() > 2 ? v.name.substr(v.name.size() - 2) : "";
    auto it = a.values.find(base);
    if (it == a.values.end() || (tail != "_h" && tail != "_a")) continue;
    const CMatrix& x = it->second;
    out.values[v.name] = tail == "_h" ? CMatrix((x + x.adjoint()) / 2.0) : CMatrix((x - x.adjoint()) / cplx(0, 2));
  }
  return out;
}

inline double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0;
  return Eigen::JacobiSVD<CMatrix>(m).singularValues()(0);
}

// Largest real eigenvalue; -inf when the spectrum has none within 1e-9.
inline double max_real_eigenvalue(const CMatrix& m) {
  if ((m - m.adjoint()).norm() <= 1e-12 * std::max(1.0, m.norm()))
    return Eigen::SelfAdjointEigenSolver<CMatrix>(CMatrix((m + m.adjoint()) / 2.0)).eigenvalues().maxCoeff();
  Eigen::VectorXcd ev = doubled_spectrum(m);
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i).imag()) <= 1e-9) best = std::max(best, ev(i).real());
  return best;
}

struct VerificationReport {
  double max_equality_residual = 0;
  std::string worst_equality;
  double min_psd_eigenvalue = std::numeric_limits<double>::infinity();
  std::string worst_psd;
  double objective_value = 0;
  std::map<std::string, double> group_residuals;
};

inline VerificationReport verify_assignment(const NCProblem& p, const OperatorAssignment& a) {
  p.validate();
  auto values = a.ordered(p);
  const Eigen::Index dim = Eigen::Index(a.dim);
  VerificationReport r;
  for (const auto& c : p.equalities) {
    double res = spectral_norm(evaluate(c.poly, values, dim));
    auto& g = r.group_residuals[c.group];
    g = std::max(g, res);
    if (res > r.max_equality_residual || r.worst_equality.empty()) {
      r.max_equality_residual = res;
      r.worst_equality = c.group + " " + c.label;
    }
  }
  for (const auto& c : p.psd) {
    CMatrix m = evaluate(c.poly, values, dim);
    double lo = dim == 0 ? 0 : Eigen::SelfAdjointEigenSolver<CMatrix>(CMatrix((m + m.adjoint()) / 2.0)).eigenvalues().minCoeff();
    if (lo < r.min_psd_eigenvalue) {
      r.min_psd_eigenvalue = lo;
      r.worst_psd = c.group + " " + c.label;
    }
  }
  r.objective_value = dim == 0 ? 0 : max_real_eigenvalue(evaluate(p.objective, values, dim));
  return r;
}

// Two readings of the growth rate on a capacity-problem assignment: the
// dominant eigenvalue of D (sum_g T_gg) D and the square root of the dominant
// eigenvalue of sum_{g,h} T_gh (the R (x) R form).
struct CapacityReadout {
  double diagonal = 0;
  double pair_space = 0;
  double pair_root = 0;
};

inline CapacityReadout capacity_readout(const NCProblem& p, const OperatorAssignment& a) {
  const std::size_t k = std::stoul(p.metadata.at("graph_vertices"));
  const std::string pre = p.metadata.at("prefix");
  const Eigen::Index dim = Eigen::Index(a.dim);
  CMatrix diag = CMatrix::Zero(dim, dim), all = CMatrix::Zero(dim, dim);
  for (std::size_t u = 0; u < k; ++u)
    for (std::size_t v = 0; v < k; ++v) {
      const CMatrix& t = a.values.at(operator_name(pre, u, v));
      all += t;
      if (u == v) diag += t;
    }
  const CMatrix& d = a.values.at("D");
  CapacityReadout r;
  r.diagonal = spectral_radius_of(d * diag * d);
  r.pair_space = spectral_radius_of(all);
  r.pair_root = std::sqrt(r.pair_space);
  return r;
}

// Operators of a reversible machine on C^d (x) C^d. T_u[s][s'] = 1 iff
// delta(s, u) = s', one 1 per row as in the DFA matrix picture; T_{u,0} acts on
// the left factor, T_{0,u} on the right. F is the set of pairs that reach the
// diagonal through confusable symbol pairs.
inline OperatorAssignment tensor_embedding(const Graph& g, const PartialDFA& m, const std::string& prefix = "T") {
  detail::require_alphabet(g, m);
  if (!is_reversible(m)) throw std::invalid_argument("tensor embedding needs a reversible machine");
  const std::size_t d = m.d, k = m.k;
  const Eigen::Index n = Eigen::Index(d * d), dd = Eigen::Index(d);
  std::vector<CMatrix> single(k, CMatrix::Zero(dd, dd));
  for (std::size_t u = 0; u < k; ++u)
    for (std::size_t s = 0; s < d; ++s)
      if (int t = m.next(s, Symbol(u)); t != kUndefined) single[u](Eigen::Index(s), t) = 1;
  auto kron = [&](const CMatrix& a, const CMatrix& b) {
    CMatrix out = CMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < dd; ++i)
      for (Eigen::Index j = 0; j < dd; ++j)
        if (a(i, j) != 0.0) out.block(i * dd, j * dd, dd, dd) = a(i, j) * b;
    return out;
  };
  const CMatrix id = CMatrix::Identity(dd, dd);
  OperatorAssignment a{std::size_t(n), {}};
  CMatrix S = CMatrix::Zero(n, n), D = CMatrix::Zero(n, n), F = CMatrix::Zero(n, n);
  PairReach reach = pair_reach(g, m);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      Eigen::Index ij = Eigen::Index(i * d + j);
      S(Eigen::Index(j * d + i), ij) = 1;
      if (i == j) D(ij, ij) = 1;
      if (reach(i, j)) F(ij, ij) = 1;
    }
  a.values["S"] = S;
  a.values["D"] = D;
  a.values["F"] = F;
  for (std::size_t u = 0; u < k; ++u) {
    a.values[operator_name(prefix, u, kNoVariable)] = kron(single[u], id);
    a.values[operator_name(prefix, kNoVariable, u)] = kron(id, single[u]);
    for (std::size_t v = 0; v < k; ++v) a.values[operator_name(prefix, u, v)] = kron(single[u], single[v]);
  }
  return a;
}

// Deterministic text form, one item per line.
inline void write_problem(std::ostream& os, const NCProblem& p) {
  const auto names = p.names();
  for (const auto& [key, value] : p.metadata) os << "meta " << key << " = " << value << "\n";
  if (p.shift != 0) os << "meta shift_value = " << p.shift << "\n";
  for (const auto& v : p.variables) os << "var " << v.name << (v.hermitian ? " hermitian" : "") << "\n";
  os << "objective " << to_string(p.objective, names) << "\n";
  for (const auto& c : p.equalities) os << "eq " << c.group << " " << c.label << " : " << to_string(c.poly, names) << " = 0\n";
  for (const auto& c : p.psd) os << "psd " << c.group << " " << c.label << " : " << to_string(c.poly, names) << " >= 0\n";
}

inline std::string problem_text(const NCProblem& p) {
  std::ostringstream os;
  write_problem(os, p);
  return os.str();
}

}  // namespace graphcap
