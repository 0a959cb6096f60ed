#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "dfa.hpp"
#include "spectrum.hpp"

namespace graphcap {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kQfaTolerance = 1e-10;
inline constexpr double kNonzeroProbability = 1e-9;
inline constexpr double kEnumerationLimit = 1e7;

// Projector layouts accepted by validate():
//   disjoint - A, R, N pairwise orthogonal with A + R + N = I;
//   nested   - A inside N, R orthogonal to both, N + R = I. Accepting states
//              stay live, which is the layout produced by from_reversible_dfa.
enum class ProjectorLayout { disjoint, nested };

struct QFA {
  std::size_t dim = 0;
  std::vector<CMatrix> unitaries;
  CMatrix accept, reject, neutral;
  CVector init;

  std::size_t alphabet() const { return unitaries.size(); }

  ProjectorLayout layout() const {
    return (accept * neutral).norm() <= kQfaTolerance ? ProjectorLayout::disjoint : ProjectorLayout::nested;
  }

  void validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("invalid QFA: " + what); };
    if (dim == 0) fail("dimension is zero");
    if (unitaries.empty()) fail("empty alphabet");
    const CMatrix I = CMatrix::Identity(Eigen::Index(dim), Eigen::Index(dim));
    auto square = [&](const CMatrix& m, const char* name) {
      if (m.rows() != Eigen::Index(dim) || m.cols() != Eigen::Index(dim)) fail(std::string(name) + " has wrong shape");
    };
    for (std::size_t s = 0; s < unitaries.size(); ++s) {
      square(unitaries[s], "unitary");
      if ((unitaries[s].adjoint() * unitaries[s] - I).norm() > kQfaTolerance)
        fail("unitary " + std::to_string(s) + " is not unitary");
    }
    for (auto [m, name] : {std::pair{&accept, "accept"}, std::pair{&reject, "reject"}, std::pair{&neutral, "neutral"}}) {
      square(*m, name);
      if ((*m - m->adjoint()).norm() > kQfaTolerance || (*m * *m - *m).norm() > kQfaTolerance)
        fail(std::string(name) + " projector is not a Hermitian idempotent");
    }
    if ((accept * reject).norm() > kQfaTolerance) fail("accept and reject overlap");
    if ((reject * neutral).norm() > kQfaTolerance) fail("reject and neutral overlap");
    if (layout() == ProjectorLayout::disjoint) {
      if ((accept + reject + neutral - I).norm() > kQfaTolerance) fail("A + R + N is not the identity");
    } else {
      if ((accept * neutral - accept).norm() > kQfaTolerance) fail("accept is neither inside nor orthogonal to neutral");
      if ((reject + neutral - I).norm() > kQfaTolerance) fail("R + N is not the identity");
    }
    if (init.size() != Eigen::Index(dim)) fail("init vector has wrong size");
    if (std::abs(init.norm() - 1.0) > 1e-12) fail("init vector is not normalised");
  }
};

// Deterministic embedding of a reversible partial DFA: live states span the
// first d basis vectors, undefined transitions are routed into a reject block
// and each symbol's subpermutation is completed greedily in index order.
inline QFA from_reversible_dfa(const PartialDFA& dfa) {
  dfa.validate();
  if (!is_reversible(dfa)) throw std::invalid_argument("from_reversible_dfa: machine is not reversible");
  const std::size_t d = dfa.d, k = dfa.k;
  std::size_t spare = 0;
  for (std::size_t x = 0; x < k; ++x) {
    std::size_t missing = 0;
    for (std::size_t s = 0; s < d; ++s) missing += dfa.next(s, Symbol(x)) == kUndefined;
    spare = std::max(spare, missing);
  }
  const std::size_t dim = d + spare;
  const auto D = Eigen::Index(dim);
  QFA q;
  q.dim = dim;
  for (std::size_t x = 0; x < k; ++x) {
    std::vector<long> image(dim, -1);
    std::vector<char> hit(dim, 0);
    std::size_t next_reject = d;
    for (std::size_t s = 0; s < d; ++s) {
      int t = dfa.next(s, Symbol(x));
      std::size_t to = t == kUndefined ? next_reject++ : std::size_t(t);
      image[s] = long(to);
      hit[to] = 1;
    }
    std::size_t free_target = 0;
    for (std::size_t src = d; src < dim; ++src) {
      if (image[src] != -1) continue;
      while (hit[free_target]) ++free_target;
      image[src] = long(free_target);
      hit[free_target] = 1;
    }
    CMatrix u = CMatrix::Zero(D, D);
    for (std::size_t src = 0; src < dim; ++src) u(Eigen::Index(image[src]), Eigen::Index(src)) = 1.0;
    q.unitaries.push_back(std::move(u));
  }
  q.accept = CMatrix::Zero(D, D);
  q.neutral = CMatrix::Zero(D, D);
  q.reject = CMatrix::Zero(D, D);
  for (std::size_t s = 0; s < d; ++s) {
    q.neutral(Eigen::Index(s), Eigen::Index(s)) = 1.0;
    if (dfa.accepting[s]) q.accept(Eigen::Index(s), Eigen::Index(s)) = 1.0;
  }
  for (std::size_t s = d; s < dim; ++s) q.reject(Eigen::Index(s), Eigen::Index(s)) = 1.0;
  q.init = CVector::Zero(D);
  q.init(Eigen::Index(dfa.initial)) = 1.0;
  q.validate();
  return q;
}

namespace detail {

inline void require_symbols(const QFA& q, const Word& s) {
  for (Symbol x : s)
    if (x < 0 || std::size_t(x) >= q.alphabet())
      throw std::invalid_argument("symbol " + std::to_string(x) + " outside the QFA alphabet");
}

inline void require_enumerable(const QFA& q, std::size_t n) {
  if (std::pow(double(q.alphabet()), double(n)) > kEnumerationLimit)
    throw std::invalid_argument("|alphabet|^n exceeds the enumeration limit of 1e7");
}

// Sum over strings of length `left` of f(final amplitude vector), walking
// prefixes depth first in symbol order.
template <class F>
void for_each_string(const QFA& q, const CVector& psi, std::size_t left, double prune, F&& f) {
  if (left == 0) {
    f(psi);
    return;
  }
  CVector live = q.neutral * psi;
  if (live.squaredNorm() <= prune) return;
  for (std::size_t s = 0; s < q.alphabet(); ++s) for_each_string(q, q.unitaries[s] * live, left - 1, prune, f);
}

// One step of ρ ↦ Σ_s (U_s N) ρ (U_s N)†.
inline CMatrix transfer_step(const QFA& q, const CMatrix& rho) {
  CMatrix nr = q.neutral * rho * q.neutral;
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& u : q.unitaries) out.noalias() += u * nr * u.adjoint();
  return out;
}

}  // namespace detail

inline double accept_prob(const QFA& q, const Word& s) {
  detail::require_symbols(q, s);
  CVector psi = q.init;
  for (Symbol x : s) psi = q.unitaries[std::size_t(x)] * (q.neutral * psi);
  return (q.accept * psi).squaredNorm();
}

// Σ over Σ^n of accept_prob, by iterating the transfer operator on init·init†.
inline double acceptance_mass(const QFA& q, std::size_t n) {
  CMatrix rho = q.init * q.init.adjoint();
  for (std::size_t i = 0; i < n; ++i) rho = detail::transfer_step(q, rho);
  return std::max(0.0, (q.accept * rho).trace().real());
}

inline double acceptance_mass_enumerated(const QFA& q, std::size_t n) {
  detail::require_enumerable(q, n);
  double total = 0.0;
  detail::for_each_string(q, q.init, n, 0.0, [&](const CVector& psi) { total += (q.accept * psi).squaredNorm(); });
  return total;
}

inline double capacity_finite_n(const QFA& q, std::size_t n) {
  if (n == 0) throw std::invalid_argument("capacity_finite_n: n must be >= 1");
  detail::require_enumerable(q, n);
  return std::pow(acceptance_mass(q, n), 1.0 / double(n));
}

inline double capacity_finite_n_enumerated(const QFA& q, std::size_t n) {
  if (n == 0) throw std::invalid_argument("capacity_finite_n: n must be >= 1");
  if (n > 6) throw std::invalid_argument("capacity_finite_n_enumerated: n must be <= 6");
  return std::pow(acceptance_mass_enumerated(q, n), 1.0 / double(n));
}

inline double growth_rate_nondet(const QFA& q, std::size_t n) {
  if (n == 0) throw std::invalid_argument("growth_rate_nondet: n must be >= 1");
  detail::require_enumerable(q, n);
  std::uint64_t count = 0;
  detail::for_each_string(q, q.init, n, kNonzeroProbability, [&](const CVector& psi) {
    if ((q.accept * psi).squaredNorm() > kNonzeroProbability) ++count;
  });
  return std::pow(double(count), 1.0 / double(n));
}

namespace detail {

// Matrix of ρ ↦ Σ_s (U_s N) ρ (U_s N)† acting on column-major vec(ρ).
inline CMatrix transfer_matrix(const QFA& q) {
  const auto D = Eigen::Index(q.dim);
  CMatrix m = CMatrix::Zero(D * D, D * D);
  for (const auto& u : q.unitaries) {
    CMatrix un = u * q.neutral;
    for (Eigen::Index a = 0; a < D; ++a)
      for (Eigen::Index b = 0; b < D; ++b) {
        cplx cab = std::conj(un(a, b));
        if (cab == cplx(0)) continue;
        m.block(a * D, b * D, D, D) += cab * un;
      }
  }
  return m;
}

inline double spectral_radius(const CMatrix& m) {
  return spectral_radius_of(m);
}

}  // namespace detail

// Exponential rate of acceptance_mass(q, n). The transfer matrix is split into
// strongly connected blocks of its support graph, keeping entries reachable
// from init·init† and entries read by A; the rate is the largest spectral
// radius over those blocks.
inline double capacity_spectral(const QFA& q) {
  const auto D = Eigen::Index(q.dim);
  const CMatrix m = detail::transfer_matrix(q);
  const std::size_t n = std::size_t(D * D);
  const double cut = 1e-13 * std::max(1.0, m.cwiseAbs().maxCoeff());
  std::vector<std::vector<std::size_t>> succ(n), pred(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(m(Eigen::Index(i), Eigen::Index(j))) > cut) {
        succ[j].push_back(i);
        pred[i].push_back(j);
      }
  auto sweep = [&](const std::vector<std::vector<std::size_t>>& adj, std::vector<std::size_t> frontier) {
    std::vector<char> seen(n, 0);
    for (auto v : frontier) seen[v] = 1;
    while (!frontier.empty()) {
      auto v = frontier.back();
      frontier.pop_back();
      for (auto w : adj[v])
        if (!seen[w]) {
          seen[w] = 1;
          frontier.push_back(w);
        }
    }
    return seen;
  };
  const CMatrix rho0 = q.init * q.init.adjoint();
  std::vector<std::size_t> start, target;
  for (Eigen::Index b = 0; b < D; ++b)
    for (Eigen::Index a = 0; a < D; ++a) {
      if (std::abs(rho0(a, b)) > cut) start.push_back(std::size_t(b * D + a));
      if (std::abs(q.accept(b, a)) > cut) target.push_back(std::size_t(b * D + a));
    }
  auto fwd = sweep(succ, start), bwd = sweep(pred, target);
  std::vector<std::size_t> keep, local(n, 0);
  for (std::size_t v = 0; v < n; ++v)
    if (fwd[v] && bwd[v]) {
      local[v] = keep.size();
      keep.push_back(v);
    }
  std::vector<std::vector<std::size_t>> trimmed(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i)
    for (auto w : succ[keep[i]])
      if (fwd[w] && bwd[w]) trimmed[i].push_back(local[w]);
  std::size_t ncomp = 0;
  auto comp = strongly_connected_components(keep.size(), trimmed, &ncomp);
  std::vector<std::vector<std::size_t>> members(ncomp);
  for (std::size_t i = 0; i < keep.size(); ++i) members[std::size_t(comp[i])].push_back(keep[i]);
  double best = 0.0;
  for (const auto& block : members) {
    CMatrix sub(Eigen::Index(block.size()), Eigen::Index(block.size()));
    for (std::size_t r = 0; r < block.size(); ++r)
      for (std::size_t c = 0; c < block.size(); ++c)
        sub(Eigen::Index(r), Eigen::Index(c)) = m(Eigen::Index(block[r]), Eigen::Index(block[c]));
    best = std::max(best, detail::spectral_radius(sub));
  }
  return best;
}

// Largest eigenvalue modulus of Σ_s (U_s N ⊗ conj(U_s N)) compressed to the
// span of the basis pairs e_i ⊗ e_i, with no final A.
inline double capacity_objective_diagonal(const QFA& q) {
  const auto D = Eigen::Index(q.dim);
  CMatrix m = CMatrix::Zero(D, D);
  for (const auto& u : q.unitaries) {
    CMatrix un = u * q.neutral;
    for (Eigen::Index i = 0; i < D; ++i)
      for (Eigen::Index j = 0; j < D; ++j) m(i, j) += un(i, j) * std::conj(un(i, j));
  }
  return spectral_radius_of(m);
}

inline nlohmann::json matrix_to_json(const CMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

inline CMatrix matrix_from_json(const nlohmann::json& j, std::size_t dim) {
  if (!j.is_array() || j.size() != dim) throw std::invalid_argument("QFA JSON: matrix must have dim rows");
  CMatrix m{Eigen::Index(dim), Eigen::Index(dim)};
  for (std::size_t i = 0; i < dim; ++i) {
    if (!j[i].is_array() || j[i].size() != dim) throw std::invalid_argument("QFA JSON: matrix row has wrong length");
    for (std::size_t c = 0; c < dim; ++c) {
      const auto& e = j[i][c];
      if (!e.is_array() || e.size() != 2) throw std::invalid_argument("QFA JSON: entries are [re, im] pairs");
      m(Eigen::Index(i), Eigen::Index(c)) = cplx(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

inline nlohmann::json to_json(const QFA& q) {
  nlohmann::json us = nlohmann::json::array();
  for (const auto& u : q.unitaries) us.push_back(matrix_to_json(u));
  nlohmann::json init = nlohmann::json::array();
  for (Eigen::Index i = 0; i < q.init.size(); ++i) init.push_back({q.init(i).real(), q.init(i).imag()});
  return {{"dim", q.dim},
          {"unitaries", us},
          {"accept", matrix_to_json(q.accept)},
          {"reject", matrix_to_json(q.reject)},
          {"neutral", matrix_to_json(q.neutral)},
          {"init", init}};
}

// Projectors may be given as full matrices or as 0/1 diagonals.
inline QFA qfa_from_json(const nlohmann::json& j) {
  QFA q;
  q.dim = j.at("dim").get<std::size_t>();
  for (const auto& u : j.at("unitaries")) q.unitaries.push_back(matrix_from_json(u, q.dim));
  auto projector = [&](const char* key) {
    const auto& p = j.at(key);
    if (p.is_array() && p.size() == q.dim && !p.empty() && p[0].is_number()) {
      CMatrix m = CMatrix::Zero(Eigen::Index(q.dim), Eigen::Index(q.dim));
      for (std::size_t i = 0; i < q.dim; ++i) m(Eigen::Index(i), Eigen::Index(i)) = p[i].get<double>();
      return m;
    }
    return matrix_from_json(p, q.dim);
  };
  q.accept = projector("accept");
  q.reject = projector("reject");
  q.neutral = projector("neutral");
  const auto& init = j.at("init");
  if (init.size() != q.dim) throw std::invalid_argument("QFA JSON: init has wrong length");
  q.init.resize(Eigen::Index(q.dim));
  for (std::size_t i = 0; i < q.dim; ++i) q.init(Eigen::Index(i)) = cplx(init[i][0].get<double>(), init[i][1].get<double>());
  q.validate();
  return q;
}

}  // namespace graphcap
