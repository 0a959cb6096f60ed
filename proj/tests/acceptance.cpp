// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <graphcap/bounds.hpp>
#include <graphcap/code_check.hpp>
#include <graphcap/moment.hpp>
#include <graphcap/npo.hpp>
#include <graphcap/qfa.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace graphcap;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Witness check straight from the confusability definition on coordinates.
bool codewords_independent(int m, const std::vector<Word>& words) {
  Graph g = cycle_graph(std::size_t(m));
  for (std::size_t i = 0; i < words.size(); ++i)
    for (std::size_t j = i + 1; j < words.size(); ++j)
      if (oracle::strings_confusable(g, words[i], words[j])) return false;
  return true;
}

Outcome alpha_criterion(int m, std::size_t n, std::size_t expected, double time_limit) {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  auto r = block_lower_bound(cycle_graph(std::size_t(m)), n);
  double t = seconds_since(t0);
  std::size_t size = r.witness_codewords->size();
  o.require(r.exact, "search not exact");
  o.require(size == expected, "alpha = " + std::to_string(size));
  o.require(codewords_independent(m, *r.witness_codewords), "witness not independent");
  o.require(t < time_limit, "took " + num(t) + " s");
  o.detail = "alpha=" + std::to_string(size) + " witness verified, " + num(t) + " s (limit " + num(time_limit) +
             " s)" + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome growth_values() {
  Outcome o;
  double block = growth_rate(fixture::c5_block());
  double two = growth_rate(fixture::one_state(5, {0, 2}));
  o.require(std::abs(block - std::sqrt(5.0)) <= 1e-9, "block growth " + num(block));
  o.require(std::abs(two - 2.0) <= 1e-12, "{0,2} growth " + num(two));
  o.detail += "block=" + num(block) + " (tol 1e-9), {0,2}=" + num(two) + " (tol 1e-12)";
  return o;
}

Outcome growth_simple_agreement() {
  Outcome o;
  std::mt19937_64 rng(500);
  double worst = 0;
  for (int rep = 0; rep < 500; ++rep) {
    auto m = oracle::random_simplified_dfa(1 + rng() % 8, 1 + rng() % 7, rng, 0.05 + 0.1 * double(rep % 5));
    double a = growth_rate(m), b = growth_rate_simple(SimplifiedDFA::certify(m));
    worst = std::max(worst, std::abs(a - b));
  }
  o.require(worst <= 1e-9, "max difference " + num(worst));
  o.detail += "500 machines, max |difference| " + num(worst) + " (tol 1e-9)";
  return o;
}

Outcome checker_equivalence() {
  Outcome o;
  std::mt19937_64 rng(1000);
  std::size_t compared = 0, disagreements = 0, valid = 0;
  const std::vector<std::size_t> sizes = {3, 5, 7};
  for (int rep = 0; compared < 1000; ++rep) {
    std::size_t k = sizes[std::size_t(rep) % 3];
    Graph g = cycle_graph(k);
    auto m = oracle::random_partial_dfa(1 + rng() % 6, k, 0.15 + 0.1 * double(rep % 4), rng);
    if (!m.accepting[m.initial] && rng() % 2) m.accepting[m.initial] = 1;
    SimplifiedDFA s;
    try {
      s = SimplifiedDFA::certify(m);
    } catch (const std::invalid_argument&) {
      try {
        s = simplify(m);
      } catch (const std::invalid_argument&) {
        continue;  // zero growth: nothing for the flood-fill to check
      }
    }
    bool f = check_code_floodfill(g, s).valid, p = check_code_product(g, s.dfa).valid;
    disagreements += f != p;
    valid += p;
    ++compared;
  }
  Graph c3 = cycle_graph(3);
  std::size_t exhaustive = 0;
  for (std::size_t d = 1; d <= 2; ++d) {
    std::size_t tables = 1;
    for (std::size_t i = 0; i < d * 3; ++i) tables *= d + 1;  // each cell undefined or a state
    for (std::size_t code = 0; code < tables; ++code)
      for (std::size_t init = 0; init < d; ++init) {
        PartialDFA m(d, 3, init);
        std::size_t c = code;
        for (std::size_t s = 0; s < d; ++s)
          for (int x = 0; x < 3; ++x) {
            if (c % (d + 1) != d) m.set(s, x, int(c % (d + 1)));
            c /= d + 1;
          }
        m.accepting[init] = 1;
        SimplifiedDFA s;
        try {
          s = SimplifiedDFA::certify(m);
        } catch (const std::invalid_argument&) {
          continue;
        }
        ++exhaustive;
        bool f = check_code_floodfill(c3, s).valid, p = check_code_product(c3, m).valid;
        disagreements += f != p;
        disagreements += p != oracle::valid_up_to(c3, m, 7);
      }
  }
  o.require(disagreements == 0, std::to_string(disagreements) + " disagreements");
  o.require(valid > 0 && valid < compared, "random sample lacks both verdicts");
  o.detail += std::to_string(compared) + " random (" + std::to_string(valid) + " valid) + " +
              std::to_string(exhaustive) + " exhaustive C3 machines, " + std::to_string(disagreements) +
              " disagreements";
  return o;
}

Outcome reversible_search() {
  Outcome o;
  Graph c5 = cycle_graph(5);
  auto t0 = std::chrono::steady_clock::now();
  auto r = search_reversible(c5, 6, 200000, "c5");
  double t = seconds_since(t0);
  o.require(r.witness_dfa.has_value(), "no machine returned");
  if (!r.witness_dfa) return o;
  const auto& m = *r.witness_dfa;
  double g = growth_rate(m);
  o.require(m.d <= 6, "too many states");
  o.require(is_reversible(m), "not reversible");
  o.require(check_code_product(c5, m).valid, "not a valid code");
  o.require(g >= std::sqrt(5.0) - 1e-9, "growth " + num(g));
  o.detail += "d=" + std::to_string(m.d) + " growth=" + num(g) + " (>= sqrt5 - 1e-9), search " +
              (r.exact ? "complete" : "budgeted at 200000 nodes") + ", " + num(t) + " s";
  return o;
}

Outcome rewind_and_calculators() {
  Outcome o;
  Graph c5 = cycle_graph(5);
  auto m = rewind_dfa(c5, fixture::c5_code());
  double g = growth_rate(m), cube = std::cbrt(5.0);
  double eq8 = rev_lower_bound(5, std::sqrt(5.0)), eq9 = shannon_upper_from_rev(std::sqrt(5.0), 5);
  o.require(is_reversible(m), "not reversible");
  o.require(check_code_product(c5, m).valid, "not valid");
  o.require(std::abs(g - cube) <= 1e-9, "growth " + num(g));
  o.require(std::abs(eq8 - cube) <= 1e-9, "lower-bound calculator " + num(eq8));
  o.require(std::abs(eq9 - 5.0) <= 1e-12, "upper-bound calculator " + num(eq9));
  o.detail += "rewind growth=" + num(g) + ", lower=" + num(eq8) + " (tol 1e-9), upper=" + num(eq9) + " (tol 1e-12)";
  return o;
}

CMatrix random_unitary(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  CMatrix z{Eigen::Index(dim), Eigen::Index(dim)};
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = cplx(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<CMatrix> qr(z);
  return qr.householderQ() * CMatrix::Identity(z.rows(), z.cols());
}

Outcome qfa_embedding() {
  Outcome o;
  Graph c5 = cycle_graph(5);
  std::vector<PartialDFA> machines = {fixture::one_state(5, {0, 2}), fixture::c5_block(),
                                      fixture::c7_fixture().machine, rewind_dfa(c5, fixture::c5_code())};
  for (const char* name : {"c5_two.dfa", "c5_zero_one.dfa", "c5block.dfa", "c7_follower.dfa"}) {
    std::ifstream in(std::string(GRAPHCAP_FIXTURE_DIR) + "/" + name);
    machines.push_back(read_dfa(in));
  }
  double worst_spectral = 0;
  for (const auto& m : machines)
    worst_spectral = std::max(worst_spectral, std::abs(capacity_spectral(from_reversible_dfa(m)) - growth_rate(m)));
  std::mt19937_64 rng(50);
  double worst_finite = 0;
  for (int rep = 0; rep < 50; ++rep) {
    QFA q;
    q.dim = 2;
    for (int s = 0; s < 2 + rep % 2; ++s) q.unitaries.push_back(random_unitary(2, rng));
    CMatrix basis = random_unitary(2, rng);
    q.accept = basis.col(0) * basis.col(0).adjoint();
    q.neutral = basis.col(1) * basis.col(1).adjoint();
    q.reject = CMatrix::Zero(2, 2);
    q.init = random_unitary(2, rng).col(0);
    q.validate();
    for (std::size_t n = 1; n <= 5; ++n)
      worst_finite = std::max(worst_finite, std::abs(capacity_finite_n(q, n) - capacity_finite_n_enumerated(q, n)));
  }
  o.require(worst_spectral <= 1e-9, "spectral vs growth " + num(worst_spectral));
  o.require(worst_finite <= 1e-10, "transfer vs enumeration " + num(worst_finite));
  o.detail += std::to_string(machines.size()) + " reversible fixtures max diff " + num(worst_spectral) +
              " (tol 1e-9); 50 random qubit QFAs n<=5 max diff " + num(worst_finite) + " (tol 1e-10)";
  return o;
}

CMatrix random_complex(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = {g(rng), g(rng)};
  return m;
}

Outcome hermitization() {
  Outcome o;
  NCProblem p;
  p.add_variable("X", false);
  p.add_variable("Y", false);
  p.equalities.push_back({"g", "xy", p.var("X") * p.var("Y")});
  auto q = hermitize(p);
  const CRational half(Rational(1, 2)), i = CRational::i();
  NCPolynomial xh = q.var("X_h"), xa = q.var("X_a"), yh = q.var("Y_h"), ya = q.var("Y_a");
  NCPolynomial h = half * ((xh * yh + yh * xh) - (xa * ya + ya * xa) + i * (xh * ya - ya * xh) + i * (xa * yh - yh * xa));
  NCPolynomial a = half * ((xh * ya + ya * xh) + (xa * yh + yh * xa) - i * (xh * yh - yh * xh) + i * (xa * ya - ya * xa));
  o.require(q.equalities.size() == 2 && q.equalities[0].poly == h && q.equalities[1].poly == a,
            "symbolic parts differ from the product rule");
  std::mt19937_64 rng(200);
  double worst = 0;
  for (int rep = 0; rep < 200; ++rep) {
    CMatrix x = random_complex(rng, 4), y = random_complex(rng, 4);
    auto vals = hermitize_assignment({4, {{"X", x}, {"Y", y}}}, q).ordered(q);
    CMatrix xy = x * y;
    worst = std::max(worst, (evaluate(h, vals, 4) - (xy + xy.adjoint()) / 2.0).cwiseAbs().maxCoeff());
    worst = std::max(worst, (evaluate(a, vals, 4) - (xy - xy.adjoint()) / cplx(0, 2)).cwiseAbs().maxCoeff());
  }
  o.require(worst <= 1e-10, "identity residual " + num(worst));
  std::size_t checked = 0;
  bool counts = true;
  for (const Graph& g : {cycle_graph(3), cycle_graph(5), complete_graph(4)})
    for (auto variant : {NpoVariant::direct, NpoVariant::conjugation}) {
      auto src = build_capacity_problem(g, {variant});
      src.objective = src.var("D") * src.var(operator_name(src.metadata.at("prefix"), 0, 0)) * src.var("D");
      auto out = hermitize(src);
      counts &= out.variables.size() <= 2 * src.variables.size() + 1;
      counts &= out.constraint_count() <= 2 * src.constraint_count() + 2;
      ++checked;
    }
  o.require(counts, "count bound violated");
  o.detail += "200 pairs max entry residual " + num(worst) + " (tol 1e-10); counts within 2n+1/2c+2 on " +
              std::to_string(checked) + " problems";
  return o;
}

Outcome eigen_gadget_directions() {
  Outcome o;
  std::mt19937_64 rng(10);
  NCProblem base;
  base.add_variable("X", false);
  double worst = 0;
  int shifted = 0;
  for (int inst = 0; inst < 10; ++inst) {
    const int n = 2 + inst % 3;
    std::uniform_real_distribution<double> u(-3, 3);
    std::vector<double> eig;
    for (int i = 0; i < n; ++i) eig.push_back(inst == 0 ? u(rng) - 4.0 : u(rng));
    double top = *std::max_element(eig.begin(), eig.end());
    double k = top < 0 ? std::ceil(-top * 4 + 1) / 4 : 0.0;
    shifted += k > 0;
    std::normal_distribution<double> g;
    Eigen::MatrixXd v(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) v(i, j) = g(rng);
    v += 3 * Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(eig.data(), n);
    Eigen::MatrixXd mr = v * d.asDiagonal() * v.inverse();
    CMatrix m = mr.cast<cplx>();
    auto gadget = eigen_gadget(base, base.var("X"), k);

    Eigen::EigenSolver<Eigen::MatrixXd> es(mr + k * Eigen::MatrixXd::Identity(n, n));
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < n; ++j)
      if (es.eigenvalues()(j).real() > es.eigenvalues()(best).real()) best = j;
    double lambda = es.eigenvalues()(best).real();
    CMatrix w = es.eigenvectors().col(best).normalized();
    auto forward = verify_assignment(gadget, {std::size_t(n), {{"X", m}, {"P", lambda * w * w.adjoint()}}});
    worst = std::max({worst, forward.max_equality_residual / (1 + m.norm()),
                      std::abs(unshift(gadget, forward.objective_value) - top)});

    for (Eigen::Index j = 0; j < n; ++j) {
      double lj = es.eigenvalues()(j).real();
      if (lj <= 1e-6) continue;
      CMatrix wj = es.eigenvectors().col(j).normalized();
      CMatrix pj = lj * wj * wj.adjoint();
      auto back = verify_assignment(gadget, {std::size_t(n), {{"X", m}, {"P", pj}}});
      Eigen::SelfAdjointEigenSolver<CMatrix> ps(pj);
      CMatrix pv = ps.eigenvectors().col(n - 1);
      double pl = ps.eigenvalues()(n - 1);
      CMatrix shifted_m = m + k * CMatrix::Identity(n, n);
      worst = std::max({worst, back.max_equality_residual / (1 + m.norm()),
                        (shifted_m * pv - pl * pv).norm() / (1 + m.norm()), std::abs(pl - lj)});
    }
  }
  o.require(worst <= 1e-9, "residual " + num(worst));
  o.require(shifted >= 1, "no instance needed a shift");
  o.detail += "10 instances (" + std::to_string(shifted) + " shifted), max residual " + num(worst) + " (tol 1e-9)";
  return o;
}

Outcome builder_and_embedding() {
  Outcome o;
  Graph c5 = cycle_graph(5);
  auto p = build_capacity_problem(c5);
  o.require(p.variables.size() == 38, std::to_string(p.variables.size()) + " variables");
  auto a = tensor_embedding(c5, fixture::c5_block(), p.metadata.at("prefix"));
  auto r = verify_assignment(p, a);
  o.require(r.max_equality_residual <= 1e-9, "equality residual " + num(r.max_equality_residual));
  o.require(r.min_psd_eigenvalue >= -1e-9, "psd residual " + num(r.min_psd_eigenvalue));
  auto h = hermitize(p);
  auto ha = hermitize_assignment(a, h);
  auto sdp = npa_moment_matrix(h, 1);
  auto f = check_moment_point(sdp, moments_from_assignment(sdp, h, ha, top_objective_state(h, ha)));
  o.require(f.max_linear_residual <= 1e-8, "moment linear residual " + num(f.max_linear_residual));
  o.require(f.min_block_eigenvalue >= -1e-8, "moment block eigenvalue " + num(f.min_block_eigenvalue));
  o.detail += "38 variables; embedding residual " + num(r.max_equality_residual) + " (tol 1e-9), objective " +
              num(r.objective_value) + "; level-1 linear " + num(f.max_linear_residual) + " (tol 1e-8), min eig " +
              num(f.min_block_eigenvalue) + " (tol -1e-8)";
  return o;
}

Outcome sdpa_round_trip() {
  Outcome o;
  std::vector<std::pair<std::string, MomentSDP>> cases;
  cases.emplace_back("C3 level 1", npa_moment_matrix(hermitize(build_capacity_problem(cycle_graph(3))), 1));
  cases.emplace_back("C5 level 1", npa_moment_matrix(hermitize(build_capacity_problem(cycle_graph(5))), 1));
  cases.emplace_back("C5 conjugation level 1",
                     npa_moment_matrix(hermitize(build_capacity_problem(cycle_graph(5), {NpoVariant::conjugation})), 1));
  cases.emplace_back("C3 level 2", npa_moment_matrix(hermitize(build_capacity_problem(cycle_graph(3))), 2));
  NCProblem base;
  base.add_variable("X", false);
  cases.emplace_back("gadget level 2", npa_moment_matrix(hermitize(eigen_gadget(base, base.var("X"), 1.5)), 2));
  for (const auto& [label, sdp] : cases) {
    auto ex = to_sdpa(sdp);
    std::ostringstream first;
    write_sdpa(first, ex.sdpa);
    std::istringstream in(first.str());
    SdpaProblem back = read_sdpa(in);
    std::ostringstream second;
    write_sdpa(second, back);
    o.require(back == ex.sdpa && first.str() == second.str(), label + " round trip differs");
  }
  SdpaProblem minimal;
  minimal.m = 1;
  minimal.blocks = {1};
  minimal.c = {1};
  minimal.entries = {{0, 1, 1, 1, 1}, {1, 1, 1, 1, 1}};
  std::ostringstream os;
  write_sdpa(os, minimal);
  std::ifstream golden_in(std::string(GRAPHCAP_FIXTURE_DIR) + "/minimal.dat-s", std::ios::binary);
  std::stringstream golden;
  golden << golden_in.rdbuf();
  o.require(os.str() == golden.str(), "minimal fixture differs from golden file");
  o.detail += std::to_string(cases.size()) + " relaxations round-trip exactly; minimal golden byte-exact";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"alpha C5^2 = 5 under 1 s", [] { return alpha_criterion(5, 2, 5, 1.0); }},
      {"alpha C7^2 = 10 under 10 s", [] { return alpha_criterion(7, 2, 10, 10.0); }},
      {"alpha C7^3 = 33 within 30 min [long]", [] { return alpha_criterion(7, 3, 33, 1800.0); }},
      {"growth of C5 block code and {0,2} machine", growth_values},
      {"simplified growth agrees on 500 random machines", growth_simple_agreement},
      {"flood-fill and product checkers agree", checker_equivalence},
      {"reversible C5 certificate with 6 states", reversible_search},
      {"rewind construction and bound calculators", rewind_and_calculators},
      {"QFA embedding and finite-n agreement", qfa_embedding},
      {"hermitianization faithfulness and counts", hermitization},
      {"eigenvalue gadget in both directions", eigen_gadget_directions},
      {"C5 builder, embedding and level-1 moment point", builder_and_embedding},
      {"SDPA round trip and minimal golden file", sdpa_round_trip},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    failures += !out.pass;
    std::cout << (out.pass ? "PASS" : "FAIL") << " [" << (i + 1 < 10 ? "0" : "") << i + 1 << "] " << criteria[i].first
              << ": " << out.detail << std::endl;
  }
  std::cout << criteria.size() - std::size_t(failures) << "/" << criteria.size() << " criteria passed\n";
  return failures ? 1 : 0;
}
