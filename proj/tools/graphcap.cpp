#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include <graphcap/bounds.hpp>
#include <graphcap/code_check.hpp>
#include <graphcap/moment.hpp>
#include <graphcap/npo.hpp>
#include <graphcap/qfa.hpp>

using namespace graphcap;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kInvalidInput = 1, kBudgetExhausted = 2, kCheckerDisagreement = 3;

struct Options {
  std::string graph = "c5";
  std::string dfa_path, qfa_path, out_path, dump_path, codewords;
  std::size_t power = 2, states = 6, n = 0, random_dim = 0, random_symbols = 2;
  int level = 1;
  std::uint64_t seed = 0;
  std::uint64_t budget = 0;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  double graph_size = 0, theta = 0, theta_rev = 0, epsilon = 0;
  std::string variant = "direct", rejection = "corrected";
  bool redundant_swap = false;
};

constexpr std::uint64_t kSearchBudget = 200000;

std::uint64_t default_budget(std::uint64_t fallback) {
  const char* env = std::getenv("GRAPHCAP_BUDGET");
  if (!env || !*env) return fallback;
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(env, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != std::string(env).size() || v == 0) throw std::invalid_argument("GRAPHCAP_BUDGET must be a positive integer");
  return v;
}

Graph load_graph(const std::string& spec) {
  if (std::filesystem::is_regular_file(spec)) {
    std::ifstream in(spec);
    return read_graph(in);
  }
  return named_graph(spec);
}

PartialDFA load_dfa(const std::string& path) {
  if (path.empty()) throw std::invalid_argument("--dfa is required");
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open DFA file " + path);
  return read_dfa(in);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

NpoVariant parse_variant(const std::string& s) {
  if (s == "direct") return NpoVariant::direct;
  if (s == "conjugation") return NpoVariant::conjugation;
  throw std::invalid_argument("unknown variant '" + s + "'");
}

RejectionForm parse_rejection(const std::string& s) {
  if (s == "corrected") return RejectionForm::corrected;
  if (s == "literal") return RejectionForm::literal;
  throw std::invalid_argument("unknown rejection form '" + s + "'");
}

CapacityOptions capacity_options(const Options& o) {
  return {parse_variant(o.variant), parse_rejection(o.rejection), o.redundant_swap};
}

json verdict_json(const CodeVerdict& v) {
  json j = {{"valid", v.valid}, {"witness_a", nullptr}, {"witness_b", nullptr}};
  if (v.witness) {
    j["witness_a"] = format_word(v.witness->first);
    j["witness_b"] = format_word(v.witness->second);
  }
  return j;
}

QFA random_qfa(std::size_t dim, std::size_t symbols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  const auto D = Eigen::Index(dim);
  QFA q;
  q.dim = dim;
  for (std::size_t s = 0; s < symbols; ++s) {
    CMatrix z(D, D);
    for (Eigen::Index i = 0; i < D; ++i)
      for (Eigen::Index j = 0; j < D; ++j) z(i, j) = {g(rng), g(rng)};
    Eigen::HouseholderQR<CMatrix> qr(z);
    q.unitaries.push_back(qr.householderQ() * CMatrix::Identity(D, D));
  }
  q.accept = CMatrix::Zero(D, D);
  q.reject = CMatrix::Zero(D, D);
  q.neutral = CMatrix::Identity(D, D);
  q.accept(0, 0) = 1;
  q.neutral(0, 0) = 0;
  if (dim > 1) {
    q.reject(D - 1, D - 1) = 1;
    q.neutral(D - 1, D - 1) = 0;
  }
  q.init = CVector::Zero(D);
  q.init(dim > 2 ? 1 : 0) = 1;
  q.validate();
  return q;
}

int run_alpha(const Options& o, json& out) {
  Graph g = load_graph(o.graph);
  auto r = block_lower_bound(g, o.power, o.budget, o.graph);
  std::size_t alpha = r.witness_codewords ? r.witness_codewords->size() : 0;
  out = {{"graph", o.graph}, {"power", o.power}, {"alpha", alpha}, {"root", r.value},
         {"exact", r.exact}, {"work", r.budget_used}, {"witness", to_json(r)["witness_codewords"]}};
  std::cerr << "alpha(" << o.graph << "^" << o.power << ") " << (r.exact ? "= " : ">= ") << alpha << "\n";
  return r.exact ? kOk : kBudgetExhausted;
}

int run_growth(const Options& o, json& out) {
  PartialDFA m = load_dfa(o.dfa_path);
  out = {{"states", m.d}, {"symbols", m.k}, {"growth", growth_rate(m)}, {"reversible", is_reversible(m)}};
  if (o.n > 0) out["word_counts"] = word_counts(m, o.n);
  return kOk;
}

int run_check(const Options& o, json& out) {
  Graph g = load_graph(o.graph);
  PartialDFA m = load_dfa(o.dfa_path);
  CodeVerdict product = check_code_product(g, m);
  out = verdict_json(product);
  std::optional<SimplifiedDFA> simplified;
  try {
    simplified = SimplifiedDFA::certify(m);
    out["floodfill_input"] = "as_given";
  } catch (const std::invalid_argument&) {
    simplified = simplify(m);
    out["floodfill_input"] = "simplified";
  }
  CodeVerdict flood = check_code_floodfill(g, *simplified);
  CodeVerdict product_simplified = check_code_product(g, simplified->dfa);
  bool agree = flood.valid == product_simplified.valid;
  out["floodfill_valid"] = flood.valid;
  out["checkers_agree"] = agree;
  std::cerr << "code " << (product.valid ? "valid" : "invalid") << "; checkers " << (agree ? "agree" : "DISAGREE")
            << "\n";
  return agree ? kOk : kCheckerDisagreement;
}

int run_simplify(const Options& o, json& out) {
  PartialDFA m = load_dfa(o.dfa_path);
  SimplifiedDFA s = simplify(m);
  out = {{"states_before", m.d}, {"states_after", s.dfa.d}, {"growth_before", growth_rate(m)},
         {"growth_after", growth_rate_simple(s)}, {"dfa", dfa_to_json(s.dfa)}};
  if (!o.out_path.empty()) {
    std::ostringstream os;
    write_dfa(os, s.dfa);
    write_text(o.out_path, os.str());
    out["out"] = o.out_path;
  }
  return kOk;
}

int run_search_rev(const Options& o, json& out) {
  Graph g = load_graph(o.graph);
  auto r = search_reversible(g, o.states, o.budget, o.graph);
  out = to_json(r);
  if (r.witness_dfa && !o.out_path.empty()) {
    std::ostringstream os;
    write_dfa(os, *r.witness_dfa);
    write_text(o.out_path, os.str());
    out["out"] = o.out_path;
  }
  std::cerr << "best reversible growth with " << o.states << " states: " << r.value << "\n";
  return r.exact ? kOk : kBudgetExhausted;
}

int run_rewind(const Options& o, json& out) {
  Graph g = load_graph(o.graph);
  std::vector<Word> words;
  if (!o.codewords.empty()) {
    std::stringstream ss(o.codewords);
    for (std::string w; std::getline(ss, w, ';');)
      if (!w.empty()) words.push_back(parse_word(w));
  } else {
    auto r = block_lower_bound(g, o.power, o.budget, o.graph);
    words = *r.witness_codewords;
  }
  PartialDFA m = rewind_dfa(g, words);
  out = {{"codewords", words.size()}, {"states", m.d}, {"growth", growth_rate(m)}, {"reversible", is_reversible(m)},
         {"valid", check_code_product(g, m).valid}};
  if (!o.out_path.empty()) {
    std::ostringstream os;
    write_dfa(os, m);
    write_text(o.out_path, os.str());
    out["out"] = o.out_path;
  }
  return kOk;
}

int run_bounds(const Options& o, json& out) {
  if (o.graph_size <= 0) throw std::invalid_argument("--graph-size is required");
  out = {{"graph_size", o.graph_size}};
  if (o.theta > 0) out["theta_rev_lower"] = rev_lower_bound(o.graph_size, o.theta);
  if (o.theta_rev > 0) out["theta_upper_from_rev"] = shannon_upper_from_rev(o.theta_rev, o.graph_size);
  if (o.epsilon > 0) out["required_join_size"] = required_join_size(std::size_t(o.graph_size), o.epsilon);
  if (out.size() == 1) throw std::invalid_argument("give at least one of --theta, --theta-rev, --epsilon");
  return kOk;
}

int run_sat_export(const Options& o, json& out) {
  if (o.out_path.empty()) throw std::invalid_argument("--out is required");
  Graph g = load_graph(o.graph);
  Cnf cnf = search_cnf(g, o.states);
  std::ostringstream os;
  write_dimacs(os, cnf);
  write_text(o.out_path, os.str());
  out = {{"variables", cnf.vars}, {"clauses", cnf.clauses.size()}, {"out", o.out_path}};
  return kOk;
}

int run_qfa_capacity(const Options& o, json& out) {
  QFA q;
  std::string source;
  if (!o.qfa_path.empty()) {
    std::ifstream in(o.qfa_path);
    if (!in) throw std::invalid_argument("cannot open QFA file " + o.qfa_path);
    q = qfa_from_json(json::parse(in));
    source = o.qfa_path;
  } else if (!o.dfa_path.empty()) {
    q = from_reversible_dfa(load_dfa(o.dfa_path));
    source = o.dfa_path;
  } else if (o.random_dim > 0) {
    q = random_qfa(o.random_dim, o.random_symbols, o.seed);
    source = "random";
  } else {
    throw std::invalid_argument("give --qfa, --dfa or --random");
  }
  out = {{"source", source},
         {"dim", q.dim},
         {"symbols", q.alphabet()},
         {"capacity_spectral", capacity_spectral(q)},
         {"capacity_objective_diagonal", capacity_objective_diagonal(q)}};
  if (o.n > 0) {
    json finite = json::array();
    for (std::size_t i = 1; i <= o.n; ++i) finite.push_back(capacity_finite_n(q, i));
    out["capacity_finite_n"] = finite;
  }
  return kOk;
}

int run_npo_export(const Options& o, json& out) {
  if (o.out_path.empty()) throw std::invalid_argument("--out is required");
  Graph g = load_graph(o.graph);
  NCProblem p = build_capacity_problem(g, capacity_options(o));
  NCProblem h = hermitize(p);
  MomentSDP sdp = npa_moment_matrix(h, o.level);
  SdpaExport ex = to_sdpa(sdp);
  export_sdpa(ex.sdpa, o.out_path);
  if (!o.dump_path.empty()) write_text(o.dump_path, problem_text(p));
  out = {{"graph", o.graph},
         {"variables", p.variables.size()},
         {"constraints", p.constraint_count()},
         {"hermitian_variables", h.variables.size()},
         {"hermitian_constraints", h.constraint_count()},
         {"level", o.level},
         {"basis_size", sdp.basis.size()},
         {"moments", sdp.moments.size()},
         {"moment_equalities", sdp.equalities.size()},
         {"blocks", sdp.blocks.size()},
         {"sdpa_m", ex.sdpa.m},
         {"warnings", sdp.warnings},
         {"out", o.out_path}};
  if (!sdp.warnings.empty()) std::cerr << sdp.warnings.size() << " constraints exceed the relaxation level (see warnings)\n";
  return kOk;
}

int run_verify_embedding(const Options& o, json& out) {
  Graph g = load_graph(o.graph);
  PartialDFA m = load_dfa(o.dfa_path);
  NCProblem p = build_capacity_problem(g, capacity_options(o));
  OperatorAssignment a = tensor_embedding(g, m, p.metadata.at("prefix"));
  VerificationReport r = verify_assignment(p, a);
  CapacityReadout c = capacity_readout(p, a);
  json groups = json::object();
  for (const auto& [k, v] : r.group_residuals) groups[k] = v;
  out = {{"dimension", a.dim},
         {"max_equality_residual", r.max_equality_residual},
         {"worst_equality", r.worst_equality},
         {"min_psd_eigenvalue", std::isfinite(r.min_psd_eigenvalue) ? json(r.min_psd_eigenvalue) : json(nullptr)},
         {"worst_psd", r.worst_psd},
         {"objective", r.objective_value},
         {"readout_diagonal", c.diagonal},
         {"readout_pair_space", c.pair_space},
         {"readout_pair_root", c.pair_root},
         {"group_residuals", groups},
         {"satisfied", r.max_equality_residual <= 1e-9 && r.min_psd_eigenvalue >= -1e-9}};
  if (o.level > 0) {
    NCProblem h = hermitize(p);
    OperatorAssignment ha = hermitize_assignment(a, h);
    MomentSDP sdp = npa_moment_matrix(h, o.level);
    auto f = check_moment_point(sdp, moments_from_assignment(sdp, h, ha, top_objective_state(h, ha)));
    out["moment"] = {{"level", o.level},
                     {"max_linear_residual", f.max_linear_residual},
                     {"min_block_eigenvalue", f.min_block_eigenvalue},
                     {"objective", f.objective},
                     {"feasible", f.max_linear_residual <= 1e-8 && f.min_block_eigenvalue >= -1e-8}};
  }
  std::cerr << "embedding residual " << r.max_equality_residual << ", objective " << r.objective_value << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"graphcap: zero-error capacity bounds from codes, automata and polynomial optimization"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", o.seed, "Seed for randomized internals")->capture_default_str();
  app.add_option("--threads", o.threads, "Worker cap")->check(CLI::PositiveNumber);
  std::optional<std::uint64_t> budget;
  app.add_option("--budget", budget, "Search budget (overrides GRAPHCAP_BUDGET)")->check(CLI::PositiveNumber);

  auto graph_opt = [&](CLI::App* s) { s->add_option("--graph", o.graph, "Named graph (c5, k3, e4, prodpow:c5:2) or file")->capture_default_str(); };
  auto dfa_opt = [&](CLI::App* s, bool required) {
    auto* opt = s->add_option("--dfa", o.dfa_path, "DFA file");
    if (required) opt->required();
  };
  auto npo_opts = [&](CLI::App* s) {
    s->add_option("--variant", o.variant, "direct or conjugation")->capture_default_str();
    s->add_option("--rejection", o.rejection, "corrected or literal")->capture_default_str();
    s->add_flag("--redundant-swap", o.redundant_swap, "Add the redundant swap-product constraints");
  };

  std::map<std::string, int (*)(const Options&, json&)> handlers;
  auto sub = [&](const char* name, const char* help, int (*fn)(const Options&, json&)) {
    handlers[name] = fn;
    return app.add_subcommand(name, help);
  };

  auto* alpha = sub("alpha", "Independence number of a strong power", run_alpha);
  graph_opt(alpha);
  alpha->add_option("--power", o.power, "Strong power n")->check(CLI::Range(1, 8))->capture_default_str();

  auto* growth = sub("growth", "Growth rate of a DFA language", run_growth);
  dfa_opt(growth, true);
  growth->add_option("--words", o.n, "Also report word counts up to this length")->check(CLI::Range(0, 64));

  auto* check = sub("check", "Zero-error validity of a DFA code, cross-checked", run_check);
  graph_opt(check);
  dfa_opt(check, true);

  auto* simp = sub("simplify", "Reduce a DFA to a single strongly connected component", run_simplify);
  dfa_opt(simp, true);
  simp->add_option("--out", o.out_path, "Write the simplified DFA here");

  auto* search = sub("search-rev", "Search reversible codes with at most d states", run_search_rev);
  graph_opt(search);
  search->add_option("--states", o.states, "Maximum number of states d")->check(CLI::Range(1, 64))->capture_default_str();
  search->add_option("--out", o.out_path, "Write the best machine here");

  auto* rewind = sub("rewind", "Reversible machine from a block code", run_rewind);
  graph_opt(rewind);
  rewind->add_option("--codewords", o.codewords, "Codewords separated by ';' (default: optimal code of --power)");
  rewind->add_option("--power", o.power, "Block length used when no codewords are given")->check(CLI::Range(1, 8));
  rewind->add_option("--out", o.out_path, "Write the machine here");

  auto* bounds = sub("bounds", "Closed-form bound calculator", run_bounds);
  bounds->add_option("--graph-size", o.graph_size, "Number of vertices")->required()->check(CLI::Range(1.0, 1e9));
  bounds->add_option("--theta", o.theta, "Shannon capacity, for the reversible lower bound");
  bounds->add_option("--theta-rev", o.theta_rev, "Reversible capacity, for the Shannon upper bound");
  bounds->add_option("--epsilon", o.epsilon, "Target gap, for the required join size");

  auto* sat = sub("sat-export", "DIMACS encoding of the reversible code search", run_sat_export);
  graph_opt(sat);
  sat->add_option("--states", o.states, "Number of states d")->check(CLI::Range(1, 64))->capture_default_str();
  sat->add_option("--out", o.out_path, "CNF output path")->required();

  auto* qfa = sub("qfa-capacity", "Capacity of a measure-many QFA", run_qfa_capacity);
  qfa->add_option("--qfa", o.qfa_path, "QFA JSON file");
  dfa_opt(qfa, false);
  qfa->add_option("--random", o.random_dim, "Random QFA of this dimension (seeded by --seed)")->check(CLI::Range(1, 64));
  qfa->add_option("--symbols", o.random_symbols, "Alphabet size of the random QFA")->check(CLI::Range(1, 16));
  qfa->add_option("--finite", o.n, "Also report finite-n capacities up to n")->check(CLI::Range(0, 12));

  auto* npo = sub("npo-export", "Moment relaxation of the capacity problem in SDPA format", run_npo_export);
  graph_opt(npo);
  npo->add_option("--level", o.level, "Relaxation level")->check(CLI::Range(1, 3))->capture_default_str();
  npo->add_option("--out", o.out_path, "SDPA output path")->required();
  npo->add_option("--dump", o.dump_path, "Write the polynomial problem as text");
  npo_opts(npo);

  auto* verify = sub("verify-embedding", "Check a reversible code's operator embedding", run_verify_embedding);
  graph_opt(verify);
  dfa_opt(verify, true);
  o.level = 0;
  verify->add_option("--level", o.level, "Also check the induced moment point at this level")->check(CLI::Range(0, 2));
  npo_opts(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInvalidInput;
  }
  if (npo->parsed() && o.level == 0) o.level = 1;

  json out;
  try {
    o.budget = budget ? *budget : default_budget(search->parsed() ? kSearchBudget : kUnlimited);
    int status = kInvalidInput;
    for (auto* s : app.get_subcommands()) status = handlers.at(s->get_name())(o, out);
    std::cout << out.dump(2) << "\n";
    return status;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidInput;
  }
}
