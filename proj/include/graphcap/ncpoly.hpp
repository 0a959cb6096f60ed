#pragma once

#include <compare>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace graphcap {

// Exact rational with 64-bit numerator and denominator; arithmetic that leaves
// the 64-bit range throws std::overflow_error.
class Rational {
 public:
  Rational(std::int64_t n = 0, std::int64_t d = 1) { assign(n, d); }

  std::int64_t num() const { return n_; }
  std::int64_t den() const { return d_; }
  bool is_zero() const { return n_ == 0; }
  double to_double() const { return double(n_) / double(d_); }

  std::string str() const { return d_ == 1 ? std::to_string(n_) : std::to_string(n_) + "/" + std::to_string(d_); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return from_wide(__int128(a.n_) * b.d_ + __int128(b.n_) * a.d_, __int128(a.d_) * b.d_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_wide(__int128(a.n_) * b.n_, __int128(a.d_) * b.d_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.n_ == 0) throw std::invalid_argument("rational division by zero");
    return from_wide(__int128(a.n_) * b.d_, __int128(a.d_) * b.n_);
  }
  Rational operator-() const { return from_wide(-__int128(n_), d_); }
  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    return __int128(a.n_) * b.d_ <=> __int128(b.n_) * a.d_;
  }

 private:
  std::int64_t n_ = 0, d_ = 1;

  struct Raw {};
  Rational(Raw, std::int64_t n, std::int64_t d) : n_(n), d_(d) {}

  static __int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static Rational from_wide(__int128 n, __int128 d) {
    if (d == 0) throw std::invalid_argument("rational with zero denominator");
    if (d < 0) n = -n, d = -d;
    __int128 g = gcd128(n, d);
    if (g > 1) n /= g, d /= g;
    constexpr __int128 lo = std::numeric_limits<std::int64_t>::min(), hi = std::numeric_limits<std::int64_t>::max();
    if (n < lo || n > hi || d > hi) throw std::overflow_error("rational coefficient exceeds 64 bits");
    return Rational(Raw{}, std::int64_t(n), n == 0 ? 1 : std::int64_t(d));
  }

  void assign(std::int64_t n, std::int64_t d) { *this = from_wide(n, d); }
};

// a + b i with exact rational parts.
struct CRational {
  Rational re, im;

  CRational(Rational r = 0, Rational i = 0) : re(r), im(i) {}
  CRational(std::int64_t r) : re(r) {}

  static CRational i() { return {0, 1}; }

  bool is_zero() const { return re.is_zero() && im.is_zero(); }
  bool is_real() const { return im.is_zero(); }
  CRational conj() const { return {re, -im}; }
  std::complex<double> to_complex() const { return {re.to_double(), im.to_double()}; }

  friend CRational operator+(const CRational& a, const CRational& b) { return {a.re + b.re, a.im + b.im}; }
  friend CRational operator-(const CRational& a, const CRational& b) { return {a.re - b.re, a.im - b.im}; }
  friend CRational operator*(const CRational& a, const CRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  CRational operator-() const { return {-re, -im}; }
  friend bool operator==(const CRational&, const CRational&) = default;

  std::string str() const {
    if (im.is_zero()) return re.str();
    std::string imag = (im == Rational(1) ? "" : im == Rational(-1) ? "-" : im.str()) + "i";
    if (re.is_zero()) return imag;
    std::string sep = im < Rational(0) ? "" : "+";
    return "(" + re.str() + sep + imag + ")";
  }
};

// One operator symbol. The adjoint flag is kept false on Hermitian variables.
struct Letter {
  std::uint32_t var = 0;
  bool adj = false;
  bool herm = false;

  Letter adjoint() const { return herm ? *this : Letter{var, !adj, herm}; }

  friend bool operator==(const Letter& a, const Letter& b) { return a.var == b.var && a.adj == b.adj; }
  friend std::strong_ordering operator<=>(const Letter& a, const Letter& b) {
    if (auto c = a.var <=> b.var; c != 0) return c;
    return a.adj <=> b.adj;
  }
};

// A word of letters; the empty word is the identity. Ordered by degree, then
// lexicographically.
struct NCMonomial {
  std::vector<Letter> word;

  std::size_t degree() const { return word.size(); }
  bool is_identity() const { return word.empty(); }

  NCMonomial adjoint() const {
    NCMonomial m;
    m.word.reserve(word.size());
    for (auto it = word.rbegin(); it != word.rend(); ++it) m.word.push_back(it->adjoint());
    return m;
  }

  friend NCMonomial operator*(const NCMonomial& a, const NCMonomial& b) {
    NCMonomial m{a.word};
    m.word.insert(m.word.end(), b.word.begin(), b.word.end());
    return m;
  }
  friend bool operator==(const NCMonomial&, const NCMonomial&) = default;
  friend std::strong_ordering operator<=>(const NCMonomial& a, const NCMonomial& b) {
    if (auto c = a.word.size() <=> b.word.size(); c != 0) return c;
    return std::lexicographical_compare_three_way(a.word.begin(), a.word.end(), b.word.begin(), b.word.end());
  }
};

class NCPolynomial {
 public:
  using Terms = std::map<NCMonomial, CRational>;

  NCPolynomial() = default;
  NCPolynomial(CRational c) { add(NCMonomial{}, c); }
  NCPolynomial(std::int64_t c) : NCPolynomial(CRational(c)) {}
  NCPolynomial(Letter l) { add(NCMonomial{{l}}, 1); }
  NCPolynomial(const NCMonomial& m, CRational c = 1) { add(m, c); }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  std::size_t degree() const { return terms_.empty() ? 0 : terms_.rbegin()->first.degree(); }

  CRational coefficient(const NCMonomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? CRational{} : it->second;
  }

  void add(const NCMonomial& m, const CRational& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (inserted) return;
    it->second = it->second + c;
    if (it->second.is_zero()) terms_.erase(it);
  }

  NCPolynomial adjoint() const {
    NCPolynomial out;
    for (const auto& [m, c] : terms_) out.add(m.adjoint(), c.conj());
    return out;
  }

  bool is_hermitian() const { return *this == adjoint(); }

  NCPolynomial hermitian_part() const { return (*this + adjoint()) * CRational(Rational(1, 2)); }
  NCPolynomial antihermitian_part() const { return (*this - adjoint()) * CRational(0, Rational(-1, 2)); }

  // Replaces every letter by a polynomial.
  NCPolynomial substitute(const std::function<NCPolynomial(Letter)>& f) const {
    NCPolynomial out;
    for (const auto& [m, c] : terms_) {
      NCPolynomial term(c);
      for (const Letter& l : m.word) term = term * f(l);
      out += term;
    }
    return out;
  }

  NCPolynomial& operator+=(const NCPolynomial& o) {
    for (const auto& [m, c] : o.terms_) add(m, c);
    return *this;
  }
  NCPolynomial& operator-=(const NCPolynomial& o) {
    for (const auto& [m, c] : o.terms_) add(m, -c);
    return *this;
  }
  friend NCPolynomial operator+(NCPolynomial a, const NCPolynomial& b) { return a += b; }
  friend NCPolynomial operator-(NCPolynomial a, const NCPolynomial& b) { return a -= b; }
  NCPolynomial operator-() const { return *this * CRational(-1); }

  friend NCPolynomial operator*(const NCPolynomial& a, const NCPolynomial& b) {
    NCPolynomial out;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) out.add(ma * mb, ca * cb);
    return out;
  }
  friend NCPolynomial operator*(const NCPolynomial& a, const CRational& s) {
    NCPolynomial out;
    for (const auto& [m, c] : a.terms_) out.add(m, c * s);
    return out;
  }
  friend NCPolynomial operator*(const CRational& s, const NCPolynomial& a) { return a * s; }

  friend bool operator==(const NCPolynomial&, const NCPolynomial&) = default;

 private:
  Terms terms_;
};

inline std::string to_string(const NCMonomial& m, const std::vector<std::string>& names) {
  if (m.is_identity()) return "1";
  std::string s;
  for (std::size_t i = 0; i < m.word.size(); ++i) {
    if (i) s += ' ';
    s += names.at(m.word[i].var);
    if (m.word[i].adj) s += "^*";
  }
  return s;
}

inline std::string to_string(const NCPolynomial& p, const std::vector<std::string>& names) {
  if (p.is_zero()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    std::string coef;
    bool negative = c.is_real() && c.re < Rational(0);
    CRational shown = negative ? -c : c;
    if (!first) s += negative ? " - " : " + ";
    else if (negative) s += "-";
    first = false;
    if (m.is_identity()) coef = shown.str();
    else if (!(shown == CRational(1))) coef = shown.str() + " ";
    s += coef;
    if (!m.is_identity()) s += to_string(m, names);
  }
  return s;
}

// Numeric evaluation with one dim x dim matrix per variable.
inline Eigen::MatrixXcd evaluate(const NCPolynomial& p, const std::vector<Eigen::MatrixXcd>& values, Eigen::Index dim) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  std::vector<Eigen::MatrixXcd> adjoints(values.size());
  for (const auto& [m, c] : p.terms()) {
    Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(dim, dim) * c.to_complex();
    for (const Letter& l : m.word) {
      const Eigen::MatrixXcd& v = values.at(l.var);
      if (v.rows() != dim || v.cols() != dim) throw std::invalid_argument("operator dimension mismatch");
      if (!l.adj) {
        term = term * v;
        continue;
      }
      if (adjoints[l.var].size() == 0) adjoints[l.var] = v.adjoint();
      term = term * adjoints[l.var];
    }
    out += term;
  }
  return out;
}

}  // namespace graphcap
