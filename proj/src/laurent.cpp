#include "amoebalab/laurent.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "amoebalab/roots.hpp"

namespace amoebalab {

namespace {

using cd = std::complex<double>;

cd powi(cd z, int e) {
  if (e == 0) return cd(1.0);
  bool neg = e < 0;
  unsigned long long n = neg ? -static_cast<long long>(e) : e;
  cd base = z, acc(1.0);
  while (n) {
    if (n & 1ULL) acc *= base;
    base *= base;
    n >>= 1ULL;
  }
  return neg ? cd(1.0) / acc : acc;
}

struct Lexer {
  const std::string& s;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eof() {
    skip_ws();
    return pos >= s.size();
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }
  bool accept(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) {
    throw std::invalid_argument("parse_laurent: " + what + " at position " +
                                std::to_string(pos));
  }

  double number() {
    skip_ws();
    std::size_t start = pos;
    while (pos < s.size() &&
           (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.')) {
      ++pos;
    }
    if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
      std::size_t mark = pos++;
      if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
      if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      } else {
        pos = mark;  // not an exponent suffix
      }
    }
    if (pos == start) fail("expected a number");
    try {
      return std::stod(s.substr(start, pos - start));
    } catch (const std::exception&) {
      fail("malformed number '" + s.substr(start, pos - start) + "'");
    }
  }

  int integer() {
    skip_ws();
    bool neg = accept('-');
    if (!neg) accept('+');
    skip_ws();
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start) fail("expected an integer exponent");
    if (pos < s.size() && s[pos] == '.') fail("non-integer exponent");
    long v = std::stol(s.substr(start, pos - start));
    return static_cast<int>(neg ? -v : v);
  }
};

}  // namespace

void LaurentPolynomial::add_term(const ExponentVector& exp, cd coef) {
  if (static_cast<int>(exp.size()) != m_)
    throw std::invalid_argument("LaurentPolynomial: exponent length does not match dimension");
  auto it = terms_.find(exp);
  if (it == terms_.end()) {
    if (coef != cd(0.0)) terms_.emplace(exp, coef);
    return;
  }
  it->second += coef;
  if (it->second == cd(0.0)) terms_.erase(it);
}

void LaurentPolynomial::finalize() const {
  if (terms_.empty())
    throw std::invalid_argument("LaurentPolynomial: empty after combining like terms");
}

double LaurentPolynomial::coefficient_scale() const {
  double s = 0.0;
  for (const auto& [e, c] : terms_) s = std::max(s, std::abs(c));
  return s;
}

LaurentPolynomial parse_laurent(const std::string& text, int m) {
  if (m < 1) throw std::invalid_argument("parse_laurent: dimension must be >= 1");
  LaurentPolynomial F(m);
  Lexer lex{text};

  bool first = true;
  while (!lex.eof()) {
    double sign = 1.0;
    if (lex.accept('+')) {
      sign = 1.0;
    } else if (lex.accept('-')) {
      sign = -1.0;
    } else if (!first) {
      lex.fail("expected '+' or '-' between terms");
    }
    first = false;

    double coef = sign;
    ExponentVector exp(static_cast<std::size_t>(m), 0);
    bool any_factor = false;
    for (;;) {
      char c = lex.peek();
      if (c == 'z') {
        ++lex.pos;
        int idx = lex.integer();
        if (idx < 1 || idx > m) lex.fail("variable index out of range");
        int e = 1;
        if (lex.accept('^')) e = lex.integer();
        exp[static_cast<std::size_t>(idx - 1)] += e;
        any_factor = true;
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        coef *= lex.number();
        any_factor = true;
      } else {
        lex.fail(any_factor ? "expected a factor after '*'" : "expected a term");
      }
      if (!lex.accept('*')) break;
    }
    F.add_term(exp, cd(coef));
  }
  if (first) throw std::invalid_argument("parse_laurent: empty expression");
  F.finalize();
  return F;
}

cd eval_laurent(const LaurentPolynomial& F, const std::vector<cd>& z) {
  if (static_cast<int>(z.size()) != F.dim())
    throw std::invalid_argument("eval_laurent: point dimension mismatch");
  for (const cd& zj : z)
    if (zj == cd(0.0)) throw std::invalid_argument("eval_laurent: zero coordinate");
  cd acc(0.0);
  for (const auto& [exp, coef] : F.terms()) {
    cd t = coef;
    for (std::size_t j = 0; j < z.size(); ++j) t *= powi(z[j], exp[j]);
    acc += t;
  }
  return acc;
}

Polytope support_polytope(const LaurentPolynomial& F) {
  F.finalize();
  std::vector<Vec2> pts;
  for (const auto& [exp, coef] : F.terms()) {
    double x = static_cast<double>(exp[0]);
    double y = F.dim() >= 2 ? static_cast<double>(exp[1]) : 0.0;
    pts.push_back({x, y});
  }
  return convex_hull(pts);
}

FiberRoots fiber_roots(const LaurentPolynomial& F, double x1, double theta1) {
  if (F.dim() != 2) throw std::invalid_argument("fiber_roots: requires m = 2");
  const cd z1 = std::polar(std::exp(x1), theta1);

  int bmin = 0, bmax = 0;
  bool seen = false;
  for (const auto& [exp, coef] : F.terms()) {
    (void)coef;
    if (!seen) {
      bmin = bmax = exp[1];
      seen = true;
    } else {
      bmin = std::min(bmin, exp[1]);
      bmax = std::max(bmax, exp[1]);
    }
  }
  if (!seen) throw std::invalid_argument("fiber_roots: empty polynomial");

  std::vector<cd> c(static_cast<std::size_t>(bmax - bmin + 1), cd(0.0));
  double term_scale = 0.0;
  for (const auto& [exp, coef] : F.terms()) {
    cd t = coef * powi(z1, exp[0]);
    c[static_cast<std::size_t>(exp[1] - bmin)] += t;
    term_scale = std::max(term_scale, std::abs(t));
  }

  FiberRoots out;
  out.beta_min = bmin;
  double scale = 0.0;
  for (const cd& ck : c) scale = std::max(scale, std::abs(ck));
  if (scale <= 1e-12 * term_scale || term_scale == 0.0) {
    out.degenerate = true;
    return out;
  }

  // Drop leading coefficients cancelled to round-off (roots escaped to
  // infinity on this fiber).
  std::size_t deg = c.size() - 1;
  while (deg > 0 && std::abs(c[deg]) <= 1e-14 * scale) --deg;
  c.resize(deg + 1);
  out.degree = static_cast<int>(deg);
  out.lead = c.back();
  if (deg == 0) return out;  // nonzero constant: no roots in C*

  RootResult rr = aberth_roots(c, 1e-12, 200);
  for (const cd& w : rr.roots) {
    if (std::abs(w) < 1e-13) {
      ++out.dropped_small;  // excluded torus boundary
      continue;
    }
    cd p = c.back();
    for (std::size_t k = c.size() - 1; k-- > 0;) p = p * w + c[k];
    out.max_residual = std::max(out.max_residual, std::abs(p) / scale);
    out.roots.push_back(w);
  }
  return out;
}

std::string to_json_string(const LaurentPolynomial& F) {
  nlohmann::ordered_json j;
  j["m"] = F.dim();
  j["terms"] = nlohmann::ordered_json::array();
  for (const auto& [exp, coef] : F.terms()) {
    nlohmann::ordered_json t;
    t["exp"] = exp;
    t["re"] = coef.real();
    t["im"] = coef.imag();
    j["terms"].push_back(t);
  }
  return j.dump();
}

LaurentPolynomial laurent_from_json_string(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  LaurentPolynomial F(j.at("m").get<int>());
  for (const auto& t : j.at("terms")) {
    ExponentVector e = t.at("exp").get<ExponentVector>();
    F.add_term(e, cd(t.at("re").get<double>(), t.at("im").get<double>()));
  }
  F.finalize();
  return F;
}

}  // namespace amoebalab
