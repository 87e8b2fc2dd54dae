#include "amoebalab/poly.hpp"

#include <cmath>
#include <stdexcept>

namespace amoebalab {

Poly Poly::variable(int m, int k) {
  if (k < 0 || k >= m) throw std::invalid_argument("Poly::variable: index out of range");
  Poly p(m);
  std::vector<int> e(static_cast<std::size_t>(m), 0);
  e[static_cast<std::size_t>(k)] = 1;
  p.terms_[e] = 1.0;
  return p;
}

void Poly::add_term(const std::vector<int>& exp, double c) {
  if (static_cast<int>(exp.size()) != m_)
    throw std::invalid_argument("Poly::add_term: exponent length mismatch");
  auto it = terms_.find(exp);
  if (it == terms_.end()) {
    if (c != 0.0) terms_[exp] = c;
  } else {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

Poly Poly::operator+(const Poly& o) const {
  Poly r = *this;
  for (const auto& [e, c] : o.terms_) r.add_term(e, c);
  return r;
}

Poly Poly::operator-(const Poly& o) const {
  Poly r = *this;
  for (const auto& [e, c] : o.terms_) r.add_term(e, -c);
  return r;
}

Poly Poly::operator*(const Poly& o) const {
  Poly r(m_);
  for (const auto& [ea, ca] : terms_) {
    for (const auto& [eb, cb] : o.terms_) {
      std::vector<int> e(ea);
      for (std::size_t k = 0; k < e.size(); ++k) e[k] += eb[k];
      r.add_term(e, ca * cb);
    }
  }
  return r;
}

Poly Poly::operator*(double s) const {
  Poly r(m_);
  if (s == 0.0) return r;
  for (const auto& [e, c] : terms_) r.terms_[e] = c * s;
  return r;
}

Poly Poly::partial(int k) const {
  Poly r(m_);
  for (const auto& [e, c] : terms_) {
    int p = e[static_cast<std::size_t>(k)];
    if (p == 0) continue;
    std::vector<int> d(e);
    d[static_cast<std::size_t>(k)] = p - 1;
    r.add_term(d, c * p);
  }
  return r;
}

double Poly::eval(const std::vector<double>& x) const {
  double acc = 0.0;
  for (const auto& [e, c] : terms_) {
    double t = c;
    for (std::size_t k = 0; k < e.size(); ++k) {
      for (int i = 0; i < e[k]; ++i) t *= x[k];
    }
    acc += t;
  }
  return acc;
}

double Poly::integrate_box(const std::vector<double>& lo, const std::vector<double>& hi) const {
  double acc = 0.0;
  for (const auto& [e, c] : terms_) {
    double t = c;
    for (std::size_t k = 0; k < e.size(); ++k) {
      int p = e[k] + 1;
      t *= (std::pow(hi[k], p) - std::pow(lo[k], p)) / p;
    }
    acc += t;
  }
  return acc;
}

double Poly::max_abs_coeff() const {
  double s = 0.0;
  for (const auto& [e, c] : terms_) s = std::max(s, std::fabs(c));
  return s;
}

Poly Poly::random(int m, int max_degree, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_int_distribution<int> deg(0, max_degree);
  std::uniform_int_distribution<int> nterms(1, 4);
  Poly p(m);
  int n = nterms(rng);
  for (int t = 0; t < n; ++t) {
    std::vector<int> e(static_cast<std::size_t>(m), 0);
    int budget = deg(rng);
    for (int k = 0; k < m && budget > 0; ++k) {
      std::uniform_int_distribution<int> pick(0, budget);
      int p_k = pick(rng);
      e[static_cast<std::size_t>(k)] = p_k;
      budget -= p_k;
    }
    p.add_term(e, coef(rng));
  }
  return p;
}

}  // namespace amoebalab
