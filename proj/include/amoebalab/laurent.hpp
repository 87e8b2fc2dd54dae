#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "amoebalab/convex.hpp"

namespace amoebalab {

using ExponentVector = std::vector<int>;

// Finite sum  F(z) = sum_a C_a z^a  with a in Z^m. Stored coefficients are
// never zero and the term map is never empty.
class LaurentPolynomial {
 public:
  explicit LaurentPolynomial(int m) : m_(m) {}

  int dim() const { return m_; }
  const std::map<ExponentVector, std::complex<double>>& terms() const { return terms_; }

  void add_term(const ExponentVector& exp, std::complex<double> coef);
  void finalize() const;  // throws if no terms survive

  double coefficient_scale() const;  // max |C_a|

 private:
  int m_ = 0;
  std::map<ExponentVector, std::complex<double>> terms_;
};

// Grammar (README): sum of terms, each a '*'-separated product of an optional
// real coefficient and powers z<k>^<int>; exponents may be negative.
LaurentPolynomial parse_laurent(const std::string& text, int m);

std::complex<double> eval_laurent(const LaurentPolynomial& F,
                                  const std::vector<std::complex<double>>& z);

Polytope support_polytope(const LaurentPolynomial& F);

struct FiberRoots {
  std::vector<std::complex<double>> roots;  // roots in C*, multiplicity preserved
  int beta_min = 0;                         // lowest z2-exponent cleared before solving
  int degree = 0;                           // degree of the cleared fiber polynomial
  std::complex<double> lead;                // leading coefficient after clearing
  int dropped_small = 0;                    // roots below 1e-13 excluded from `roots`
  bool degenerate = false;                  // fiber polynomial identically zero
  double max_residual = 0.0;  // max |P(root)| / max|coef| over the cleared polynomial
};

// Roots z2 of F(e^{x1 + i theta1}, z2) = 0 for a Laurent polynomial in two
// variables. Degenerate fibers (identically zero polynomial) are flagged, a
// z2-independent nonzero fiber returns no roots.
FiberRoots fiber_roots(const LaurentPolynomial& F, double x1, double theta1);

std::string to_json_string(const LaurentPolynomial& F);
LaurentPolynomial laurent_from_json_string(const std::string& text);

}  // namespace amoebalab
