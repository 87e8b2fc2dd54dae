#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <vector>

namespace amoebalab {

// Multivariate polynomial with real coefficients over x_1..x_m, dense enough
// for superform coefficients (small m, low degree). Terms map exponent
// tuples to coefficients; zero coefficients are dropped eagerly.
class Poly {
 public:
  Poly() = default;
  explicit Poly(int m) : m_(m) {}
  Poly(int m, double c) : m_(m) {
    if (c != 0.0) terms_[std::vector<int>(static_cast<std::size_t>(m), 0)] = c;
  }

  static Poly variable(int m, int k);  // x_{k+1}

  int dim() const { return m_; }
  bool is_zero() const { return terms_.empty(); }
  const std::map<std::vector<int>, double>& terms() const { return terms_; }

  void add_term(const std::vector<int>& exp, double c);

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator*(double s) const;
  Poly operator-() const { return *this * -1.0; }

  Poly partial(int k) const;  // d/dx_{k+1}
  double eval(const std::vector<double>& x) const;
  double integrate_box(const std::vector<double>& lo, const std::vector<double>& hi) const;
  double max_abs_coeff() const;

  static Poly random(int m, int max_degree, std::mt19937_64& rng);

 private:
  int m_ = 0;
  std::map<std::vector<int>, double> terms_;
};

}  // namespace amoebalab
