#include "amoebalab/roots.hpp"

#include <cmath>
#include <stdexcept>

namespace amoebalab {

namespace {

using cd = std::complex<double>;

// P(w) and P'(w) by one Horner pass.
std::pair<cd, cd> horner2(const std::vector<cd>& c, cd w) {
  cd p = c.back(), dp = 0.0;
  for (std::size_t k = c.size() - 1; k-- > 0;) {
    dp = dp * w + p;
    p = p * w + c[k];
  }
  return {p, dp};
}

}  // namespace

RootResult aberth_roots(const std::vector<cd>& c, double tol, int max_iter) {
  const int d = static_cast<int>(c.size()) - 1;
  if (d < 1 || c.back() == cd(0.0))
    throw std::invalid_argument("aberth_roots: need degree >= 1 with nonzero leading coefficient");

  RootResult res;
  if (d == 1) {
    res.roots = {-c[0] / c[1]};
    res.converged = true;
    return res;
  }

  // Initial guesses on a circle sized by the Cauchy-style coefficient bound,
  // angles offset irrationally so symmetric polynomials do not stall.
  double lead = std::abs(c.back());
  double r = 0.0;
  for (int k = 0; k < d; ++k)
    r = std::max(r, 2.0 * std::pow(std::abs(c[static_cast<std::size_t>(k)]) / lead,
                                   1.0 / (d - k)));
  if (!(r > 0)) r = 1.0;
  std::vector<cd> z(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    double ang = 2.0 * M_PI * i / d + 0.376;
    z[static_cast<std::size_t>(i)] = r * cd(std::cos(ang), std::sin(ang));
  }

  for (int it = 0; it < max_iter; ++it) {
    double worst = 0.0;
    for (int i = 0; i < d; ++i) {
      auto [p, dp] = horner2(c, z[static_cast<std::size_t>(i)]);
      if (p == cd(0.0)) continue;
      cd sum = 0.0;
      for (int j = 0; j < d; ++j) {
        if (j == i) continue;
        cd diff = z[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(j)];
        if (std::abs(diff) < 1e-300) diff = cd(1e-300, 0);
        sum += 1.0 / diff;
      }
      cd newton = (dp == cd(0.0)) ? cd(0.0) : p / dp;
      cd denom = 1.0 - newton * sum;
      cd step = (std::abs(denom) < 1e-300) ? newton : newton / denom;
      z[static_cast<std::size_t>(i)] -= step;
      worst = std::max(worst, std::abs(step) / (1.0 + std::abs(z[static_cast<std::size_t>(i)])));
    }
    res.iterations = it + 1;
    if (worst <= tol) {
      res.converged = true;
      break;
    }
  }
  res.roots = z;
  return res;
}

}  // namespace amoebalab
