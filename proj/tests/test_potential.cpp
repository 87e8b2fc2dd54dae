#include <doctest.h>

#include <cmath>
#include <random>

#include "amoebalab/potential.hpp"
#include "amoebalab/superform.hpp"

using namespace amoebalab;

namespace {

// Fits and removes the affine gauge by least squares over all nodes, then
// reports the max (resp. rms) remaining deviation.
struct GaugeDev {
  double max = 0.0, rms = 0.0;
};

GaugeDev gauge_stats(const GridField& A, const GridField& B) {
  const Grid2& g = A.grid;
  double mx = 0.0, my = 0.0, mv = 0.0;
  int n = 0;
  for (int j = 0; j <= g.n2; ++j) {
    for (int i = 0; i <= g.n1; ++i) {
      mx += i;
      my += j;
      mv += A.at(i, j) - B.at(i, j);
      ++n;
    }
  }
  mx /= n;
  my /= n;
  mv /= n;
  double sxx = 0.0, syy = 0.0, sxv = 0.0, syv = 0.0;
  for (int j = 0; j <= g.n2; ++j) {
    for (int i = 0; i <= g.n1; ++i) {
      const double d = A.at(i, j) - B.at(i, j) - mv;
      sxx += (i - mx) * (i - mx);
      syy += (j - my) * (j - my);
      sxv += (i - mx) * d;
      syv += (j - my) * d;
    }
  }
  const double cx = sxv / sxx, cy = syv / syy;
  GaugeDev out;
  double acc = 0.0;
  for (int j = 0; j <= g.n2; ++j) {
    for (int i = 0; i <= g.n1; ++i) {
      const double e = A.at(i, j) - B.at(i, j) - mv - cx * (i - mx) - cy * (j - my);
      out.max = std::max(out.max, std::fabs(e));
      acc += e * e;
    }
  }
  out.rms = std::sqrt(acc / n);
  return out;
}

double gauge_dev(const GridField& A, const GridField& B) { return gauge_stats(A, B).max; }
double rms_gauge_dev(const GridField& A, const GridField& B) {
  return gauge_stats(A, B).rms;
}

}  // namespace

TEST_CASE("identity Hessian current recovers the paraboloid") {
  Grid2 g(Box2(-2, 2, -2, 2), 48, 48);
  Poly f(2);  // f = (x0^2 + x1^2) / 2 has the identity Hessian
  f.add_term({2, 0}, 0.5);
  f.add_term({0, 2}, 0.5);
  SuperCurrent11 S = current_from_hessian(f, g);
  PotentialResult res = potential_from_current(S);

  GridField want(g);
  for (int j = 0; j <= g.n2; ++j) {
    for (int i = 0; i <= g.n1; ++i) {
      const Vec2 p = g.node(i, j);
      want.at(i, j) = 0.5 * (p.x * p.x + p.y * p.y);
    }
  }
  CHECK(rms_gauge_dev(res.R, want) <= 1e-2);
  CHECK(res.path_residual <= 1e-6 * std::max(1.0, S.total_abs_mass()));
  CHECK(res.convexity_gap <= 1e-9);
}

TEST_CASE("zero current recovers an affine function") {
  Grid2 g(Box2(0, 1, 0, 1), 24, 24);
  SuperCurrent11 S(g);
  PotentialResult res = potential_from_current(S);
  GridField zero(g);
  CHECK(gauge_dev(res.R, zero) <= 1e-12);
  CHECK(res.path_residual <= 1e-12);
}

TEST_CASE("anisotropic quadratic recovers with the right curvatures") {
  Grid2 g(Box2(-1, 1, -1, 1), 40, 40);
  Poly f(2);  // f = 2 x0^2 + 0.5 x0 x1 + x1^2
  f.add_term({2, 0}, 2.0);
  f.add_term({1, 1}, 0.5);
  f.add_term({0, 2}, 1.0);
  SuperCurrent11 S = current_from_hessian(f, g);
  PotentialResult res = potential_from_current(S);
  GridField want(g);
  for (int j = 0; j <= g.n2; ++j) {
    for (int i = 0; i <= g.n1; ++i) {
      const Vec2 p = g.node(i, j);
      want.at(i, j) = 2.0 * p.x * p.x + 0.5 * p.x * p.y + p.y * p.y;
    }
  }
  CHECK(rms_gauge_dev(res.R, want) <= 1e-2 * 4.0);  // scaled by the mass scale
  CHECK(res.path_residual <= 1e-6 * S.total_abs_mass());
}

TEST_CASE("asymmetric input is rejected") {
  Grid2 g(Box2(0, 1, 0, 1), 16, 16);
  SuperCurrent11 S(g);
  for (int c = 0; c < g.cell_count(); ++c) {
    S.mass(0, 0, c) = 1.0;
    S.mass(1, 1, c) = 1.0;
    S.mass(0, 1, c) = 0.5;
    S.mass(1, 0, c) = -0.5;
  }
  CHECK_THROWS(potential_from_current(S));
}

TEST_CASE("non-closed current is rejected when checks are enforced") {
  Grid2 g(Box2(0, 1, 0, 1), 24, 24);
  SuperCurrent11 S(g);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  // random symmetric PSD-ish masses: wildly inconsistent as a mixed Hessian
  for (int c = 0; c < g.cell_count(); ++c) {
    const double a = u(rng), b = u(rng);
    S.mass(0, 0, c) = a;
    S.mass(1, 1, c) = b;
    const double off = 0.9 * std::sqrt(a * b) * (u(rng) - 0.5) * 2.0;
    S.mass(0, 1, c) = off;
    S.mass(1, 0, c) = off;
  }
  PotentialOptions strict;
  strict.closed_rel_tol = 1e-10;
  CHECK_THROWS(potential_from_current(S, strict));

  PotentialOptions loose;
  loose.enforce_checks = false;
  PotentialResult res = potential_from_current(S, loose);
  CHECK(res.closedness_rel > 1e-10);
}

TEST_CASE("grid too small is rejected") {
  Grid2 g(Box2(0, 1, 0, 1), 4, 4);
  SuperCurrent11 S(g);
  CHECK_THROWS(potential_from_current(S));
}

TEST_CASE("path independence holds for smooth convex data") {
  // square cells keep the sampled Hessian discretely closed: the density is
  // invariant under the diagonal shift (x,y) -> (x+h, y+h)
  Grid2 g(Box2(-1.5, 1.5, -1, 1), 36, 24);
  // smooth non-polynomial convex function via its sampled Hessian
  SuperCurrent11 S(g);
  const double area = g.cell_area();
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      const Vec2 p = g.cell_center(i, j);
      const int c = g.cell_index(i, j);
      // f = log(e^x + e^y) type smoothing: Hessian e^{x+y}/(e^x+e^y)^2 [[1,-1],[-1,1]]
      const double ex = std::exp(p.x), ey = std::exp(p.y);
      const double h = ex * ey / ((ex + ey) * (ex + ey));
      S.mass(0, 0, c) = h * area;
      S.mass(1, 1, c) = h * area;
      S.mass(0, 1, c) = -h * area;
      S.mass(1, 0, c) = -h * area;
    }
  }
  PotentialResult res = potential_from_current(S);
  CHECK(res.path_residual <= 1e-6 * S.total_abs_mass());

  // compare against the exact smoothed max
  GridField want(g);
  for (int j = 0; j <= g.n2; ++j) {
    for (int i = 0; i <= g.n1; ++i) {
      const Vec2 p = g.node(i, j);
      want.at(i, j) = std::log(std::exp(p.x) + std::exp(p.y));
    }
  }
  CHECK(rms_gauge_dev(res.R, want) <= 1e-2);
}
