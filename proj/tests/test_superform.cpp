#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "amoebalab/superform.hpp"

using namespace amoebalab;

namespace {

SuperForm random_form(int m, int p, int q, int maxdeg, std::mt19937_64& rng) {
  SuperForm w = make_exact_form(m, p, q);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  bool any = false;
  for (IndexSet J = 0; J < (1u << m); ++J) {
    if (set_cardinality(J) != p) continue;
    for (IndexSet K = 0; K < (1u << m); ++K) {
      if (set_cardinality(K) != q) continue;
      if (uni(rng) < 0.7 || !any) {
        w.add(J, K, CoefficientField::exact(Poly::random(m, maxdeg, rng)));
        any = true;
      }
    }
  }
  return w;
}

double form_scale(const SuperForm& w) {
  double s = 0.0;
  for (const auto& [key, c] : w.coef) {
    (void)key;
    s = std::max(s, c.poly.max_abs_coeff());
  }
  return s;
}

double form_diff(const SuperForm& a, const SuperForm& b, double sign) {
  double worst = 0.0;
  for (const auto& [key, c] : a.coef) {
    Poly d = c.poly;
    auto it = b.coef.find(key);
    if (it != b.coef.end()) d = d + it->second.poly * sign;
    worst = std::max(worst, d.max_abs_coeff());
  }
  for (const auto& [key, c] : b.coef) {
    if (a.coef.find(key) == a.coef.end())
      worst = std::max(worst, c.poly.max_abs_coeff());
  }
  return worst;
}

}  // namespace

TEST_CASE("index set helpers") {
  CHECK(set_cardinality(0) == 0);
  CHECK(set_cardinality(0b1011) == 3);
  CHECK(set_indices(0b101) == std::vector<int>{0, 2});

  // dx_1 ^ dx_{0} = -dx_{01} reordering
  CHECK(insert_sign(0, 0b010) == 1);   // dx_0 ^ dx_1 already ordered
  CHECK(insert_sign(1, 0b001) == -1);  // dx_1 ^ dx_0 needs one swap
  CHECK(insert_sign(1, 0b010) == 0);   // repeated index
  CHECK(merge_sign(0b001, 0b010) == 1);
  CHECK(merge_sign(0b010, 0b001) == -1);
  CHECK(merge_sign(0b011, 0b010) == 0);
  // dx_{12} ^ dx_{0}: move dx_0 across two factors
  CHECK(merge_sign(0b110, 0b001) == 1);
}

TEST_CASE("differentials square to zero and anticommute on random forms") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> pick_m(2, 3);
  int checked = 0;
  for (int t = 0; t < 120; ++t) {
    const int m = pick_m(rng);
    std::uniform_int_distribution<int> pd(0, m - 1);
    const SuperForm w = random_form(m, pd(rng), pd(rng), 3, rng);
    const double scale = std::max(1.0, form_scale(w));
    CHECK(form_scale(dprime(dprime(w))) / scale <= 1e-12);
    CHECK(form_scale(dsecond(dsecond(w))) / scale <= 1e-12);
    CHECK(form_diff(dprime(dsecond(w)), dsecond(dprime(w)), 1.0) / scale <= 1e-12);
    ++checked;
  }
  CHECK(checked >= 100);
}

TEST_CASE("dprime raises p and dsecond raises q") {
  std::mt19937_64 rng(5);
  SuperForm w = random_form(2, 0, 1, 2, rng);
  CHECK(dprime(w).p == 1);
  CHECK(dprime(w).q == 1);
  CHECK(dsecond(w).q == 2);
}

TEST_CASE("wedge graded commutativity and Leibniz on random pairs") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 40; ++t) {
    const int m = 2 + (t % 2);
    std::uniform_int_distribution<int> pd(0, m - 1);
    const SuperForm a = random_form(m, pd(rng), pd(rng), 2, rng);
    const SuperForm b = random_form(m, pd(rng), pd(rng), 2, rng);
    const double scale = std::max({1.0, form_scale(a), form_scale(b)});
    const int pq = a.p + a.q, pq2 = b.p + b.q;
    const double csign = ((pq * pq2) % 2 == 0) ? 1.0 : -1.0;
    CHECK(form_diff(wedge(a, b), wedge(b, a), -csign) / (scale * scale) <= 1e-12);

    // d'(a^b) = d'a^b + (-1)^{p+q} a^d'b, same shape for d''
    const double lsign = (pq % 2 == 0) ? 1.0 : -1.0;
    SuperForm rhs = wedge(dprime(a), b);
    const SuperForm other = wedge(a, dprime(b));
    for (const auto& [key, c] : other.coef) {
      auto it = rhs.coef.find(key);
      if (it != rhs.coef.end())
        it->second.poly = it->second.poly + c.poly * lsign;
      else
        rhs.add(key.first, key.second, CoefficientField::exact(c.poly * lsign));
    }
    CHECK(form_diff(dprime(wedge(a, b)), rhs, -1.0) / (scale * scale) <= 1e-12);
  }
}

TEST_CASE("involution swaps bidegree with the parity sign and squares to one") {
  for (int m = 2; m <= 3; ++m) {
    Poly f(m);
    {
      std::vector<int> e(static_cast<std::size_t>(m), 0);
      f.add_term(e, 1.25);
      e[0] = 2;
      f.add_term(e, -0.5);
    }
    for (IndexSet J = 0; J < (1u << m); ++J) {
      for (IndexSet K = 0; K < (1u << m); ++K) {
        SuperForm a = make_exact_form(m, set_cardinality(J), set_cardinality(K));
        a.add(J, K, CoefficientField::exact(f));
        const SuperForm ia = involution_I(a);
        CHECK(ia.p == a.q);
        CHECK(ia.q == a.p);
        CHECK(form_diff(involution_I(ia), a, -1.0) == 0.0);
        const double want = ((a.p * a.q) % 2 == 0) ? 1.0 : -1.0;
        auto it = ia.coef.find(std::make_pair(K, J));
        REQUIRE(it != ia.coef.end());
        Poly d = it->second.poly + f * (-want);
        CHECK(d.max_abs_coeff() <= 1e-15);
      }
    }
  }
}

TEST_CASE("tropical integral oracles") {
  // m = 2: orientation sign is -1, so integrating f dx_{12} (x) dx_{12}
  // over [0,1]^2 returns minus the Riemann integral of f.
  SuperForm w = make_exact_form(2, 2, 2);
  Poly f(2);
  f.add_term({1, 0}, 1.0);  // f = x0
  w.add(3u, 3u, CoefficientField::exact(f));
  VolumeConvention conv;
  CHECK(tropical_integral(w, {0.0, 0.0}, {1.0, 1.0}, conv) ==
        doctest::Approx(-0.5).epsilon(1e-14));

  SuperForm w2 = make_exact_form(2, 2, 2);
  Poly g(2);
  g.add_term({2, 1}, 1.0);  // g = x0^2 x1
  w2.add(3u, 3u, CoefficientField::exact(g));
  CHECK(tropical_integral(w2, {0.0, 0.0}, {1.0, 1.0}, conv) ==
        doctest::Approx(-1.0 / 6.0).epsilon(1e-14));

  // doubling the volume normalisation halves the mass
  VolumeConvention conv2;
  conv2.c = 2.0;
  CHECK(tropical_integral(w, {0.0, 0.0}, {1.0, 1.0}, conv2) ==
        doctest::Approx(-0.25).epsilon(1e-14));

  // missing top coefficient integrates to zero
  SuperForm z = make_exact_form(2, 2, 2);
  CHECK(tropical_integral(z, {0.0, 0.0}, {1.0, 1.0}, conv) == 0.0);

  // bidegree must be (m,m)
  CHECK_THROWS(tropical_integral(make_exact_form(2, 1, 1), {0.0, 0.0}, {1.0, 1.0}, conv));
}

TEST_CASE("current symmetry and positivity checks") {
  Grid2 g(Box2(-1, 1, -1, 1), 8, 8);
  SuperCurrent11 S(g);
  for (int c = 0; c < g.cell_count(); ++c) {
    S.mass(0, 0, c) = 1.0;
    S.mass(1, 1, c) = 2.0;
    S.mass(0, 1, c) = 0.3;
    S.mass(1, 0, c) = 0.3;
  }
  CHECK(is_symmetric(S, 1e-12));
  CHECK(is_positive(S, 64, 1e-9));

  S.mass(1, 0, 5) = 0.7;  // break symmetry in one cell
  CHECK(!is_symmetric(S, 1e-3));

  SuperCurrent11 neg(g);
  for (int c = 0; c < g.cell_count(); ++c) {
    neg.mass(0, 0, c) = -1.0;
    neg.mass(1, 1, c) = -1.0;
  }
  CHECK(!is_positive(neg, 64, 1e-9));
}

TEST_CASE("hessian current of a quadratic matches the constant Hessian") {
  // f = x0^2 + x0 x1 + 2 x1^2 has Hessian [[2,1],[1,4]]
  Poly f(2);
  f.add_term({2, 0}, 1.0);
  f.add_term({1, 1}, 1.0);
  f.add_term({0, 2}, 2.0);
  Grid2 g(Box2(0, 1, 0, 1), 10, 10);
  SuperCurrent11 S = current_from_hessian(f, g);
  const double area = g.cell_area();
  for (int c = 0; c < g.cell_count(); ++c) {
    CHECK(S.mass(0, 0, c) == doctest::Approx(2.0 * area).epsilon(1e-12));
    CHECK(S.mass(0, 1, c) == doctest::Approx(1.0 * area).epsilon(1e-12));
    CHECK(S.mass(1, 0, c) == doctest::Approx(1.0 * area).epsilon(1e-12));
    CHECK(S.mass(1, 1, c) == doctest::Approx(4.0 * area).epsilon(1e-12));
  }
  CHECK(is_symmetric(S, 1e-12));
  CHECK(is_positive(S, 128, 1e-9));
  CHECK(S.total_abs_mass() == doctest::Approx(8.0).epsilon(1e-12));
}
