#include "amoebalab/classical.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "amoebalab/util.hpp"

namespace amoebalab {

namespace {

using cd = std::complex<double>;
constexpr double kTwoPi = 6.283185307179586476925286766559;

// Per-term data for torus quadrature at a fixed x, rescaled so the dominant
// monomial has unit weight: term = w * exp(i(a1*t1 + a2*t2 + phase0)).
struct TorusTerms {
  std::vector<int> a1, a2;
  std::vector<double> w, phase0;
  double log_shift = 0.0;  // max over terms of <a,x> + log|C_a|

  TorusTerms(const LaurentPolynomial& F, const Vec2& x) {
    double s = -1e308;
    for (const auto& [exp, coef] : F.terms()) {
      s = std::max(s, exp[0] * x.x + exp[1] * x.y + std::log(std::abs(coef)));
    }
    log_shift = s;
    for (const auto& [exp, coef] : F.terms()) {
      a1.push_back(exp[0]);
      a2.push_back(exp[1]);
      w.push_back(std::exp(exp[0] * x.x + exp[1] * x.y + std::log(std::abs(coef)) - s));
      phase0.push_back(std::arg(coef));
    }
  }

  std::size_t size() const { return a1.size(); }
};

}  // namespace

AmoebaRaster rasterize_amoeba(const LaurentPolynomial& F, const Box2& box, int n1,
                              int n2, int fibers, int angles) {
  if (F.dim() != 2) throw std::invalid_argument("rasterize_amoeba: requires m = 2");
  if (fibers < 2 || angles < 1)
    throw std::invalid_argument("rasterize_amoeba: need fibers >= 2, angles >= 1");
  F.finalize();

  AmoebaRaster out;
  out.grid = Grid2(box, n1, n2);
  out.fibers = fibers;
  out.angles = angles;
  const Grid2& g = out.grid;

  // Exponentially thin tentacles can be narrower than the fiber spacing along
  // one axis while staying a graph over the other, so the zero set is swept
  // twice: z2-roots along x1 columns and z1-roots along x2 rows.
  LaurentPolynomial Fswap(2);
  for (const auto& [e, c] : F.terms()) Fswap.add_term({e[1], e[0]}, c);
  Fswap.finalize();

  struct FiberHits {
    std::vector<int> cells;
    bool full_line = false;  // degenerate fiber: whole column/row occupied
    int degenerate = 0;
  };

  CellMask raw(g);
  auto sweep = [&](const LaurentPolynomial& P, bool transposed) {
    const double lo = transposed ? box.lo2 : box.lo1;
    const double hi = transposed ? box.hi2 : box.hi1;
    const double olo = transposed ? box.lo1 : box.lo2;
    const double ohi = transposed ? box.hi1 : box.hi2;
    std::vector<FiberHits> hits(static_cast<std::size_t>(fibers));
    parallel_for(static_cast<std::size_t>(fibers), [&](std::size_t fi) {
      const double t = static_cast<double>(fi) / (fibers - 1);
      const double a = lo * (1.0 - t) + hi * t;
      FiberHits& h = hits[fi];
      for (int k = 0; k < angles; ++k) {
        const double theta = kTwoPi * k / angles;
        FiberRoots fr = fiber_roots(P, a, theta);
        if (fr.degenerate) {
          ++h.degenerate;
          h.full_line = true;
          continue;
        }
        for (const cd& w : fr.roots) {
          const double b = std::log(std::abs(w));
          if (b < olo || b > ohi) continue;
          const Vec2 p = transposed ? Vec2(b, a) : Vec2(a, b);
          const int c = g.locate_cell(p);
          if (c >= 0) h.cells.push_back(c);
        }
      }
    });
    for (std::size_t fi = 0; fi < hits.size(); ++fi) {
      const FiberHits& h = hits[fi];
      out.degenerate_fibers += h.degenerate;
      for (int c : h.cells) raw.set(c);
      if (h.full_line) {
        const double t = static_cast<double>(fi) / (fibers - 1);
        const double a = lo * (1.0 - t) + hi * t;
        if (transposed) {
          const int c = g.locate_cell(Vec2(g.box.center().x, a));
          if (c < 0) continue;
          const int j = c / g.n1;
          for (int i = 0; i < g.n1; ++i) raw.set(g.cell_index(i, j));
        } else {
          const int c = g.locate_cell(Vec2(a, g.box.center().y));
          if (c < 0) continue;
          const int i = c % g.n1;
          for (int j = 0; j < g.n2; ++j) raw.set(g.cell_index(i, j));
        }
      }
    }
  };
  sweep(F, false);
  sweep(Fswap, true);

  // One-cell dilation (8-neighborhood) closes pinholes between sampled fibers.
  out.mask = CellMask(g);
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      bool on = false;
      for (int dj = -1; dj <= 1 && !on; ++dj) {
        for (int di = -1; di <= 1 && !on; ++di) {
          const int ii = i + di, jj = j + dj;
          if (ii < 0 || jj < 0 || ii >= g.n1 || jj >= g.n2) continue;
          on = raw.get(g.cell_index(ii, jj));
        }
      }
      if (on) out.mask.set(g.cell_index(i, j));
    }
  }
  return out;
}

double ronkin_value_fixed(const LaurentPolynomial& F, const Vec2& x, int nq) {
  if (nq < 2) throw std::invalid_argument("ronkin_value_fixed: nq >= 2");
  F.finalize();
  const TorusTerms T(F, x);
  const std::size_t nterms = T.size();
  const double h = kTwoPi / nq;

  std::vector<double> row_sums(static_cast<std::size_t>(nq), 0.0);
  parallel_for(static_cast<std::size_t>(nq), [&](std::size_t r) {
    const double t1 = (static_cast<double>(r) + 0.5) * h;
    std::vector<cd> cur(nterms), step(nterms);
    for (std::size_t t = 0; t < nterms; ++t) {
      cur[t] = std::polar(T.w[t], T.a1[t] * t1 + T.a2[t] * 0.5 * h + T.phase0[t]);
      step[t] = std::polar(1.0, T.a2[t] * h);
    }
    double acc = 0.0;
    for (int b = 0; b < nq; ++b) {
      cd s(0.0);
      for (std::size_t t = 0; t < nterms; ++t) s += cur[t];
      acc += std::log(std::max(std::abs(s), 1e-300));
      for (std::size_t t = 0; t < nterms; ++t) cur[t] *= step[t];
    }
    row_sums[r] = acc;
  });

  double total = 0.0;
  for (double v : row_sums) total += v;
  return T.log_shift + total / (static_cast<double>(nq) * nq);
}

double ronkin_value(const LaurentPolynomial& F, const Vec2& x, int nq, double tol,
                    int nq_max) {
  nq = std::max(nq, 16);
  double prev = ronkin_value_fixed(F, x, nq);
  for (int n = 2 * nq; n <= nq_max; n *= 2) {
    const double v = ronkin_value_fixed(F, x, n);
    if (std::abs(v - prev) < tol) return v;
    prev = v;
  }
  return prev;
}

namespace {

// Mean over theta2 of log|F(z1, e^{x2 + i theta2})| by Jensen's formula on the
// fiber polynomial: bmin*x2 + log|lead| + sum_roots max(x2, log|rho|).
double fiber_mean_log(const LaurentPolynomial& F, double x1, double theta1,
                      double x2) {
  FiberRoots fr = fiber_roots(F, x1, theta1);
  if (fr.degenerate) {
    fr = fiber_roots(F, x1, theta1 + 3e-9);  // dodge an exact zero fiber
    if (fr.degenerate) return -690.0;        // log of denormal floor
  }
  double v = fr.beta_min * x2 + std::log(std::abs(fr.lead));
  v += fr.dropped_small * x2;  // roots below 1e-13 always lose the max
  for (const cd& w : fr.roots) v += std::max(x2, std::log(std::abs(w)));
  return v;
}

}  // namespace

double ronkin_value_fiber(const LaurentPolynomial& F, const Vec2& x, double tol,
                          int n0, int n_max) {
  if (F.dim() != 2) throw std::invalid_argument("ronkin_value_fiber: requires m = 2");
  F.finalize();
  auto value_at = [&](int n) {
    const double h = kTwoPi / n;
    std::vector<double> vals(static_cast<std::size_t>(n));
    parallel_for(vals.size(), [&](std::size_t k) {
      vals[k] = fiber_mean_log(F, x.x, (static_cast<double>(k) + 0.5) * h, x.y);
    });
    double s = 0.0;
    for (double v : vals) s += v;
    return s / n;
  };
  int n = std::max(n0, 32);
  double prev = value_at(n);
  for (n *= 2; n <= n_max; n *= 2) {
    const double v = value_at(n);
    if (std::abs(v - prev) < tol) return v;
    prev = v;
  }
  return prev;
}

namespace {

struct GradientPass {
  Vec2 grad;
  double min_abs = 1e308;  // smallest |F| seen at a node, relative scale
};

GradientPass gradient_fixed(const LaurentPolynomial& F, const Vec2& x, int nq) {
  const TorusTerms T(F, x);
  const std::size_t nterms = T.size();
  const double h = kTwoPi / nq;

  std::vector<double> g1(static_cast<std::size_t>(nq)), g2(g1.size()), mn(g1.size());
  parallel_for(static_cast<std::size_t>(nq), [&](std::size_t r) {
    const double t1 = (static_cast<double>(r) + 0.5) * h;
    std::vector<cd> cur(nterms), step(nterms);
    for (std::size_t t = 0; t < nterms; ++t) {
      cur[t] = std::polar(T.w[t], T.a1[t] * t1 + T.a2[t] * 0.5 * h + T.phase0[t]);
      step[t] = std::polar(1.0, T.a2[t] * h);
    }
    double a1 = 0.0, a2 = 0.0, m = 1e308;
    for (int b = 0; b < nq; ++b) {
      cd s0(0.0), s1(0.0), s2(0.0);
      for (std::size_t t = 0; t < nterms; ++t) {
        s0 += cur[t];
        s1 += static_cast<double>(T.a1[t]) * cur[t];
        s2 += static_cast<double>(T.a2[t]) * cur[t];
      }
      m = std::min(m, std::abs(s0));
      const cd inv = 1.0 / s0;
      a1 += (s1 * inv).real();
      a2 += (s2 * inv).real();
      for (std::size_t t = 0; t < nterms; ++t) cur[t] *= step[t];
    }
    g1[r] = a1;
    g2[r] = a2;
    mn[r] = m;
  });

  GradientPass out;
  double t1 = 0.0, t2 = 0.0;
  for (std::size_t r = 0; r < g1.size(); ++r) {
    t1 += g1[r];
    t2 += g2[r];
    out.min_abs = std::min(out.min_abs, mn[r]);
  }
  const double n2 = static_cast<double>(nq) * nq;
  out.grad = Vec2(t1 / n2, t2 / n2);
  return out;
}

}  // namespace

Vec2 ronkin_gradient(const LaurentPolynomial& F, const Vec2& x, int nq, double tol,
                     int nq_max) {
  F.finalize();
  nq = std::max(nq, 16);
  for (int attempt = 0; attempt < 6; ++attempt) {
    const Vec2 xa(x.x + 0.9e-6 * attempt, x.y + 1.1e-6 * attempt);
    GradientPass prev = gradient_fixed(F, xa, nq);
    if (prev.min_abs < 1e-9) continue;  // a node grazed a zero of F
    bool singular = false;
    for (int n = 2 * nq; n <= nq_max; n *= 2) {
      GradientPass cur = gradient_fixed(F, xa, n);
      if (cur.min_abs < 1e-9) {
        singular = true;
        break;
      }
      if (std::abs(cur.grad.x - prev.grad.x) < tol &&
          std::abs(cur.grad.y - prev.grad.y) < tol)
        return cur.grad;
      prev = cur;
    }
    if (!singular) return prev.grad;
  }
  throw std::runtime_error("ronkin_gradient: quadrature kept grazing zeros of F");
}

OrderMapResult order_map_classical(const LaurentPolynomial& F,
                                   const AmoebaRaster& raster,
                                   const ComponentMap& components, int nq) {
  if (!components.grid.same_layout(raster.grid))
    throw std::invalid_argument("order_map_classical: component map grid mismatch");
  const std::vector<double> dist = distance_to_occupied(raster.mask);
  const Grid2& g = raster.grid;

  OrderMapResult out;
  out.orders.resize(static_cast<std::size_t>(components.n_components));
  parallel_for(out.orders.size(), [&](std::size_t idx) {
    const int label = static_cast<int>(idx) + 1;
    ComponentOrder co;
    co.label = label;
    int best = -1;
    double best_d = -1.0;
    for (int c : components.cells_of(label)) {
      if (dist[static_cast<std::size_t>(c)] > best_d) {
        best_d = dist[static_cast<std::size_t>(c)];
        best = c;
      }
    }
    if (best < 0) throw std::runtime_error("order_map_classical: empty component");
    co.probe = g.cell_center(best % g.n1, best / g.n1);
    co.raw = ronkin_gradient(F, co.probe, nq);
    co.rounded[0] = static_cast<int>(std::lround(co.raw.x));
    co.rounded[1] = static_cast<int>(std::lround(co.raw.y));
    co.rounding_distance =
        std::hypot(co.raw.x - co.rounded[0], co.raw.y - co.rounded[1]);
    co.under_resolved = co.rounding_distance > 0.1;
    out.orders[idx] = co;
  });

  const Polytope N = support_polytope(F);
  for (std::size_t i = 0; i < out.orders.size(); ++i) {
    const ComponentOrder& a = out.orders[i];
    if (!N.contains(Vec2(a.rounded[0], a.rounded[1]), 1e-9))
      out.inside_newton_polytope = false;
    for (std::size_t j = i + 1; j < out.orders.size(); ++j) {
      const ComponentOrder& b = out.orders[j];
      if (a.rounded[0] == b.rounded[0] && a.rounded[1] == b.rounded[1])
        out.integers_distinct = false;
    }
  }
  return out;
}

MongeAmpereMass ma_total_mass_classical(const LaurentPolynomial& F,
                                        const AmoebaRaster& raster, int eval_n,
                                        int nq) {
  if (eval_n < 2) throw std::invalid_argument("ma_total_mass_classical: eval_n >= 2");
  const Grid2& g = raster.grid;
  const std::vector<double> dist = distance_to_occupied(raster.mask);
  const double fd_h = 1.5 * std::max(g.h1(), g.h2());

  MongeAmpereMass out;
  out.samples = eval_n * eval_n;
  out.gradients.resize(static_cast<std::size_t>(out.samples));
  parallel_for(out.gradients.size(), [&](std::size_t idx) {
    const int i = static_cast<int>(idx) % eval_n;
    const int j = static_cast<int>(idx) / eval_n;
    const Vec2 p(g.box.lo1 + (i + 0.5) * (g.box.hi1 - g.box.lo1) / eval_n,
                 g.box.lo2 + (j + 0.5) * (g.box.hi2 - g.box.lo2) / eval_n);
    const int cell = g.locate_cell(p);
    if (dist[static_cast<std::size_t>(cell)] >= 2.0) {
      out.gradients[idx] = ronkin_gradient(F, p, nq);
    } else {
      // On or next to the amoeba the torus rule stalls; central differences
      // of the fiberwise value stay accurate there.
      const double tol = 1e-7;
      const double vxp = ronkin_value_fiber(F, Vec2(p.x + fd_h, p.y), tol, 512, 1 << 13);
      const double vxm = ronkin_value_fiber(F, Vec2(p.x - fd_h, p.y), tol, 512, 1 << 13);
      const double vyp = ronkin_value_fiber(F, Vec2(p.x, p.y + fd_h), tol, 512, 1 << 13);
      const double vym = ronkin_value_fiber(F, Vec2(p.x, p.y - fd_h), tol, 512, 1 << 13);
      out.gradients[idx] = Vec2((vxp - vxm) / (2.0 * fd_h), (vyp - vym) / (2.0 * fd_h));
    }
  });

  const Polytope N = support_polytope(F);
  for (const Vec2& gr : out.gradients) {
    if (!N.contains(gr, out.slack)) ++out.outside_newton;
  }
  out.flagged = out.outside_newton > 0;
  out.mass = convex_hull(out.gradients).area();
  return out;
}

}  // namespace amoebalab
