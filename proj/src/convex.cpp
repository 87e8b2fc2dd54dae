#include "amoebalab/convex.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "amoebalab/util.hpp"

namespace amoebalab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double wrap_angle(double a) {
  while (a < 0) a += kTwoPi;
  while (a >= kTwoPi) a -= kTwoPi;
  return a;
}

// Counterclockwise angular distance from a to b in [0, 2pi).
double ccw_gap(double a, double b) { return wrap_angle(b - a); }

double circular_dist(double a, double b) {
  double d = std::fabs(wrap_angle(a) - wrap_angle(b));
  return std::min(d, kTwoPi - d);
}

}  // namespace

double Polytope::area() const {
  if (kind != HullKind::Polygon) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const Vec2& a = vertices[i];
    const Vec2& b = vertices[(i + 1) % vertices.size()];
    s += a.cross(b);
  }
  return 0.5 * s;
}

bool Polytope::contains(const Vec2& p, double slack) const {
  if (kind == HullKind::Point) return dist(p, vertices[0]) <= slack;
  if (kind == HullKind::Segment) {
    const Vec2 a = vertices.front(), b = vertices.back();
    Vec2 d = b - a;
    double len2 = d.dot(d);
    double t = len2 > 0 ? std::clamp((p - a).dot(d) / len2, 0.0, 1.0) : 0.0;
    return dist(p, a + d * t) <= slack;
  }
  for (const Facet& f : facets) {
    if (f.normal.dot(p) > f.offset + slack) return false;
  }
  return true;
}

Polytope convex_hull(std::vector<Vec2> points) {
  if (points.empty()) throw std::invalid_argument("convex_hull: need at least one point");
  std::sort(points.begin(), points.end(), [](const Vec2& a, const Vec2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  points.erase(std::unique(points.begin(), points.end(),
                           [](const Vec2& a, const Vec2& b) {
                             return a.x == b.x && a.y == b.y;
                           }),
               points.end());

  Polytope P;
  if (points.size() == 1) {
    P.kind = HullKind::Point;
    P.vertices = points;
    return P;
  }

  // Andrew monotone chain; strict turns only, so collinear interior points drop out.
  auto build = [&](bool lower) {
    std::vector<Vec2> chain;
    auto scan = [&](const Vec2& p) {
      while (chain.size() >= 2) {
        Vec2 u = chain[chain.size() - 1] - chain[chain.size() - 2];
        Vec2 v = p - chain[chain.size() - 1];
        if (u.cross(v) <= 0)
          chain.pop_back();
        else
          break;
      }
      chain.push_back(p);
    };
    if (lower)
      for (const Vec2& p : points) scan(p);
    else
      for (auto it = points.rbegin(); it != points.rend(); ++it) scan(*it);
    return chain;
  };

  std::vector<Vec2> lower = build(true), upper = build(false);
  std::vector<Vec2> hull(lower.begin(), lower.end() - 1);
  hull.insert(hull.end(), upper.begin(), upper.end() - 1);

  if (hull.size() < 3) {
    // All points collinear: keep the two extremes.
    P.kind = HullKind::Segment;
    P.vertices = {points.front(), points.back()};
    return P;
  }

  P.kind = HullKind::Polygon;
  P.vertices = hull;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Vec2& a = hull[i];
    const Vec2& b = hull[(i + 1) % hull.size()];
    Vec2 d = b - a;
    Vec2 n = Vec2{d.y, -d.x}.unit();  // outward for a counterclockwise polygon
    P.facets.push_back({n, n.dot(a)});
  }
  return P;
}

bool Cone::contains(const Vec2& dir, double angular_tol) const {
  if (kind == ConeKind::Full) return true;
  if (kind == ConeKind::Zero) return false;
  double a = dir.angle();
  if (kind == ConeKind::Ray) return circular_dist(a, generators[0].angle()) <= angular_tol;
  if (kind == ConeKind::Line) {
    double g = generators[0].angle();
    return std::min(circular_dist(a, g), circular_dist(a, g + M_PI)) <= angular_tol;
  }
  double start = generators[0].angle();
  double span = ccw_gap(start, generators[1].angle());
  if (span == 0) span = kTwoPi;  // antipodal rounding guard
  return ccw_gap(start - angular_tol, a) <= span + 2 * angular_tol;
}

double Cone::span_radians() const {
  switch (kind) {
    case ConeKind::Zero:
    case ConeKind::Ray:
      return 0.0;
    case ConeKind::Line:
      return M_PI;
    case ConeKind::Full:
      return kTwoPi;
    case ConeKind::Sector:
      return ccw_gap(generators[0].angle(), generators[1].angle());
  }
  return 0.0;
}

Cone make_cone(const std::vector<Vec2>& rays) {
  std::vector<double> angles;
  for (const Vec2& r : rays) {
    if (r.norm() == 0) continue;
    double a = wrap_angle(r.angle());
    bool dup = false;
    for (double b : angles)
      if (circular_dist(a, b) <= 1e-9) dup = true;
    if (!dup) angles.push_back(a);
  }
  Cone c;
  if (angles.empty()) return c;  // Zero
  if (angles.size() == 1) {
    c.kind = ConeKind::Ray;
    c.generators = {Vec2{std::cos(angles[0]), std::sin(angles[0])}};
    return c;
  }
  std::sort(angles.begin(), angles.end());
  // Largest angular gap between consecutive rays. If it is >= pi, the conic
  // hull is the sweep over the complement; otherwise the rays positively
  // span the whole plane.
  double best_gap = -1;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    double next = angles[(i + 1) % angles.size()];
    double gap = ccw_gap(angles[i], next);
    if (i + 1 == angles.size()) gap = ccw_gap(angles[i], angles[0]);
    if (gap > best_gap) {
      best_gap = gap;
      best_i = i;
    }
  }
  if (best_gap < M_PI - 1e-12) {
    c.kind = ConeKind::Full;
    return c;
  }
  double start = angles[(best_i + 1) % angles.size()];
  double end = angles[best_i];
  double span = ccw_gap(start, end);
  if (std::fabs(best_gap - M_PI) <= 1e-12 && std::fabs(span - M_PI) <= 1e-12) {
    // Two antipodal rays only: a line through the origin.
    c.kind = ConeKind::Line;
    c.generators = {Vec2{std::cos(start), std::sin(start)},
                    Vec2{std::cos(end), std::sin(end)}};
    return c;
  }
  c.kind = span <= 1e-12 ? ConeKind::Ray : ConeKind::Sector;
  c.generators = {Vec2{std::cos(start), std::sin(start)}};
  if (c.kind == ConeKind::Sector) c.generators.push_back(Vec2{std::cos(end), std::sin(end)});
  return c;
}

Cone normal_cone(const Polytope& P, const Vec2& vertex) {
  std::size_t idx = P.vertices.size();
  for (std::size_t i = 0; i < P.vertices.size(); ++i) {
    if (dist(P.vertices[i], vertex) <= 1e-9) {
      idx = i;
      break;
    }
  }
  if (idx == P.vertices.size())
    throw std::invalid_argument("normal_cone: point is not a vertex of the polytope");

  if (P.kind == HullKind::Point) {
    Cone c;
    c.kind = ConeKind::Full;
    return c;
  }
  if (P.kind == HullKind::Segment) {
    // Half-plane of directions pointing away from the other endpoint.
    const Vec2& other = P.vertices[idx == 0 ? 1 : 0];
    Vec2 u = (vertex - other).unit();
    Vec2 w{-u.y, u.x};
    Cone c;
    c.kind = ConeKind::Sector;
    c.generators = {Vec2{-w.x, -w.y}, w};  // sweep through u, span pi
    return c;
  }
  std::size_t n = P.vertices.size();
  const Facet& fin = P.facets[(idx + n - 1) % n];  // edge arriving at the vertex
  const Facet& fout = P.facets[idx];               // edge leaving the vertex
  return make_cone({fin.normal, fout.normal});
}

double cone_mismatch_deg(const Cone& a, const Cone& b) {
  auto deg = [](double rad) { return rad * 180.0 / M_PI; };
  if (a.kind == b.kind && (a.kind == ConeKind::Zero || a.kind == ConeKind::Full)) return 0.0;
  if (a.kind == ConeKind::Zero || b.kind == ConeKind::Zero || a.kind == ConeKind::Full ||
      b.kind == ConeKind::Full)
    return 180.0;
  auto boundary = [](const Cone& c) {
    double s = c.generators[0].angle();
    double e = c.generators.size() > 1 ? c.generators[1].angle() : s;
    if (c.kind == ConeKind::Line) e = s + M_PI;
    return std::pair<double, double>{s, e};
  };
  auto [as, ae] = boundary(a);
  auto [bs, be] = boundary(b);
  return deg(std::max(circular_dist(as, bs), circular_dist(ae, be)));
}

std::vector<int> ComponentMap::cells_of(int id) const {
  std::vector<int> out;
  for (std::size_t c = 0; c < labels.size(); ++c)
    if (labels[c] == id) out.push_back(static_cast<int>(c));
  return out;
}

bool ComponentMap::touches_boundary(int id) const {
  for (int i = 0; i < grid.n1; ++i) {
    if (label_at(i, 0) == id || label_at(i, grid.n2 - 1) == id) return true;
  }
  for (int j = 0; j < grid.n2; ++j) {
    if (label_at(0, j) == id || label_at(grid.n1 - 1, j) == id) return true;
  }
  return false;
}

ComponentMap flood_components(const CellMask& mask) {
  ComponentMap cm;
  cm.grid = mask.grid;
  const int n1 = mask.grid.n1, n2 = mask.grid.n2;
  cm.labels.assign(static_cast<std::size_t>(n1) * n2, -1);
  for (std::size_t c = 0; c < mask.occupied.size(); ++c)
    if (mask.occupied[c]) cm.labels[c] = 0;

  int next = 1;
  std::deque<std::pair<int, int>> queue;
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      if (cm.labels[static_cast<std::size_t>(mask.grid.cell_index(i, j))] != -1) continue;
      int id = next++;
      queue.clear();
      queue.emplace_back(i, j);
      cm.labels[static_cast<std::size_t>(mask.grid.cell_index(i, j))] = id;
      while (!queue.empty()) {
        auto [ci, cj] = queue.front();
        queue.pop_front();
        const int di[4] = {1, -1, 0, 0};
        const int dj[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          int ni = ci + di[k], nj = cj + dj[k];
          if (ni < 0 || ni >= n1 || nj < 0 || nj >= n2) continue;
          std::size_t nidx = static_cast<std::size_t>(mask.grid.cell_index(ni, nj));
          if (cm.labels[nidx] == -1) {
            cm.labels[nidx] = id;
            queue.emplace_back(ni, nj);
          }
        }
      }
    }
  }
  cm.n_components = next - 1;
  return cm;
}

double hausdorff_distance(const std::vector<Vec2>& A, const std::vector<Vec2>& B) {
  if (A.empty() || B.empty())
    throw std::invalid_argument("hausdorff_distance: empty point set");
  auto directed2 = [](const std::vector<Vec2>& X, const std::vector<Vec2>& Y) {
    double worst = 0.0;
    for (const Vec2& x : X) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vec2& y : Y) {
        double dx = x.x - y.x, dy = x.y - y.y;
        double d2 = dx * dx + dy * dy;
        if (d2 < best) {
          best = d2;
          if (best <= worst) break;  // cannot raise the running max
        }
      }
      if (best > worst) worst = best;
    }
    return worst;
  };
  return std::sqrt(std::max(directed2(A, B), directed2(B, A)));
}

bool is_convex_region(const ComponentMap& C, int id, int trials, std::uint64_t seed) {
  std::vector<int> cells = C.cells_of(id);
  if (cells.empty()) throw std::invalid_argument("is_convex_region: no such component");
  if (cells.size() < 3) return true;

  const Grid2& g = C.grid;
  auto in_collar = [&](const Vec2& p) {
    int c = g.locate_cell(p);
    if (c < 0) return false;  // box is convex, so this should not trigger
    if (C.labels[static_cast<std::size_t>(c)] == id) return true;
    int ci = c % g.n1, cj = c / g.n1;
    for (int dj = -1; dj <= 1; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        int ni = ci + di, nj = cj + dj;
        if (ni < 0 || ni >= g.n1 || nj < 0 || nj >= g.n2) continue;
        if (C.label_at(ni, nj) == id) return true;
      }
    }
    return false;
  };

  auto rng = make_rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
  double step = 0.4 * std::min(g.h1(), g.h2());
  for (int t = 0; t < trials; ++t) {
    int ca = cells[pick(rng)], cb = cells[pick(rng)];
    Vec2 a = g.cell_center(ca % g.n1, ca / g.n1);
    Vec2 b = g.cell_center(cb % g.n1, cb / g.n1);
    double len = dist(a, b);
    int nsteps = std::max(1, static_cast<int>(len / step));
    for (int s = 1; s < nsteps; ++s) {
      Vec2 p = a + (b - a) * (static_cast<double>(s) / nsteps);
      if (!in_collar(p)) return false;
    }
  }
  return true;
}

Cone recession_cone_estimate(const ComponentMap& C, int id, double R_probe, double step_deg) {
  std::vector<int> cells = C.cells_of(id);
  if (cells.empty()) throw std::invalid_argument("recession_cone_estimate: no such component");
  Cone zero;
  if (!C.touches_boundary(id)) return zero;
  (void)R_probe;  // rays always march to the box edge; the parameter is a floor

  const Grid2& g = C.grid;
  bool has_occupied = false;
  for (int l : C.labels)
    if (l == 0) has_occupied = true;
  if (!has_occupied && C.n_components == 1) {
    Cone full;
    full.kind = ConeKind::Full;
    return full;
  }

  // Anchors: component cells hugging the occupied set see the boundary at the
  // shallowest grazing angles and give the sharpest kills; a sparse interior
  // spread covers the rest.
  std::vector<Vec2> anchors;
  {
    CellMask occ(g);
    for (std::size_t c = 0; c < C.labels.size(); ++c)
      if (C.labels[c] == 0) occ.occupied[c] = 1;
    const std::vector<double> dband = distance_to_occupied(occ);
    std::vector<int> ring;
    for (int c : cells) {
      const double d = dband[static_cast<std::size_t>(c)];
      if (d >= 0.9 && d <= 2.1) ring.push_back(c);
    }
    const std::size_t stride_r = std::max<std::size_t>(1, ring.size() / 160);
    for (std::size_t k = 0; k < ring.size(); k += stride_r)
      anchors.push_back(g.cell_center(ring[k] % g.n1, ring[k] / g.n1));
    const std::size_t stride = std::max<std::size_t>(1, cells.size() / 24);
    for (std::size_t k = 0; k < cells.size(); k += stride)
      anchors.push_back(g.cell_center(cells[k] % g.n1, cells[k] / g.n1));
  }

  // Per-step verdict: 0 for own cells (or off-grid), 1 for wall cells (non-own
  // but 8-adjacent to the component: pixel jitter lands here), 2 for anything
  // deeper. A brief corner clip of the wall must not kill a direction, but a
  // sustained glide inside the first band column must.
  auto classify = [&](const Vec2& p) {
    int c = g.locate_cell(p);
    if (c < 0) return 0;  // left the grid: no evidence against the ray
    if (C.labels[static_cast<std::size_t>(c)] == id) return 0;
    int ci = c % g.n1, cj = c / g.n1;
    for (int dj = -1; dj <= 1; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        int ni = ci + di, nj = cj + dj;
        if (ni < 0 || ni >= g.n1 || nj < 0 || nj >= g.n2) continue;
        if (C.label_at(ni, nj) == id) return 1;
      }
    }
    return 2;
  };

  // A direction survives when no anchor ray accumulates two cells' worth of
  // off-component evidence without touching home in between.
  const double march = 0.5 * std::min(g.h1(), g.h2());
  auto survives = [&](double ang_deg) {
    const double ang = ang_deg * M_PI / 180.0;
    const Vec2 v{std::cos(ang), std::sin(ang)};
    for (const Vec2& a : anchors) {
      int bad = 0;
      for (int s = 1;; ++s) {
        const Vec2 p = a + v * (s * march);
        if (!g.box.contains(p)) break;
        const int k = classify(p);
        if (k == 0) {
          bad = 0;
          continue;
        }
        bad += k;
        if (bad >= 4) return false;
      }
    }
    return true;
  };

  if (step_deg <= 0 || step_deg > 1.0) step_deg = 1.0;
  const int ndir = static_cast<int>(std::round(360.0 / step_deg));
  std::vector<char> good(static_cast<std::size_t>(ndir), 0);
  for (int d = 0; d < ndir; ++d) good[static_cast<std::size_t>(d)] = survives(d * step_deg) ? 1 : 0;

  int total = 0;
  for (char c : good) total += c;
  if (total == 0) return zero;
  if (total == ndir) {
    Cone full;
    full.kind = ConeKind::Full;
    return full;
  }
  // Longest circular run of surviving directions.
  int best_len = 0, best_start = 0;
  int i = 0;
  while (good[static_cast<std::size_t>(i % ndir)] && i < ndir) ++i;  // start at a gap
  for (int k = 0; k < ndir; ++k) {
    int idx = (i + k) % ndir;
    if (good[static_cast<std::size_t>(idx)]) {
      int len = 0;
      int start = idx;
      while (len < ndir && good[static_cast<std::size_t>((start + len) % ndir)]) ++len;
      if (len > best_len) {
        best_len = len;
        best_start = start;
      }
      k += len - 1;
    }
  }
  // Bisect both arc boundaries well below the scan resolution.
  double lo = best_start * step_deg;
  double hi = (best_start + best_len - 1) * step_deg;
  {
    double a = lo - step_deg, b = lo;
    for (int it = 0; it < 6; ++it) {
      const double m = 0.5 * (a + b);
      if (survives(m)) b = m; else a = m;
    }
    lo = b;
    a = hi;
    b = hi + step_deg;
    for (int it = 0; it < 6; ++it) {
      const double m = 0.5 * (a + b);
      if (survives(m)) a = m; else b = m;
    }
    hi = a;
  }
  const double d2r = M_PI / 180.0;
  if (hi - lo < 0.75 * step_deg) {
    const double mid = 0.5 * (lo + hi) * d2r;
    return make_cone({Vec2{std::cos(mid), std::sin(mid)}});
  }
  Cone c;
  c.kind = ConeKind::Sector;
  c.generators = {Vec2{std::cos(lo * d2r), std::sin(lo * d2r)},
                  Vec2{std::cos(hi * d2r), std::sin(hi * d2r)}};
  return c;
}

std::vector<double> distance_to_occupied(const CellMask& mask) {
  const Grid2& g = mask.grid;
  const double INF = 1e18;
  std::vector<double> d(static_cast<std::size_t>(g.cell_count()), INF);
  for (std::size_t c = 0; c < mask.occupied.size(); ++c)
    if (mask.occupied[c]) d[c] = 0.0;
  const double SQ2 = std::sqrt(2.0);
  auto relax = [&](int i, int j, int pi, int pj, double w) {
    if (pi < 0 || pi >= g.n1 || pj < 0 || pj >= g.n2) return;
    std::size_t a = static_cast<std::size_t>(g.cell_index(i, j));
    std::size_t b = static_cast<std::size_t>(g.cell_index(pi, pj));
    if (d[b] + w < d[a]) d[a] = d[b] + w;
  };
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      relax(i, j, i - 1, j, 1.0);
      relax(i, j, i, j - 1, 1.0);
      relax(i, j, i - 1, j - 1, SQ2);
      relax(i, j, i + 1, j - 1, SQ2);
    }
  }
  for (int j = g.n2 - 1; j >= 0; --j) {
    for (int i = g.n1 - 1; i >= 0; --i) {
      relax(i, j, i + 1, j, 1.0);
      relax(i, j, i, j + 1, 1.0);
      relax(i, j, i + 1, j + 1, SQ2);
      relax(i, j, i - 1, j + 1, SQ2);
    }
  }
  return d;
}

}  // namespace amoebalab
