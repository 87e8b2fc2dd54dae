#include "amoebalab/generalized.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "amoebalab/util.hpp"

namespace amoebalab {

namespace {

using cd = std::complex<double>;
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr int kSubstreams = 32;  // fixed substream count keeps runs thread-count independent

double log_abs(const cd& z) { return 0.5 * std::log(std::norm(z)); }

}  // namespace

MarkedSphere build_marked_sphere(const std::vector<cd>& points,
                                 const std::vector<std::vector<double>>& residues,
                                 cd base_point) {
  if (points.empty()) throw std::invalid_argument("build_marked_sphere: no marked points");
  if (residues.size() != 2)
    throw std::invalid_argument("build_marked_sphere: residues must have 2 rows");
  for (const auto& row : residues) {
    if (row.size() != points.size())
      throw std::invalid_argument("build_marked_sphere: residue row length != point count");
    for (double a : row) {
      if (!std::isfinite(a))
        throw std::invalid_argument("build_marked_sphere: non-real residue");
    }
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (std::abs(points[i] - points[j]) <= 1e-9)
        throw std::invalid_argument("build_marked_sphere: coincident marked points");
    }
    if (std::abs(base_point - points[i]) <= 1e-9)
      throw std::invalid_argument("build_marked_sphere: base point on a marked point");
  }

  MarkedSphere MS;
  MS.points = points;
  MS.residues = residues;
  MS.base_point = base_point;
  MS.all_zero = true;
  for (int j = 0; j < 2; ++j) {
    double sum = 0.0;
    for (double a : residues[static_cast<std::size_t>(j)]) {
      sum += a;
      if (a != 0.0) MS.all_zero = false;
    }
    MS.inf_residue[j] = -sum;
  }
  return MS;
}

Vec2 log_map(const MarkedSphere& MS, cd z) {
  Vec2 x(0.0, 0.0);
  for (std::size_t k = 0; k < MS.points.size(); ++k) {
    const double d = std::abs(z - MS.points[k]);
    if (d <= 1e-12) throw std::invalid_argument("log_map: z on a marked point");
    const double l = std::log(d) - log_abs(MS.base_point - MS.points[k]);
    x.x += MS.residues[0][k] * l;
    x.y += MS.residues[1][k] * l;
  }
  return x;
}

RankResult jacobian_rank(const MarkedSphere& MS, cd z) {
  RankResult out;
  double mag1 = 0.0, mag2 = 0.0;
  for (std::size_t k = 0; k < MS.points.size(); ++k) {
    const cd d = z - MS.points[k];
    if (std::abs(d) <= 1e-12)
      throw std::invalid_argument("jacobian_rank: z on a marked point");
    const cd inv = 1.0 / d;
    out.phi1 += MS.residues[0][k] * inv;
    out.phi2 += MS.residues[1][k] * inv;
    mag1 += std::abs(MS.residues[0][k]) * std::abs(inv);
    mag2 += std::abs(MS.residues[1][k]) * std::abs(inv);
  }
  const bool zero1 = std::abs(out.phi1) <= 1e-12 * mag1;
  const bool zero2 = std::abs(out.phi2) <= 1e-12 * mag2;
  out.dim_L = (zero1 && zero2) ? 0 : 1;
  if (out.dim_L == 1) {
    // conj(L) = L iff phi is a complex multiple of a real vector, i.e.
    // phi1 conj(phi2) is real (or one entry vanishes).
    const double n2 = std::norm(out.phi1) + std::norm(out.phi2);
    const double im = std::imag(out.phi1 * std::conj(out.phi2));
    out.dim_L_cap_conj = (std::abs(im) <= 1e-9 * n2) ? 1 : 0;
  }
  out.rank = 2 * out.dim_L - out.dim_L_cap_conj;
  return out;
}

FanReport asymptotic_fan(const MarkedSphere& MS) {
  FanReport fan;
  double vsum1 = 0.0, vsum2 = 0.0;
  for (std::size_t k = 0; k < MS.points.size(); ++k) {
    const Vec2 v(-MS.residues[0][k], -MS.residues[1][k]);
    fan.rays.push_back(v);
    if (v.x == 0.0 && v.y == 0.0) fan.zero_rays.push_back(static_cast<int>(k));
    vsum1 += MS.residues[0][k];
    vsum2 += MS.residues[1][k];
  }
  fan.v_inf = Vec2(vsum1, vsum2);
  if (fan.v_inf.x == 0.0 && fan.v_inf.y == 0.0)
    fan.zero_rays.push_back(static_cast<int>(MS.points.size()));
  bool any = (fan.v_inf.x != 0.0 || fan.v_inf.y != 0.0);
  for (const Vec2& v : fan.rays) any = any || (v.x != 0.0 || v.y != 0.0);
  fan.dim = any ? 1 : 0;
  return fan;
}

std::vector<Vec2> fan_support_sample(const FanReport& fan, const Box2& box,
                                     int per_ray) {
  std::vector<Vec2> rays = fan.rays;
  rays.push_back(fan.v_inf);
  std::vector<Vec2> out;
  const bool origin_inside = box.contains(Vec2(0.0, 0.0));
  if (origin_inside) out.push_back(Vec2(0.0, 0.0));
  for (const Vec2& r : rays) {
    const double n = r.norm();
    if (n == 0.0) continue;
    const Vec2 u = r / n;
    // Clip the ray {t u : t >= 0} to the box with axis slabs.
    double tlo = 0.0, thi = 1e308;
    bool empty = false;
    const double los[2] = {box.lo1, box.lo2};
    const double his[2] = {box.hi1, box.hi2};
    const double us[2] = {u.x, u.y};
    for (int a = 0; a < 2; ++a) {
      if (std::abs(us[a]) < 1e-15) {
        if (0.0 < los[a] || 0.0 > his[a]) empty = true;
      } else {
        double t0 = los[a] / us[a], t1 = his[a] / us[a];
        if (t0 > t1) std::swap(t0, t1);
        tlo = std::max(tlo, t0);
        thi = std::min(thi, t1);
      }
    }
    if (empty || thi < tlo) continue;
    for (int i = 0; i < per_ray; ++i) {
      const double t = tlo + (thi - tlo) * i / (per_ray - 1);
      out.push_back(u * t);
    }
  }
  return out;
}

NondegeneracyResult nondegeneracy(const MarkedSphere& MS) {
  NondegeneracyResult out;
  for (int j = 0; j < 2; ++j) {
    for (double a : MS.residues[static_cast<std::size_t>(j)]) {
      if (a != 0.0) out.nondegenerate = true;
    }
  }
  const FanReport fan = asymptotic_fan(MS);
  out.fan_dim = fan.dim;
  out.criteria_agree = (out.nondegenerate == (out.fan_dim == 1));
  return out;
}

namespace {

// Stratified sampling plan for integrals over the punctured plane: a
// log-polar annulus around each marked point with a nonzero residue column,
// a uniform bulk disk covering all marked points, and a log-polar far-field
// annulus out to where the log map has left the target box. Strata overlap;
// samples are weighted by the combined (balance-heuristic) density.
struct Stratum {
  int kind = 0;  // 0 bulk disk, 1 log-polar annulus
  cd center;
  double radius = 0.0;              // bulk
  double log_lo = 0.0, log_hi = 0.0;  // annulus
  long long count = 0;              // planned samples over all substreams

  double q(const cd& z) const {
    if (kind == 0) {
      return (std::abs(z - center) <= radius) ? 1.0 / (kPi * radius * radius) : 0.0;
    }
    const double r2 = std::norm(z - center);
    if (r2 <= 0.0) return 0.0;
    const double lr = 0.5 * std::log(r2);
    if (lr < log_lo || lr > log_hi) return 0.0;
    return 1.0 / (kTwoPi * (log_hi - log_lo) * r2);
  }

  static constexpr double kPi = 3.1415926535897932384626433832795;
};

struct SamplingPlan {
  std::vector<Stratum> strata;
  std::vector<double> delta_k;  // exclusion radius per marked point
  double delta_effective = 0.0;
  double log_r_cut = 0.0;
  long long total = 0;

  double weight_denominator(const cd& z) const {
    double s = 0.0;
    for (const Stratum& st : strata) s += static_cast<double>(st.count) * st.q(z);
    return s;
  }

  bool excluded(const MarkedSphere& MS, const cd& z) const {
    for (std::size_t k = 0; k < MS.points.size(); ++k) {
      if (std::abs(z - MS.points[k]) < delta_k[k]) return true;
    }
    return false;
  }
};

cd draw_from(const Stratum& st, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  if (st.kind == 0) {
    const double r = st.radius * std::sqrt(uni(rng));
    const double th = kTwoPi * uni(rng);
    return st.center + std::polar(r, th);
  }
  const double lr = st.log_lo + (st.log_hi - st.log_lo) * uni(rng);
  const double th = kTwoPi * uni(rng);
  return st.center + std::polar(std::exp(lr), th);
}

bool image_inside(const MarkedSphere& MS, const cd& z, const Box2& box,
                  double margin) {
  Vec2 x;
  try {
    x = log_map(MS, z);
  } catch (const std::invalid_argument&) {
    return false;
  }
  return x.x >= box.lo1 - margin && x.x <= box.hi1 + margin && x.y >= box.lo2 - margin &&
         x.y <= box.hi2 + margin;
}

SamplingPlan build_plan(const MarkedSphere& MS, const Box2& box, long long samples,
                        double delta) {
  SamplingPlan plan;
  const std::size_t s = MS.points.size();
  const double margin = 0.02 * box.diameter() + 0.1;

  cd zc(0.0, 0.0);
  for (const cd& p : MS.points) zc += p;
  zc /= static_cast<double>(s);
  double spread = 0.0;
  for (const cd& p : MS.points) spread = std::max(spread, std::abs(p - zc));
  const double r_bulk = 2.0 * spread + 1.0;

  std::vector<int> active;
  plan.delta_k.assign(s, delta);
  plan.delta_effective = delta;
  for (std::size_t k = 0; k < s; ++k) {
    if (MS.residues[0][k] != 0.0 || MS.residues[1][k] != 0.0)
      active.push_back(static_cast<int>(k));
  }

  for (int k : active) {
    double rho = r_bulk;
    for (std::size_t l = 0; l < s; ++l) {
      if (static_cast<int>(l) != k)
        rho = std::min(rho, 0.45 * std::abs(MS.points[l] - MS.points[static_cast<std::size_t>(k)]));
    }
    double dk = std::min(delta, 0.5 * rho);
    // Shrink the excluded disk until its image has left the box, so no
    // in-box mass is truncated with it.
    for (int tries = 0; tries < 14 && dk > 1e-12; ++tries) {
      bool inside = false;
      for (int a = 0; a < 8 && !inside; ++a) {
        const cd z = MS.points[static_cast<std::size_t>(k)] + std::polar(dk, kTwoPi * a / 8);
        inside = image_inside(MS, z, box, margin);
      }
      if (!inside) break;
      dk *= 0.1;
    }
    dk = std::max(dk, 1e-12);
    plan.delta_k[static_cast<std::size_t>(k)] = dk;
    plan.delta_effective = std::min(plan.delta_effective, dk);
    if (rho > 2.0 * dk) {
      Stratum st;
      st.kind = 1;
      st.center = MS.points[static_cast<std::size_t>(k)];
      st.log_lo = std::log(dk);
      st.log_hi = std::log(rho);
      plan.strata.push_back(st);
    }
  }

  double log_r = std::max(std::log(r_bulk) + 1.0, 3.0);
  if (!MS.all_zero) {
    while (log_r < 60.0) {
      bool inside = false;
      for (int a = 0; a < 8 && !inside; ++a) {
        const cd z = zc + std::polar(std::exp(log_r), kTwoPi * (a + 0.5) / 8);
        inside = image_inside(MS, z, box, margin);
      }
      if (!inside) break;
      log_r += 2.0;
    }
  }
  plan.log_r_cut = log_r;

  const std::size_t n_annuli = plan.strata.size();
  Stratum bulk;
  bulk.kind = 0;
  bulk.center = zc;
  bulk.radius = r_bulk;
  plan.strata.push_back(bulk);

  Stratum far;
  far.kind = 1;
  far.center = zc;
  far.log_lo = std::log(r_bulk);
  far.log_hi = log_r;
  plan.strata.push_back(far);

  // Sample shares: pole annuli 50% split evenly, bulk 30%, far field 20%.
  std::vector<double> share(plan.strata.size(), 0.0);
  if (n_annuli > 0) {
    for (std::size_t i = 0; i < n_annuli; ++i) share[i] = 0.5 / static_cast<double>(n_annuli);
    share[n_annuli] = 0.3;
    share[n_annuli + 1] = 0.2;
  } else {
    share[0] = 0.6;
    share[1] = 0.4;
  }
  long long assigned = 0;
  for (std::size_t i = 0; i + 1 < plan.strata.size(); ++i) {
    plan.strata[i].count = static_cast<long long>(share[i] * static_cast<double>(samples));
    assigned += plan.strata[i].count;
  }
  plan.strata.back().count = samples - assigned;
  plan.total = samples;
  return plan;
}

// Runs fn(substream, z, weight) over the plan's samples, excluded-disk hits
// filtered out. fn is called concurrently for different substreams only.
template <class Fn>
long long run_samples(const MarkedSphere& MS, const SamplingPlan& plan,
                      std::uint64_t seed, const Fn& fn) {
  std::vector<long long> excluded(kSubstreams, 0);
  parallel_for(kSubstreams, [&](std::size_t sub) {
    std::mt19937_64 rng = make_rng(seed, sub);
    for (std::size_t si = 0; si < plan.strata.size(); ++si) {
      const Stratum& st = plan.strata[si];
      const long long lo = st.count * static_cast<long long>(sub) / kSubstreams;
      const long long hi = st.count * (static_cast<long long>(sub) + 1) / kSubstreams;
      for (long long i = lo; i < hi; ++i) {
        const cd z = draw_from(st, rng);
        if (plan.excluded(MS, z)) {
          ++excluded[sub];
          continue;
        }
        const double denom = plan.weight_denominator(z);
        if (!(denom > 0.0)) continue;
        fn(sub, z, 1.0 / denom);
      }
    }
  });
  long long total = 0;
  for (long long e : excluded) total += e;
  return total;
}

}  // namespace

GeneralizedRaster rasterize_generalized(const MarkedSphere& MS, const Box2& box,
                                        int n1, int n2, int samples,
                                        std::uint64_t seed) {
  GeneralizedRaster out;
  out.grid = Grid2(box, n1, n2);
  out.samples = samples;
  const SamplingPlan plan = build_plan(MS, box, samples, 1e-3);

  struct Local {
    std::vector<std::uint8_t> hit;
    int in_box = 0;
    double min_pole = 1e308;
    double max_z = 0.0;
  };
  std::vector<Local> locals(kSubstreams);
  for (Local& l : locals) l.hit.assign(static_cast<std::size_t>(out.grid.cell_count()), 0);

  const Grid2& g = out.grid;
  run_samples(MS, plan, seed, [&](std::size_t sub, const cd& z, double) {
    Vec2 x;
    try {
      x = log_map(MS, z);
    } catch (const std::invalid_argument&) {
      return;
    }
    if (x.x < box.lo1 || x.x > box.hi1 || x.y < box.lo2 || x.y > box.hi2) return;
    Local& l = locals[sub];
    l.hit[static_cast<std::size_t>(g.locate_cell(x))] = 1;
    ++l.in_box;
    for (const cd& p : MS.points) l.min_pole = std::min(l.min_pole, std::abs(z - p));
    l.max_z = std::max(l.max_z, std::abs(z));
  });

  CellMask raw(g);
  out.min_pole_dist = 1e308;
  for (const Local& l : locals) {
    for (std::size_t c = 0; c < l.hit.size(); ++c) {
      if (l.hit[c]) raw.set(static_cast<int>(c));
    }
    out.in_box += l.in_box;
    out.min_pole_dist = std::min(out.min_pole_dist, l.min_pole);
    out.max_abs_z = std::max(out.max_abs_z, l.max_z);
  }
  if (out.in_box == 0) out.min_pole_dist = 0.0;

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

HessianMeasure hessian_pushforward(const MarkedSphere& MS, const Box2& box, int n1,
                                   int n2, long long samples, double delta,
                                   std::uint64_t seed) {
  if (samples < 100000)
    throw std::invalid_argument("hessian_pushforward: needs at least 1e5 samples");
  const Grid2 grid(box, n1, n2);
  const SamplingPlan plan = build_plan(MS, box, samples, delta);

  struct Local {
    std::vector<double> m11, m12, m22;
    double tail = 0.0;
    double trace = 0.0;
  };
  std::vector<Local> locals(kSubstreams);
  for (Local& l : locals) {
    const std::size_t n = static_cast<std::size_t>(grid.cell_count());
    l.m11.assign(n, 0.0);
    l.m12.assign(n, 0.0);
    l.m22.assign(n, 0.0);
  }

  const long long excluded = run_samples(MS, plan, seed, [&](std::size_t sub, const cd& z,
                                                             double w) {
    // G1 carries the second residue row, G2 the first: the (1,1) entry of
    // the Hessian current weights the differential complementary to x1.
    cd G1(0.0), G2(0.0);
    for (std::size_t k = 0; k < MS.points.size(); ++k) {
      const cd inv = 1.0 / (z - MS.points[k]);
      G1 += MS.residues[1][k] * inv;
      G2 += MS.residues[0][k] * inv;
    }
    const double c = w / kTwoPi;
    const double d11 = std::norm(G1) * c;
    const double d22 = std::norm(G2) * c;
    const double d12 = -(G1 * std::conj(G2)).real() * c;
    if (!std::isfinite(d11) || !std::isfinite(d22) || !std::isfinite(d12)) return;

    Vec2 x;
    try {
      x = log_map(MS, z);
    } catch (const std::invalid_argument&) {
      return;
    }
    Local& l = locals[sub];
    if (x.x < box.lo1 || x.x > box.hi1 || x.y < box.lo2 || x.y > box.hi2) {
      l.tail += d11 + d22;
      return;
    }
    const std::size_t cell = static_cast<std::size_t>(grid.locate_cell(x));
    l.m11[cell] += d11;
    l.m12[cell] += d12;
    l.m22[cell] += d22;
    l.trace += d11 + d22;
  });

  HessianMeasure out;
  out.current = SuperCurrent11(grid);
  out.samples = samples;
  out.seed = seed;
  out.delta = delta;
  out.delta_effective = plan.delta_effective;
  out.log_r_cut = plan.log_r_cut;
  out.excluded = excluded;
  double half_even = 0.0, half_odd = 0.0;
  for (std::size_t sub = 0; sub < locals.size(); ++sub) {
    const Local& l = locals[sub];
    for (std::size_t c = 0; c < l.m11.size(); ++c) {
      out.current.masses[0][c] += l.m11[c];
      out.current.masses[1][c] += l.m12[c];
      out.current.masses[2][c] += l.m12[c];
      out.current.masses[3][c] += l.m22[c];
    }
    out.tail_mass += l.tail;
    (sub % 2 == 0 ? half_even : half_odd) += l.trace;
  }
  const double total_trace = half_even + half_odd;
  out.noise_rel =
      (total_trace > 0.0) ? std::abs(half_even - half_odd) / total_trace : 0.0;
  return out;
}

GeneralizedRonkin ronkin_generalized(const MarkedSphere& MS, const Box2& box, int n1,
                                     int n2, long long samples, double delta,
                                     std::uint64_t seed) {
  GeneralizedRonkin out;
  out.hessian = hessian_pushforward(MS, box, n1, n2, samples, delta, seed);
  out.noise_floor = std::max(out.hessian.noise_rel, 1.0 / std::sqrt(static_cast<double>(samples)));

  PotentialOptions opt;
  opt.eps_cells = 3.0;
  // Monte-Carlo inputs cannot meet the exact-input defaults. The curl ratio of
  // the smoothed deposit field scales with the per-cell relative noise
  // sqrt(ncells/samples); garbage inputs measure O(1), so a few of those units
  // still separate valid from invalid. The convexity gap sits at the level of
  // the split-half noise times the total mass.
  const double per_cell_noise = std::sqrt(static_cast<double>(n1) * n2 /
                                          std::max<double>(1.0, static_cast<double>(samples)));
  opt.closed_rel_tol = std::max(1e-6, 1.5 * per_cell_noise);
  opt.convexity_tol =
      std::max(1e-9, 2.0 * out.noise_floor * out.hessian.current.total_abs_mass());
  out.potential = potential_from_current(out.hessian.current, opt);
  return out;
}

GeneralizedOrderResult order_map_generalized(const GridField& R,
                                             const ComponentMap& components,
                                             const CellMask& mask) {
  if (!R.grid.same_layout(components.grid) || !R.grid.same_layout(mask.grid))
    throw std::invalid_argument("order_map_generalized: grid mismatch");
  const std::vector<double> dist = distance_to_occupied(mask);
  const Grid2& g = R.grid;

  GeneralizedOrderResult out;
  for (int label = 1; label <= components.n_components; ++label) {
    const std::vector<int> cells = components.cells_of(label);
    std::vector<int> deep;
    for (double thresh = 3.0; thresh >= 0.0; thresh -= 1.0) {
      deep.clear();
      for (int c : cells) {
        if (dist[static_cast<std::size_t>(c)] >= thresh) deep.push_back(c);
      }
      if (deep.size() >= 6) break;
    }
    if (deep.size() < 6)
      throw std::runtime_error("order_map_generalized: component too small to fit");

    // Least-squares fit R ~ c0 + nu . x over deep cell centers (cell value =
    // mean of the four corner nodes), centered for conditioning.
    double mx = 0.0, my = 0.0;
    for (int c : deep) {
      const Vec2 p = g.cell_center(c % g.n1, c / g.n1);
      mx += p.x;
      my += p.y;
    }
    mx /= static_cast<double>(deep.size());
    my /= static_cast<double>(deep.size());
    double sxx = 0.0, sxy = 0.0, syy = 0.0, sxv = 0.0, syv = 0.0, sv = 0.0;
    std::vector<double> vals(deep.size());
    for (std::size_t idx = 0; idx < deep.size(); ++idx) {
      const int c = deep[idx];
      const int i = c % g.n1, j = c / g.n1;
      const Vec2 p = g.cell_center(i, j);
      const double v = 0.25 * (R.at(i, j) + R.at(i + 1, j) + R.at(i, j + 1) +
                               R.at(i + 1, j + 1));
      vals[idx] = v;
      const double dx = p.x - mx, dy = p.y - my;
      sxx += dx * dx;
      sxy += dx * dy;
      syy += dy * dy;
      sxv += dx * v;
      syv += dy * v;
      sv += v;
    }
    const double det = sxx * syy - sxy * sxy;
    GeneralizedOrder go;
    go.label = label;
    go.cells = static_cast<int>(deep.size());
    if (std::abs(det) < 1e-12 * std::max(1.0, sxx * syy)) {
      // Degenerate geometry (cells collinear): fall back to the dominant axis.
      go.nu = Vec2(sxx > 0 ? sxv / sxx : 0.0, syy > 0 ? syv / syy : 0.0);
    } else {
      go.nu = Vec2((syy * sxv - sxy * syv) / det, (sxx * syv - sxy * sxv) / det);
    }
    const double c0 = sv / static_cast<double>(deep.size());
    for (std::size_t idx = 0; idx < deep.size(); ++idx) {
      const int c = deep[idx];
      const Vec2 p = g.cell_center(c % g.n1, c / g.n1);
      const double fit = c0 + go.nu.x * (p.x - mx) + go.nu.y * (p.y - my);
      go.fit_residual = std::max(go.fit_residual, std::abs(vals[idx] - fit));
    }
    out.orders.push_back(go);
  }

  for (std::size_t i = 0; i < out.orders.size(); ++i) {
    for (std::size_t j = i + 1; j < out.orders.size(); ++j) {
      const Vec2 d = out.orders[i].nu - out.orders[j].nu;
      if (std::max(std::abs(d.x), std::abs(d.y)) <= 0.05) out.distinct = false;
    }
  }
  return out;
}

Polytope newton_polytope_generalized(const std::vector<GeneralizedOrder>& orders) {
  if (orders.empty())
    throw std::invalid_argument("newton_polytope_generalized: no orders");
  std::vector<Vec2> pts;
  pts.reserve(orders.size());
  for (const GeneralizedOrder& o : orders) pts.push_back(o.nu);
  return convex_hull(pts);
}

namespace {

// Expected recession cone for an order vector nu: the normal cone of N at
// the vertex nearest nu, the outward normal ray when nu sits on a facet
// interior, or the zero cone when nu is interior. Inconclusive otherwise.
int classify_order(const Polytope& N, const Vec2& nu, double tol, Cone& expected) {
  double best = 1e308;
  Vec2 best_v;
  for (const Vec2& v : N.vertices) {
    const double d = dist(v, nu);
    if (d < best) {
      best = d;
      best_v = v;
    }
  }
  if (best <= tol) {
    expected = normal_cone(N, best_v);
    return 1;
  }
  if (N.kind == HullKind::Segment) {
    const Vec2 a = N.vertices[0], b = N.vertices[1];
    const Vec2 d = b - a;
    const double L2 = d.dot(d);
    const double t = (nu - a).dot(d) / L2;
    const Vec2 proj = a + d * t;
    if (t > 0.0 && t < 1.0 && dist(proj, nu) <= tol) {
      const Vec2 n = Vec2(d.y, -d.x).unit();
      expected.kind = ConeKind::Line;
      expected.generators = {n, n * -1.0};
      return 2;
    }
    return 0;
  }
  if (N.kind != HullKind::Polygon) return 0;
  for (std::size_t f = 0; f < N.facets.size(); ++f) {
    const Vec2 a = N.vertices[f];
    const Vec2 b = N.vertices[(f + 1) % N.vertices.size()];
    const Vec2 d = b - a;
    const double L2 = d.dot(d);
    const double t = (nu - a).dot(d) / L2;
    if (t <= 0.0 || t >= 1.0) continue;
    const Vec2 proj = a + d * t;
    if (dist(proj, nu) <= tol) {
      expected.kind = ConeKind::Ray;
      expected.generators = {N.facets[f].normal.unit()};
      return 2;
    }
  }
  if (N.contains(nu, 0.0)) {
    bool deep = true;
    for (const Facet& f : N.facets) {
      if (f.normal.dot(nu) > f.offset - tol * f.normal.norm()) deep = false;
    }
    if (deep) {
      expected.kind = ConeKind::Zero;
      return 3;
    }
  }
  return 0;
}

}  // namespace

RecessionReport verify_recession_theorem(const ComponentMap& components,
                                         const Polytope& N,
                                         const std::vector<GeneralizedOrder>& orders,
                                         double pass_deg) {
  RecessionReport report;
  const double probe =
      0.5 * components.grid.box.diameter();
  for (const GeneralizedOrder& o : orders) {
    RecessionCheck chk;
    chk.label = o.label;
    chk.nu = o.nu;
    Cone expected;
    chk.classified = classify_order(N, o.nu, 0.1, expected);
    if (chk.classified == 0) {
      ++report.inconclusive;
      report.checks.push_back(chk);
      continue;
    }
    const Cone rec = recession_cone_estimate(components, o.label, probe, 1.0);
    chk.mismatch_deg = cone_mismatch_deg(rec, expected);
    chk.pass = chk.mismatch_deg <= pass_deg;
    if (!chk.pass) report.all_pass = false;
    report.checks.push_back(chk);
  }
  return report;
}

GeneralizedMass ma_total_mass_generalized(const GridField& R, const Polytope& N,
                                          int margin_nodes) {
  const Grid2& g = R.grid;
  const int blur = 3;
  const int m = std::max(std::max(1, margin_nodes), blur + 1);
  if (g.n1 + 1 <= 2 * m + 2 || g.n2 + 1 <= 2 * m + 2)
    throw std::invalid_argument("ma_total_mass_generalized: grid too small for margin");

  // Box-blur R before differencing. Averaged gradients of a convex function
  // are convex combinations of true ones, so the hull never inflates past the
  // true gradient image, while isolated Monte-Carlo mass spikes (which throw
  // raw finite differences far outside) are damped by the window size.
  GridField Rb(g);
  const double w = 1.0 / ((2 * blur + 1) * (2 * blur + 1));
  for (int j = blur; j <= g.n2 - blur; ++j) {
    for (int i = blur; i <= g.n1 - blur; ++i) {
      double s = 0.0;
      for (int dj = -blur; dj <= blur; ++dj)
        for (int di = -blur; di <= blur; ++di) s += R.at(i + di, j + dj);
      Rb.at(i, j) = s * w;
    }
  }

  GeneralizedMass out;
  std::vector<Vec2> grads;
  for (int j = m; j <= g.n2 - m; ++j) {
    for (int i = m; i <= g.n1 - m; ++i) {
      const double gx = (Rb.at(i + 1, j) - Rb.at(i - 1, j)) / (2.0 * g.h1());
      const double gy = (Rb.at(i, j + 1) - Rb.at(i, j - 1)) / (2.0 * g.h2());
      grads.push_back(Vec2(gx, gy));
    }
  }
  out.samples = static_cast<int>(grads.size());
  for (const Vec2& v : grads) {
    if (!N.contains(v, 0.05)) ++out.outside_newton;
  }
  out.flagged = out.outside_newton > out.samples / 20;

  // Directional quantile trim before hulling: the hull of a noisy cloud is set
  // by its most extreme points, so shave the outermost half percent of
  // projections in each direction and hull the survivors. Dense clusters at
  // the true image's vertices lose essentially nothing.
  std::vector<char> drop(grads.size(), 0);
  const int K = 64;
  std::vector<double> proj(grads.size());
  std::vector<std::size_t> idx(grads.size());
  for (int k = 0; k < K; ++k) {
    const double th = kTwoPi * k / K;
    const Vec2 dir(std::cos(th), std::sin(th));
    for (std::size_t s = 0; s < grads.size(); ++s)
      proj[s] = grads[s].x * dir.x + grads[s].y * dir.y;
    const std::size_t ntrim = grads.size() / 200;
    if (ntrim == 0) continue;
    for (std::size_t s = 0; s < idx.size(); ++s) idx[s] = s;
    std::nth_element(idx.begin(), idx.end() - static_cast<std::ptrdiff_t>(ntrim),
                     idx.end(),
                     [&](std::size_t a, std::size_t b) { return proj[a] < proj[b]; });
    for (std::size_t s = idx.size() - ntrim; s < idx.size(); ++s) drop[idx[s]] = 1;
  }
  std::vector<Vec2> kept;
  kept.reserve(grads.size());
  for (std::size_t s = 0; s < grads.size(); ++s)
    if (!drop[s]) kept.push_back(grads[s]);
  out.mass = convex_hull(kept.empty() ? grads : kept).area();
  return out;
}

FanLimitReport verify_fan_limit(const MarkedSphere& MS,
                                const std::vector<double>& t_list, const Box2& box,
                                int samples, std::uint64_t seed) {
  if (t_list.empty()) throw std::invalid_argument("verify_fan_limit: empty t list");
  for (std::size_t i = 0; i + 1 < t_list.size(); ++i) {
    if (t_list[i] > t_list[i + 1] || t_list[i] <= 0.0)
      throw std::invalid_argument("verify_fan_limit: t values must be positive nondecreasing");
  }
  const NondegeneracyResult nd = nondegeneracy(MS);
  if (!nd.nondegenerate)
    throw std::invalid_argument("verify_fan_limit: degenerate marked sphere");

  const FanReport fan = asymptotic_fan(MS);
  const std::vector<Vec2> support = fan_support_sample(fan, box, 512);
  if (support.empty())
    throw std::runtime_error("verify_fan_limit: fan support misses the box");

  FanLimitReport report;
  const std::size_t s = MS.points.size();
  cd zc(0.0, 0.0);
  for (const cd& p : MS.points) zc += p;
  zc /= static_cast<double>(s);
  double spread = 0.0;
  for (const cd& p : MS.points) spread = std::max(spread, std::abs(p - zc));
  const double r_bulk = 2.0 * spread + 1.0;
  const double box_reach = std::max(
      {std::abs(box.lo1), std::abs(box.hi1), std::abs(box.lo2), std::abs(box.hi2)});

  std::vector<std::size_t> active;
  for (std::size_t k = 0; k < s; ++k)
    if (MS.residues[0][k] != 0.0 || MS.residues[1][k] != 0.0) active.push_back(k);
  const bool outward = MS.inf_residue[0] != 0.0 || MS.inf_residue[1] != 0.0;
  auto min_abs_nonzero = [](double a, double b) {
    double m = 1.0;
    if (a != 0.0) m = std::min(m, std::abs(a));
    if (b != 0.0) m = std::min(m, std::abs(b));
    return m;
  };

  for (double t : t_list) {
    // The map scaled by 1/t squeezes the amoeba toward the fan. Arms then sit
    // at |z - p_k| ~ exp(-t * box), far below what z = p_k + u can represent
    // through the global coordinate, so pole strata are sampled in the local
    // coordinate u and log|z - p_k| is taken as the sampled exponent exactly.
    const std::uint64_t tbits = std::bit_cast<std::uint64_t>(t);
    std::uint64_t st = seed ^ (tbits * 0x9e3779b97f4a7c15ULL);
    std::mt19937_64 rng(splitmix64(st));
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    const int kinds = static_cast<int>(active.size()) + (outward ? 1 : 0) + 1;
    std::vector<Vec2> amoeba;
    for (int i = 0; i < samples; ++i) {
      const int kind = i % kinds;
      Vec2 x(0.0, 0.0);
      bool ok = true;
      if (kind < static_cast<int>(active.size())) {
        const std::size_t k = active[static_cast<std::size_t>(kind)];
        double rho = r_bulk;
        for (std::size_t l = 0; l < s; ++l)
          if (l != k) rho = std::min(rho, 0.45 * std::abs(MS.points[l] - MS.points[k]));
        const double amp = min_abs_nonzero(MS.residues[0][k], MS.residues[1][k]);
        const double lr_lo = -t * (box_reach + 4.0) / amp;
        const double lr = lr_lo + (std::log(rho) - lr_lo) * uni(rng);
        const cd u = std::polar(std::exp(lr), kTwoPi * uni(rng));
        for (std::size_t l = 0; l < s; ++l) {
          const double dl =
              (l == k) ? lr : std::log(std::abs(MS.points[k] + u - MS.points[l]));
          const double v = dl - log_abs(MS.base_point - MS.points[l]);
          x.x += MS.residues[0][l] * v;
          x.y += MS.residues[1][l] * v;
        }
      } else if (outward && kind == static_cast<int>(active.size())) {
        const double amp = min_abs_nonzero(MS.inf_residue[0], MS.inf_residue[1]);
        const double lr_hi = t * (box_reach + 4.0) / amp;
        const double lo = std::log(r_bulk);
        const double lr = lo + (lr_hi - lo) * uni(rng);
        const cd z = zc + std::polar(std::exp(lr), kTwoPi * uni(rng));
        try {
          x = log_map(MS, z);
        } catch (const std::invalid_argument&) {
          ok = false;
        }
      } else {
        const cd z = zc + std::polar(r_bulk * std::sqrt(uni(rng)), kTwoPi * uni(rng));
        try {
          x = log_map(MS, z);
        } catch (const std::invalid_argument&) {
          ok = false;
        }
      }
      if (!ok) continue;
      x = x / t;
      if (x.x < box.lo1 || x.x > box.hi1 || x.y < box.lo2 || x.y > box.hi2) continue;
      amoeba.push_back(x);
    }
    if (amoeba.empty())
      throw std::runtime_error("verify_fan_limit: empty amoeba sample in box");
    if (amoeba.size() > 20000) {
      std::vector<Vec2> thin;
      const std::size_t stride = amoeba.size() / 20000 + 1;
      for (std::size_t i = 0; i < amoeba.size(); i += stride) thin.push_back(amoeba[i]);
      amoeba.swap(thin);
    }

    FanLimitEntry e;
    e.t = t;
    e.amoeba_points = static_cast<int>(amoeba.size());
    e.hausdorff = hausdorff_distance(amoeba, support);
    report.entries.push_back(e);
  }

  for (std::size_t i = 0; i + 1 < report.entries.size(); ++i) {
    if (report.entries[i + 1].hausdorff > 1.1 * report.entries[i].hausdorff)
      report.nonincreasing = false;
  }
  for (const FanLimitEntry& e : report.entries)
    report.fitted_c = std::max(report.fitted_c, e.t * e.hausdorff);
  if (report.entries.back().hausdorff > 0.0) {
    report.first_over_last =
        report.entries.front().hausdorff / report.entries.back().hausdorff;
  } else {
    report.first_over_last = 1e308;
  }
  return report;
}

}  // namespace amoebalab
