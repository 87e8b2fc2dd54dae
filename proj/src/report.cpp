#include "amoebalab/report.hpp"

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

namespace amoebalab {

std::string iso_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ordered_json json_of(const Vec2& v) { return ordered_json{v.x, v.y}; }

ordered_json json_of(const Box2& b) { return ordered_json{b.lo1, b.hi1, b.lo2, b.hi2}; }

namespace {

const char* hull_kind_name(HullKind k) {
  switch (k) {
    case HullKind::Point: return "point";
    case HullKind::Segment: return "segment";
    default: return "polygon";
  }
}

const char* cone_kind_name(ConeKind k) {
  switch (k) {
    case ConeKind::Zero: return "zero";
    case ConeKind::Ray: return "ray";
    case ConeKind::Sector: return "sector";
    case ConeKind::Line: return "line";
    default: return "full";
  }
}

}  // namespace

ordered_json json_of(const Polytope& P) {
  ordered_json j;
  j["kind"] = hull_kind_name(P.kind);
  j["vertices"] = ordered_json::array();
  for (const Vec2& v : P.vertices) j["vertices"].push_back(json_of(v));
  j["area"] = P.area();
  j["degenerate"] = P.kind != HullKind::Polygon;
  return j;
}

ordered_json json_of(const Cone& c) {
  ordered_json j;
  j["kind"] = cone_kind_name(c.kind);
  j["generators"] = ordered_json::array();
  for (const Vec2& v : c.generators) j["generators"].push_back(json_of(v));
  return j;
}

ordered_json json_of(const FanReport& fan) {
  ordered_json j;
  j["rays"] = ordered_json::array();
  for (const Vec2& v : fan.rays) j["rays"].push_back(json_of(v));
  j["v_inf"] = json_of(fan.v_inf);
  j["zero_rays"] = fan.zero_rays;
  j["dim"] = fan.dim;
  return j;
}

ordered_json json_of(const OrderMapResult& om) {
  ordered_json j;
  j["components"] = ordered_json::array();
  for (const ComponentOrder& o : om.orders) {
    ordered_json e;
    e["label"] = o.label;
    e["probe"] = json_of(o.probe);
    e["raw"] = json_of(o.raw);
    e["rounded"] = ordered_json{o.rounded[0], o.rounded[1]};
    e["rounding_distance"] = o.rounding_distance;
    e["under_resolved"] = o.under_resolved;
    j["components"].push_back(e);
  }
  j["integers_distinct"] = om.integers_distinct;
  j["inside_newton_polytope"] = om.inside_newton_polytope;
  return j;
}

ordered_json json_of(const GeneralizedOrderResult& om) {
  ordered_json j;
  j["components"] = ordered_json::array();
  for (const GeneralizedOrder& o : om.orders) {
    ordered_json e;
    e["label"] = o.label;
    e["nu"] = json_of(o.nu);
    e["fit_residual"] = o.fit_residual;
    e["cells"] = o.cells;
    j["components"].push_back(e);
  }
  j["distinct"] = om.distinct;
  return j;
}

ordered_json json_of(const RecessionReport& rr) {
  static const char* kind_names[] = {"inconclusive", "vertex", "facet", "interior"};
  ordered_json j;
  j["checks"] = ordered_json::array();
  for (const RecessionCheck& c : rr.checks) {
    ordered_json e;
    e["label"] = c.label;
    e["nu"] = json_of(c.nu);
    e["classified"] = kind_names[c.classified];
    e["mismatch_deg"] = c.mismatch_deg;
    e["pass"] = c.pass;
    j["checks"].push_back(e);
  }
  j["all_pass"] = rr.all_pass;
  j["inconclusive"] = rr.inconclusive;
  return j;
}

ordered_json json_of(const FanLimitReport& fl) {
  ordered_json j;
  j["entries"] = ordered_json::array();
  for (const FanLimitEntry& e : fl.entries) {
    ordered_json o;
    o["t"] = e.t;
    o["hausdorff"] = e.hausdorff;
    o["amoeba_points"] = e.amoeba_points;
    j["entries"].push_back(o);
  }
  j["nonincreasing"] = fl.nonincreasing;
  j["fitted_c"] = fl.fitted_c;
  j["first_over_last"] = fl.first_over_last;
  return j;
}

ordered_json json_of(const HessianMeasure& hm) {
  ordered_json j;
  j["samples"] = hm.samples;
  j["seed"] = hm.seed;
  j["delta"] = hm.delta;
  j["delta_effective"] = hm.delta_effective;
  j["log_r_cut"] = hm.log_r_cut;
  j["tail_mass"] = hm.tail_mass;
  j["noise_rel"] = hm.noise_rel;
  j["excluded_samples"] = hm.excluded;
  j["total_abs_mass"] = hm.current.total_abs_mass();
  j["max_cell_mass"] = hm.current.max_cell_mass();
  return j;
}

ordered_json json_of(const PotentialResult& pr) {
  ordered_json j;
  j["path_residual"] = pr.path_residual;
  j["closedness_rel"] = pr.closedness_rel;
  j["second_diff_l1"] = pr.second_diff_l1;
  j["convexity_gap"] = pr.convexity_gap;
  j["mollified_total"] = pr.mollified_total;
  return j;
}

ordered_json json_of(const MongeAmpereMass& mm) {
  ordered_json j;
  j["mass"] = mm.mass;
  j["samples"] = mm.samples;
  j["outside_newton"] = mm.outside_newton;
  j["slack"] = mm.slack;
  j["flagged"] = mm.flagged;
  return j;
}

ordered_json json_of(const GeneralizedMass& gm) {
  ordered_json j;
  j["mass"] = gm.mass;
  j["samples"] = gm.samples;
  j["outside_newton"] = gm.outside_newton;
  j["flagged"] = gm.flagged;
  return j;
}

void write_ppm(const std::string& path, const ComponentMap& components) {
  static const std::uint8_t palette[12][3] = {
      {230, 97, 52},  {64, 134, 230},  {96, 189, 104},  {240, 200, 65},
      {176, 112, 232}, {86, 204, 194}, {232, 120, 180}, {148, 160, 60},
      {120, 120, 235}, {220, 150, 100}, {90, 170, 120}, {200, 95, 95}};
  const Grid2& g = components.grid;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_ppm: cannot open " + path);
  f << "P6\n" << g.n1 << " " << g.n2 << "\n255\n";
  for (int j = g.n2 - 1; j >= 0; --j) {
    for (int i = 0; i < g.n1; ++i) {
      const int label = components.label_at(i, j);
      std::uint8_t rgb[3] = {0, 0, 0};
      if (label > 0) {
        const std::uint8_t* c = palette[(label - 1) % 12];
        rgb[0] = c[0];
        rgb[1] = c[1];
        rgb[2] = c[2];
      }
      f.write(reinterpret_cast<const char*>(rgb), 3);
    }
  }
  if (!f) throw std::runtime_error("write_ppm: write failed for " + path);
}

void write_csv_field(const std::string& path, const GridField& field) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_csv_field: cannot open " + path);
  f << "x1,x2,value\n";
  const Grid2& g = field.grid;
  char line[96];
  for (int j = 0; j <= g.n2; ++j) {
    for (int i = 0; i <= g.n1; ++i) {
      const Vec2 p = g.node(i, j);
      std::snprintf(line, sizeof(line), "%.12g,%.12g,%.12g\n", p.x, p.y,
                    field.at(i, j));
      f << line;
    }
  }
  if (!f) throw std::runtime_error("write_csv_field: write failed for " + path);
}

}  // namespace amoebalab
