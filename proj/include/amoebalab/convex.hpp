#pragma once

#include <cstdint>
#include <vector>

#include "amoebalab/geometry2d.hpp"

namespace amoebalab {

enum class HullKind { Point, Segment, Polygon };

// Half-plane normal·x <= offset.
struct Facet {
  Vec2 normal;
  double offset = 0.0;
};

struct Polytope {
  HullKind kind = HullKind::Point;
  std::vector<Vec2> vertices;  // extreme points; counterclockwise for polygons
  std::vector<Facet> facets;   // empty for point/segment hulls

  double area() const;
  bool contains(const Vec2& p, double slack = 1e-9) const;
};

Polytope convex_hull(std::vector<Vec2> points);

enum class ConeKind { Zero, Ray, Sector, Line, Full };

// Convex cone in the plane. Sectors (including half-planes, span pi) keep
// two boundary generators; the cone is the counterclockwise sweep from
// generators[0] to generators[1].
struct Cone {
  ConeKind kind = ConeKind::Zero;
  std::vector<Vec2> generators;  // unit rays

  bool contains(const Vec2& dir, double angular_tol = 1e-9) const;
  double span_radians() const;
};

// Builds the conic hull of the given rays (deduped at angular tolerance
// 1e-9). Rays positively spanning the plane give ConeKind::Full.
Cone make_cone(const std::vector<Vec2>& rays);

Cone normal_cone(const Polytope& P, const Vec2& vertex);

// Angular mismatch between two cones in degrees: 0 when equal, 180 when one
// is zero/full and the other is not. Sectors compare boundary rays.
double cone_mismatch_deg(const Cone& a, const Cone& b);

struct ComponentMap {
  Grid2 grid;
  std::vector<int> labels;  // per cell, row-major; 0 = occupied
  int n_components = 0;

  int label_at(int i, int j) const {
    return labels[static_cast<std::size_t>(grid.cell_index(i, j))];
  }
  std::vector<int> cells_of(int id) const;
  bool touches_boundary(int id) const;
};

ComponentMap flood_components(const CellMask& mask);

double hausdorff_distance(const std::vector<Vec2>& A, const std::vector<Vec2>& B);

bool is_convex_region(const ComponentMap& C, int id, int trials, std::uint64_t seed = 1);

Cone recession_cone_estimate(const ComponentMap& C, int id, double R_probe,
                             double step_deg = 1.0);

// Chamfer distance (cell units) from each cell to the nearest occupied cell.
std::vector<double> distance_to_occupied(const CellMask& mask);

}  // namespace amoebalab
