#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "amoebalab/classical.hpp"
#include "amoebalab/convex.hpp"
#include "amoebalab/generalized.hpp"
#include "amoebalab/potential.hpp"

namespace amoebalab {

inline constexpr const char* kSchemaVersion = "amoebalab/1";
inline constexpr const char* kToolVersion = "0.1.0";

using ordered_json = nlohmann::ordered_json;

std::string iso_timestamp();

ordered_json json_of(const Vec2& v);
ordered_json json_of(const Box2& b);
ordered_json json_of(const Polytope& P);
ordered_json json_of(const Cone& c);
ordered_json json_of(const FanReport& fan);
ordered_json json_of(const OrderMapResult& om);
ordered_json json_of(const GeneralizedOrderResult& om);
ordered_json json_of(const RecessionReport& rr);
ordered_json json_of(const FanLimitReport& fl);
ordered_json json_of(const HessianMeasure& hm);   // metadata + totals, not grids
ordered_json json_of(const PotentialResult& pr);  // diagnostics, not the field
ordered_json json_of(const MongeAmpereMass& mm);
ordered_json json_of(const GeneralizedMass& gm);

// P6 raster: occupied cells black, complement components colored by label
// from a fixed 12-color palette. Image rows run from high x2 to low.
void write_ppm(const std::string& path, const ComponentMap& components);

// Node dump "x1,x2,value" rows, x2-major from low to high.
void write_csv_field(const std::string& path, const GridField& field);

}  // namespace amoebalab
