#pragma once

#include <string>

#include "json.hpp"
#include "lcg/dalembert.hpp"
#include "lcg/disintegration.hpp"
#include "lcg/lattice.hpp"
#include "lcg/models.hpp"
#include "lcg/volume.hpp"

namespace lcg {

using Json = nlohmann::ordered_json;

// Non-finite numbers travel as the strings "inf", "-inf" and "nan".
Json number_json(double x);
double number_from_json(const Json& j, const std::string& where);

void to_json(Json& j, const CurvaturePotential& k);
void from_json(const Json& j, CurvaturePotential& k);
void to_json(Json& j, const RayDensity& h);
void from_json(const Json& j, RayDensity& h);
void to_json(Json& j, const Warp& w);
void from_json(const Json& j, Warp& w);
void to_json(Json& j, const DensityProfile& p);
void from_json(const Json& j, DensityProfile& p);
void to_json(Json& j, const Ray& r);
void from_json(const Json& j, Ray& r);
void to_json(Json& j, const Disintegration& d);
void from_json(const Json& j, Disintegration& d);
void to_json(Json& j, const WarpedProductModel& m);
void from_json(const Json& j, WarpedProductModel& m);
void to_json(Json& j, const MinkowskiConeModel& m);
void from_json(const Json& j, MinkowskiConeModel& m);
void to_json(Json& j, const LatticeSpec& s);
void from_json(const Json& j, LatticeSpec& s);

void to_json(Json& j, const Verdict& v);
void to_json(Json& j, const DAlembertMeasure& m);
void to_json(Json& j, const UnsignedReport& r);
void to_json(Json& j, const MeanCurvatureReport& r);
void to_json(Json& j, const BarrierReport& r);
void to_json(Json& j, const MinkowskiReport& r);
void to_json(Json& j, const InverseLengthReport& r);
void to_json(Json& j, const VolumeBoundReport& r);
void to_json(Json& j, const AreaBoundReport& r);
void to_json(Json& j, const SingularityVerdict& v);
void to_json(Json& j, const RayField& f);

// Parse errors become InputError naming the file and the offending key.
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

Disintegration load_disintegration(const std::string& path);
LatticeSpec load_lattice_spec(const std::string& path);
Json catalog_json(const FixtureCatalog& catalog);

// One row per interior sample: ray_id, param, h, log_h_prime, bound_lower,
// bound_upper, jacobian, plus residual (bound violation) when requested. The
// jacobian column is the constant-curvature J at l = param - offset, blank
// for variable curvature.
std::string profile_series_csv(const Disintegration& d, const DAlembertMeasure& m,
                               bool with_residual);

}  // namespace lcg
