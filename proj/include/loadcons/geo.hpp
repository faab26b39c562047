#pragma once

#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>

#include "loadcons/model.hpp"

namespace loadcons::geo {

inline constexpr double kEarthRadiusMiles = 3958.8;
inline constexpr double kDefaultSpeedMph = 50.0;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

class DegenerateBearing : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
};

inline LatLon position(const Terminal& t) { return {t.lat, t.lon}; }

// Route orientation in [0, 2pi).
class BearingAngle {
 public:
  BearingAngle() = default;
  explicit BearingAngle(double radians);

  double radians() const { return radians_; }

 private:
  double radians_ = 0.0;
};

// Compass direction the angle is measured from. Angles grow counterclockwise
// (West -> South -> East -> North when the reference is West).
enum class Reference { west, north, east, south };

Reference parse_reference(const std::string& name);

struct GeoConfig {
  double speed_mph = kDefaultSpeedMph;
  double earth_radius_miles = kEarthRadiusMiles;
  Reference reference = Reference::west;
};

double haversine_miles(LatLon a, LatLon b, double earth_radius_miles = kEarthRadiusMiles);

// Throws ConfigError for a nonpositive speed.
double travel_minutes(const Terminal& a, const Terminal& b, double speed_mph = kDefaultSpeedMph,
                      double earth_radius_miles = kEarthRadiusMiles);

// Initial great-circle bearing of the route origin -> dest relative to the
// reference direction. Throws DegenerateBearing for coincident points.
BearingAngle route_bearing(LatLon origin, LatLon dest, Reference ref = Reference::west);

// Wrapped difference, in [0, pi].
double angle_distance(BearingAngle a, BearingAngle b);

// Travel time in minutes between two terminals, by id.
using TravelFn = std::function<double(const std::string& from, const std::string& to)>;
// Distance in miles between two terminals, by id.
using DistanceFn = std::function<double(const std::string& from, const std::string& to)>;

// Great-circle travel over a network's terminals. The network must outlive the functions.
TravelFn network_travel(const Network& network, const GeoConfig& cfg = {});
DistanceFn network_distance(const Network& network, const GeoConfig& cfg = {});

}  // namespace loadcons::geo
