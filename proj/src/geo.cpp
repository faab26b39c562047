#include "loadcons/geo.hpp"

#include <algorithm>
#include <cmath>

namespace loadcons::geo {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double wrap(double r) {
  r = std::fmod(r, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;  // fmod can round up to exactly 2pi
  return r;
}

// Compass heading (clockwise from North) of each reference direction.
double reference_heading(Reference ref) {
  switch (ref) {
    case Reference::north: return 0.0;
    case Reference::east: return 0.5 * std::numbers::pi;
    case Reference::south: return std::numbers::pi;
    case Reference::west: break;
  }
  return 1.5 * std::numbers::pi;
}

const Terminal& require_terminal(const Network& network, const std::string& id) {
  const Terminal* t = network.find_terminal(id);
  if (t == nullptr) throw DataError("unknown terminal '" + id + "'");
  return *t;
}

}  // namespace

BearingAngle::BearingAngle(double radians) : radians_(wrap(radians)) {}

Reference parse_reference(const std::string& name) {
  if (name == "west") return Reference::west;
  if (name == "north") return Reference::north;
  if (name == "east") return Reference::east;
  if (name == "south") return Reference::south;
  throw ConfigError("unknown reference_direction '" + name + "'");
}

double haversine_miles(LatLon a, LatLon b, double earth_radius_miles) {
  const double phi1 = a.lat * kDegToRad;
  const double phi2 = b.lat * kDegToRad;
  const double dphi = (b.lat - a.lat) * kDegToRad;
  const double dlambda = (b.lon - a.lon) * kDegToRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  h = std::min(1.0, std::max(0.0, h));
  return 2.0 * earth_radius_miles * std::asin(std::sqrt(h));
}

double travel_minutes(const Terminal& a, const Terminal& b, double speed_mph,
                      double earth_radius_miles) {
  if (!(speed_mph > 0.0)) throw ConfigError("speed_mph must be positive");
  return haversine_miles(position(a), position(b), earth_radius_miles) / speed_mph * 60.0;
}

BearingAngle route_bearing(LatLon origin, LatLon dest, Reference ref) {
  if (origin.lat == dest.lat && origin.lon == dest.lon) {
    throw DegenerateBearing("route bearing undefined for coincident points");
  }
  const double phi1 = origin.lat * kDegToRad;
  const double phi2 = dest.lat * kDegToRad;
  const double dlambda = (dest.lon - origin.lon) * kDegToRad;
  const double y = std::sin(dlambda) * std::cos(phi2);
  const double x = std::cos(phi1) * std::sin(phi2) - std::sin(phi1) * std::cos(phi2) * std::cos(dlambda);
  if (x == 0.0 && y == 0.0) {
    throw DegenerateBearing("route bearing undefined for antipodal or coincident points");
  }
  const double heading = std::atan2(y, x);  // clockwise from North
  return BearingAngle(reference_heading(ref) - heading);
}

double angle_distance(BearingAngle a, BearingAngle b) {
  const double d = std::fabs(a.radians() - b.radians());
  return std::min(d, kTwoPi - d);
}

TravelFn network_travel(const Network& network, const GeoConfig& cfg) {
  if (!(cfg.speed_mph > 0.0)) throw ConfigError("speed_mph must be positive");
  return [&network, cfg](const std::string& from, const std::string& to) {
    if (from == to) return 0.0;
    return travel_minutes(require_terminal(network, from), require_terminal(network, to),
                          cfg.speed_mph, cfg.earth_radius_miles);
  };
}

DistanceFn network_distance(const Network& network, const GeoConfig& cfg) {
  return [&network, cfg](const std::string& from, const std::string& to) {
    if (from == to) return 0.0;
    return haversine_miles(position(require_terminal(network, from)),
                           position(require_terminal(network, to)), cfg.earth_radius_miles);
  };
}

}  // namespace loadcons::geo
