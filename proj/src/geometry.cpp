#include "roadfuse/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "roadfuse/errors.hpp"

namespace roadfuse {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

bool GeoPoint::valid() const noexcept {
  return std::isfinite(lat) && std::isfinite(lon) && lat >= -90.0 && lat <= 90.0 &&
         lon >= -180.0 && lon <= 180.0;
}

LocalFrame::LocalFrame(double ref_lat, double ref_lon)
    : ref_lat_(ref_lat), ref_lon_(ref_lon), cos_ref_(std::cos(ref_lat * kDegToRad)) {
  if (!(std::abs(ref_lat) < 89.0) || !std::isfinite(ref_lon)) {
    throw InvalidArgument("LocalFrame: reference latitude must satisfy |lat| < 89");
  }
}

PlanarPoint LocalFrame::project(const GeoPoint& p) const noexcept {
  return {kEarthRadiusM * (p.lon - ref_lon_) * kDegToRad * cos_ref_,
          kEarthRadiusM * (p.lat - ref_lat_) * kDegToRad};
}

GeoPoint LocalFrame::unproject(const PlanarPoint& p) const noexcept {
  return {ref_lat_ + p.y / (kEarthRadiusM * kDegToRad),
          ref_lon_ + p.x / (kEarthRadiusM * kDegToRad * cos_ref_)};
}

LocalFrame LocalFrame::fit(std::span<const GeoPoint> points) {
  if (points.empty()) return LocalFrame{};
  double lat = 0.0;
  double lon = 0.0;
  for (const auto& p : points) {
    lat += p.lat;
    lon += p.lon;
  }
  const auto n = static_cast<double>(points.size());
  return LocalFrame(lat / n, lon / n);
}

double planar_distance(const PlanarPoint& a, const PlanarPoint& b) noexcept {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double point_to_segment(const PlanarPoint& u, const PlanarPoint& a, const PlanarPoint& b) noexcept {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return planar_distance(u, a);
  double t = ((u.x - a.x) * dx + (u.y - a.y) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return planar_distance(u, {a.x + t * dx, a.y + t * dy});
}

double point_to_segment(const GeoPoint& u, const GeoPoint& a, const GeoPoint& b,
                        const LocalFrame& frame) noexcept {
  return point_to_segment(frame.project(u), frame.project(a), frame.project(b));
}

double point_to_path(const PlanarPoint& u, std::span<const PlanarPoint> path) {
  if (path.empty()) throw InvalidArgument("point_to_path: empty path");
  if (path.size() == 1) return planar_distance(u, path.front());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < path.size(); ++i) {
    best = std::min(best, point_to_segment(u, path[i - 1], path[i]));
  }
  return best;
}

double point_to_path(const GeoPoint& u, std::span<const GeoPoint> path, const LocalFrame& frame) {
  const auto planar = project_all(path, frame);
  return point_to_path(frame.project(u), planar);
}

double directed_deviation(std::span<const PlanarPoint> from, std::span<const PlanarPoint> to) {
  if (from.empty() || to.empty()) throw InvalidArgument("directed_deviation: empty path");
  double worst = 0.0;
  for (const auto& u : from) worst = std::max(worst, point_to_path(u, to));
  return worst;
}

double path_distance(std::span<const PlanarPoint> p0, std::span<const PlanarPoint> p1) {
  return std::min(directed_deviation(p0, p1), directed_deviation(p1, p0));
}

double path_distance(std::span<const GeoPoint> p0, std::span<const GeoPoint> p1,
                     const LocalFrame& frame) {
  const auto a = project_all(p0, frame);
  const auto b = project_all(p1, frame);
  return path_distance(a, b);
}

double polyline_length(std::span<const PlanarPoint> p) {
  double total = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) total += planar_distance(p[i - 1], p[i]);
  return total;
}

double polyline_length(std::span<const GeoPoint> p, const LocalFrame& frame) {
  return polyline_length(project_all(p, frame));
}

std::optional<double> bearing(const PlanarPoint& a, const PlanarPoint& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  if (dx == 0.0 && dy == 0.0) return std::nullopt;
  double deg = std::atan2(dx, dy) / kDegToRad;
  if (deg < 0.0) deg += 360.0;
  if (deg >= 360.0) deg -= 360.0;
  return deg;
}

std::optional<double> bearing(const GeoPoint& a, const GeoPoint& b, const LocalFrame& frame) {
  return bearing(frame.project(a), frame.project(b));
}

double heading_difference(double a_deg, double b_deg) noexcept {
  double d = std::fmod(std::abs(a_deg - b_deg), 360.0);
  return d > 180.0 ? 360.0 - d : d;
}

std::vector<PlanarPoint> project_all(std::span<const GeoPoint> points, const LocalFrame& frame) {
  std::vector<PlanarPoint> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(frame.project(p));
  return out;
}

}  // namespace roadfuse
