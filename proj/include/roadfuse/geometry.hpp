#pragma once

#include <optional>
#include <span>
#include <vector>

namespace roadfuse {

inline constexpr double kEarthRadiusM = 6371000.0;

struct GeoPoint {
  double lat = 0.0;  ///< degrees, [-90, 90]
  double lon = 0.0;  ///< degrees, [-180, 180]

  bool valid() const noexcept;
  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// Meters in a local tangent plane; x grows east, y grows north.
struct PlanarPoint {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const PlanarPoint&, const PlanarPoint&) = default;
};

/// Equirectangular projection anchored at (ref_lat, ref_lon).
///
/// Adequate at city scale: the error against great-circle distance stays
/// well under half a percent inside a 10 km box below 60 degrees latitude.
class LocalFrame {
 public:
  LocalFrame() : LocalFrame(0.0, 0.0) {}
  explicit LocalFrame(double ref_lat, double ref_lon = 0.0);

  double ref_lat() const noexcept { return ref_lat_; }
  double ref_lon() const noexcept { return ref_lon_; }

  PlanarPoint project(const GeoPoint& p) const noexcept;
  GeoPoint unproject(const PlanarPoint& p) const noexcept;

  /// Frame anchored at the mean latitude/longitude of `points`.
  static LocalFrame fit(std::span<const GeoPoint> points);

  friend bool operator==(const LocalFrame& a, const LocalFrame& b) {
    return a.ref_lat_ == b.ref_lat_ && a.ref_lon_ == b.ref_lon_;
  }

 private:
  double ref_lat_;
  double ref_lon_;
  double cos_ref_;
};

using Polyline = std::vector<GeoPoint>;

double planar_distance(const PlanarPoint& a, const PlanarPoint& b) noexcept;

/// Distance from u to the closed segment ab. A degenerate segment (a == b)
/// is treated as the point a.
double point_to_segment(const PlanarPoint& u, const PlanarPoint& a, const PlanarPoint& b) noexcept;
double point_to_segment(const GeoPoint& u, const GeoPoint& a, const GeoPoint& b,
                        const LocalFrame& frame) noexcept;

/// Minimum distance from u to any segment of `path` (or to its sole point).
double point_to_path(const GeoPoint& u, std::span<const GeoPoint> path, const LocalFrame& frame);
double point_to_path(const PlanarPoint& u, std::span<const PlanarPoint> path);

/// max over the vertices u of `from` of point_to_path(u, to).
double directed_deviation(std::span<const PlanarPoint> from, std::span<const PlanarPoint> to);

/// Path distance: the smaller of the two directed vertex deviations.
/// Symmetric; zero for identical paths.
double path_distance(std::span<const GeoPoint> p0, std::span<const GeoPoint> p1,
                     const LocalFrame& frame);
double path_distance(std::span<const PlanarPoint> p0, std::span<const PlanarPoint> p1);

double polyline_length(std::span<const GeoPoint> p, const LocalFrame& frame);
double polyline_length(std::span<const PlanarPoint> p);

/// Clockwise angle from north of a->b in [0, 360). Empty when a and b
/// coincide after projection.
std::optional<double> bearing(const GeoPoint& a, const GeoPoint& b, const LocalFrame& frame);
std::optional<double> bearing(const PlanarPoint& a, const PlanarPoint& b);

/// Smallest absolute difference between two headings, in [0, 180].
double heading_difference(double a_deg, double b_deg) noexcept;

std::vector<PlanarPoint> project_all(std::span<const GeoPoint> points, const LocalFrame& frame);

}  // namespace roadfuse
