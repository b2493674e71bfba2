#include "roadfuse/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roadfuse/errors.hpp"

namespace roadfuse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool better(const NodeHit& a, const NodeHit& b) {
  return a.distance < b.distance || (a.distance == b.distance && a.node < b.node);
}

bool better(const SegmentHit& a, const SegmentHit& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  if (a.a != b.a) return a.a < b.a;
  return a.b < b.b;
}

}  // namespace

GridIndex::GridIndex(const RoadGraph& g, double cell_size) : GridIndex(g, g.frame(), cell_size) {}

GridIndex::GridIndex(const RoadGraph& g, const LocalFrame& frame, double cell_size)
    : frame_(frame), cell_size_(cell_size) {
  if (!(cell_size > 0.0)) throw InvalidArgument("GridIndex: cell_size must be positive");
  build(g);
}

std::int64_t GridIndex::cell_of(double v) const noexcept {
  return static_cast<std::int64_t>(std::floor(v / cell_size_));
}

const GridIndex::Cell* GridIndex::find_cell(std::int64_t ix, std::int64_t iy) const {
  auto it = cells_.find(key(ix, iy));
  return it == cells_.end() ? nullptr : &it->second;
}

void GridIndex::build(const RoadGraph& g) {
  auto touch = [&](std::int64_t ix, std::int64_t iy) -> Cell& {
    if (cells_.empty()) {
      min_ix_ = max_ix_ = ix;
      min_iy_ = max_iy_ = iy;
    } else {
      min_ix_ = std::min(min_ix_, ix);
      max_ix_ = std::max(max_ix_, ix);
      min_iy_ = std::min(min_iy_, iy);
      max_iy_ = std::max(max_iy_, iy);
    }
    return cells_[key(ix, iy)];
  };

  for (NodeId id : g.node_ids()) {
    const auto xy = frame_.project(g.position(id));
    const auto idx = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({id, xy});
    touch(cell_of(xy.x), cell_of(xy.y)).nodes.push_back(idx);
    if (g.out_degree(id) == 0 && g.in_degree(id) == 0) segments_.push_back({id, id, xy, xy});
  }
  g.for_each_edge([&](NodeId u, NodeId v, Provenance) {
    if (u < v || !g.has_edge(v, u)) {
      const NodeId a = std::min(u, v);
      const NodeId b = std::max(u, v);
      segments_.push_back({a, b, frame_.project(g.position(a)), frame_.project(g.position(b))});
    }
  });
  std::sort(segments_.begin(), segments_.end(), [](const IndexedSegment& x, const IndexedSegment& y) {
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  });

  // A segment goes into every cell it passes through. Cells whose center
  // lies within half a diagonal of the segment are a superset of those.
  const double reach = cell_size_ * std::sqrt(0.5) * (1.0 + 1e-9);
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    const auto x0 = cell_of(std::min(s.pa.x, s.pb.x));
    const auto x1 = cell_of(std::max(s.pa.x, s.pb.x));
    const auto y0 = cell_of(std::min(s.pa.y, s.pb.y));
    const auto y1 = cell_of(std::max(s.pa.y, s.pb.y));
    for (auto ix = x0; ix <= x1; ++ix) {
      for (auto iy = y0; iy <= y1; ++iy) {
        const PlanarPoint center{(static_cast<double>(ix) + 0.5) * cell_size_,
                                 (static_cast<double>(iy) + 0.5) * cell_size_};
        if (point_to_segment(center, s.pa, s.pb) <= reach)
          touch(ix, iy).segments.push_back(static_cast<std::uint32_t>(i));
      }
    }
  }
}

template <typename Visit, typename Done>
void GridIndex::ring_search(const PlanarPoint& p, Visit&& visit, Done&& done,
                            QueryStats* stats) const {
  if (cells_.empty()) return;
  const auto cx = cell_of(p.x);
  const auto cy = cell_of(p.y);
  const std::int64_t start =
      std::max<std::int64_t>({0, min_ix_ - cx, cx - max_ix_, min_iy_ - cy, cy - max_iy_});
  const std::int64_t stop =
      std::max<std::int64_t>({cx - min_ix_, max_ix_ - cx, cy - min_iy_, max_iy_ - cy});
  auto visit_cell = [&](std::int64_t ix, std::int64_t iy) {
    if (ix < min_ix_ || ix > max_ix_ || iy < min_iy_ || iy > max_iy_) return;
    if (const Cell* c = find_cell(ix, iy)) {
      if (stats) ++stats->cells_visited;
      visit(*c);
    }
  };
  for (std::int64_t k = start; k <= stop; ++k) {
    if (k == 0) {
      visit_cell(cx, cy);
    } else {
      const auto lo_x = std::max(cx - k, min_ix_);
      const auto hi_x = std::min(cx + k, max_ix_);
      for (auto ix = lo_x; ix <= hi_x; ++ix) {
        visit_cell(ix, cy - k);
        visit_cell(ix, cy + k);
      }
      const auto lo_y = std::max(cy - k + 1, min_iy_);
      const auto hi_y = std::min(cy + k - 1, max_iy_);
      for (auto iy = lo_y; iy <= hi_y; ++iy) {
        visit_cell(cx - k, iy);
        visit_cell(cx + k, iy);
      }
    }
    // Every cell not yet visited is at least k cells away from p's cell.
    if (done(static_cast<double>(k) * cell_size_)) return;
  }
}

NodeHit GridIndex::nearest_node(const PlanarPoint& p, QueryStats* stats) const {
  if (nodes_.empty()) throw NotFound("nearest_node: empty index");
  NodeHit best{0, kInf};
  ring_search(
      p,
      [&](const Cell& c) {
        for (auto i : c.nodes) {
          const NodeHit hit{nodes_[i].id, planar_distance(p, nodes_[i].xy)};
          if (better(hit, best)) best = hit;
        }
      },
      [&](double bound) { return best.distance < bound; }, stats);
  return best;
}

NodeHit GridIndex::nearest_node(const GeoPoint& p, QueryStats* stats) const {
  return nearest_node(frame_.project(p), stats);
}

SegmentHit GridIndex::nearest_segment(const PlanarPoint& p, QueryStats* stats) const {
  if (segments_.empty()) throw NotFound("nearest_segment: empty index");
  SegmentHit best{0, 0, kInf};
  ring_search(
      p,
      [&](const Cell& c) {
        for (auto i : c.segments) {
          const auto& s = segments_[i];
          const SegmentHit hit{s.a, s.b, point_to_segment(p, s.pa, s.pb)};
          if (better(hit, best)) best = hit;
        }
      },
      [&](double bound) { return best.distance < bound; }, stats);
  return best;
}

SegmentHit GridIndex::nearest_segment(const GeoPoint& p, QueryStats* stats) const {
  return nearest_segment(frame_.project(p), stats);
}

std::vector<NodeHit> GridIndex::nodes_within(const PlanarPoint& p, double radius) const {
  if (radius < 0.0) throw InvalidArgument("nodes_within: negative radius");
  std::vector<NodeHit> out;
  ring_search(
      p,
      [&](const Cell& c) {
        for (auto i : c.nodes) {
          const double d = planar_distance(p, nodes_[i].xy);
          if (d <= radius) out.push_back({nodes_[i].id, d});
        }
      },
      [&](double bound) { return bound > radius; }, nullptr);
  std::sort(out.begin(), out.end(), [](const NodeHit& a, const NodeHit& b) { return better(a, b); });
  return out;
}

std::vector<NodeHit> GridIndex::nodes_within(const GeoPoint& p, double radius) const {
  return nodes_within(frame_.project(p), radius);
}

std::vector<SegmentHit> GridIndex::segments_within(const PlanarPoint& p, double radius) const {
  if (radius < 0.0) throw InvalidArgument("segments_within: negative radius");
  std::vector<std::uint32_t> found;
  ring_search(
      p,
      [&](const Cell& c) {
        for (auto i : c.segments) {
          const auto& s = segments_[i];
          if (point_to_segment(p, s.pa, s.pb) <= radius) found.push_back(i);
        }
      },
      [&](double bound) { return bound > radius; }, nullptr);
  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end()), found.end());
  std::vector<SegmentHit> out;
  out.reserve(found.size());
  for (auto i : found) {
    const auto& s = segments_[i];
    out.push_back({s.a, s.b, point_to_segment(p, s.pa, s.pb)});
  }
  std::sort(out.begin(), out.end(), [](const SegmentHit& a, const SegmentHit& b) { return better(a, b); });
  return out;
}

}  // namespace roadfuse
