#include "vulnmap/geo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "vulnmap/errors.hpp"

namespace vulnmap::geo {

namespace {
constexpr double kDegToRad = M_PI / 180.0;
constexpr int kMaxRejections = 10'000;
}  // namespace

bool valid(const GeoPoint& p) {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 &&
         p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0;
}

double haversine_m(const GeoPoint& a, const GeoPoint& b) {
  const double lat1 = a.lat * kDegToRad;
  const double lat2 = b.lat * kDegToRad;
  const double dlat = (b.lat - a.lat) * kDegToRad;
  const double dlon = (b.lon - a.lon) * kDegToRad;
  const double sl = std::sin(dlat / 2);
  const double so = std::sin(dlon / 2);
  const double h = sl * sl + std::cos(lat1) * std::cos(lat2) * so * so;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

double equirect_m(const GeoPoint& a, const GeoPoint& b) {
  const double mid = 0.5 * (a.lat + b.lat) * kDegToRad;
  const double x = (b.lon - a.lon) * kDegToRad * std::cos(mid);
  const double y = (b.lat - a.lat) * kDegToRad;
  return kEarthRadiusM * std::sqrt(x * x + y * y);
}

BoundingBox bounds(const PolygonGeom& poly) {
  BoundingBox bb{90.0, -90.0, 180.0, -180.0};
  for (const auto& v : poly.exterior) {
    bb.min_lat = std::min(bb.min_lat, v.lat);
    bb.max_lat = std::max(bb.max_lat, v.lat);
    bb.min_lon = std::min(bb.min_lon, v.lon);
    bb.max_lon = std::max(bb.max_lon, v.lon);
  }
  return bb;
}

BoundingBox bounds(std::span<const PolygonGeom> parts) {
  BoundingBox bb{90.0, -90.0, 180.0, -180.0};
  for (const auto& part : parts) {
    const BoundingBox p = bounds(part);
    bb.min_lat = std::min(bb.min_lat, p.min_lat);
    bb.max_lat = std::max(bb.max_lat, p.max_lat);
    bb.min_lon = std::min(bb.min_lon, p.min_lon);
    bb.max_lon = std::max(bb.max_lon, p.max_lon);
  }
  return bb;
}

double ring_area_deg2(const std::vector<GeoPoint>& ring) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i)
    acc += ring[i].lon * ring[i + 1].lat - ring[i + 1].lon * ring[i].lat;
  return std::abs(acc) / 2.0;
}

namespace {

bool on_segment(const GeoPoint& a, const GeoPoint& b, const GeoPoint& p) {
  const double cross =
      (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
  if (cross != 0.0) return false;
  return p.lon >= std::min(a.lon, b.lon) && p.lon <= std::max(a.lon, b.lon) &&
         p.lat >= std::min(a.lat, b.lat) && p.lat <= std::max(a.lat, b.lat);
}

/// Crossing parity of a ring; boundary handled by the caller.
bool ring_crossings_odd(const std::vector<GeoPoint>& ring, const GeoPoint& p) {
  bool odd = false;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const GeoPoint& a = ring[i];
    const GeoPoint& b = ring[i + 1];
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      const double x_int = a.lon + (p.lat - a.lat) / (b.lat - a.lat) * (b.lon - a.lon);
      if (p.lon < x_int) odd = !odd;
    }
  }
  return odd;
}

bool ring_has_boundary_point(const std::vector<GeoPoint>& ring, const GeoPoint& p) {
  for (std::size_t i = 0; i + 1 < ring.size(); ++i)
    if (on_segment(ring[i], ring[i + 1], p)) return true;
  return false;
}

}  // namespace

bool contains(const PolygonGeom& poly, const GeoPoint& p) {
  if (ring_has_boundary_point(poly.exterior, p)) return false;
  for (const auto& hole : poly.holes)
    if (ring_has_boundary_point(hole, p)) return false;
  bool odd = ring_crossings_odd(poly.exterior, p);
  for (const auto& hole : poly.holes)
    if (ring_crossings_odd(hole, p)) odd = !odd;
  return odd;
}

bool contains(std::span<const PolygonGeom> parts, const GeoPoint& p) {
  for (const auto& part : parts)
    if (contains(part, p)) return true;
  return false;
}

namespace {

std::vector<GeoPoint> sample_impl(std::span<const PolygonGeom> parts, int k,
                                  Rng& rng) {
  if (k < 1) throw EmptyInput("sample count must be >= 1");
  const BoundingBox bb = bounds(parts);
  std::vector<GeoPoint> out;
  out.reserve(static_cast<std::size_t>(k));
  int consecutive_misses = 0;
  while (out.size() < static_cast<std::size_t>(k)) {
    GeoPoint cand{rng.uniform(bb.min_lat, bb.max_lat),
                  rng.uniform(bb.min_lon, bb.max_lon)};
    if (contains(parts, cand)) {
      out.push_back(cand);
      consecutive_misses = 0;
    } else if (++consecutive_misses >= kMaxRejections) {
      throw DegeneratePolygon("rejection sampling failed " +
                              std::to_string(kMaxRejections) +
                              " consecutive draws");
    }
  }
  return out;
}

}  // namespace

std::vector<GeoPoint> sample_points_in_polygon(const PolygonGeom& poly, int k,
                                               Rng& rng) {
  return sample_impl(std::span<const PolygonGeom>(&poly, 1), k, rng);
}

std::vector<GeoPoint> sample_points_in_polygons(std::span<const PolygonGeom> parts,
                                                int k, Rng& rng) {
  return sample_impl(parts, k, rng);
}

SpatialIndex::Projected SpatialIndex::project(const GeoPoint& p) const {
  return {p.lon * cos_ref_, p.lat};
}

SpatialIndex SpatialIndex::build(
    std::vector<std::pair<std::int64_t, GeoPoint>> entries) {
  if (entries.empty()) throw EmptyInput("spatial index needs at least one point");
  std::unordered_set<std::int64_t> seen;
  double lat_sum = 0.0;
  for (const auto& [id, pt] : entries) {
    if (!seen.insert(id).second)
      throw DuplicateId("duplicate id " + std::to_string(id));
    lat_sum += pt.lat;
  }

  SpatialIndex idx;
  idx.cos_ref_ =
      std::cos(lat_sum / static_cast<double>(entries.size()) * M_PI / 180.0);
  idx.ids_.reserve(entries.size());
  idx.pts_.reserve(entries.size());
  idx.proj_.reserve(entries.size());
  for (const auto& [id, pt] : entries) {
    idx.slot_of_.emplace(id, idx.ids_.size());
    idx.ids_.push_back(id);
    idx.pts_.push_back(pt);
    idx.proj_.push_back(idx.project(pt));
  }

  idx.order_.resize(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) idx.order_[i] = i;

  // Recursive median split; axis alternates with depth.
  struct Frame {
    int lo, hi, axis;
  };
  std::vector<Frame> stack{{0, static_cast<int>(entries.size()), 0}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    if (f.hi - f.lo <= 1) continue;
    const int mid = (f.lo + f.hi) / 2;
    std::nth_element(idx.order_.begin() + f.lo, idx.order_.begin() + mid,
                     idx.order_.begin() + f.hi,
                     [&](std::size_t a, std::size_t b) {
                       const double va = f.axis ? idx.proj_[a].y : idx.proj_[a].x;
                       const double vb = f.axis ? idx.proj_[b].y : idx.proj_[b].x;
                       if (va != vb) return va < vb;
                       return idx.ids_[a] < idx.ids_[b];
                     });
    stack.push_back({f.lo, mid, 1 - f.axis});
    stack.push_back({mid + 1, f.hi, 1 - f.axis});
  }
  return idx;
}

void SpatialIndex::search(const Projected& q, int lo, int hi, int axis,
                          std::size_t m,
                          std::vector<std::pair<double, std::size_t>>& heap) const {
  if (lo >= hi) return;
  const int mid = (lo + hi) / 2;
  const std::size_t slot = order_[static_cast<std::size_t>(mid)];
  const double dx = proj_[slot].x - q.x;
  const double dy = proj_[slot].y - q.y;
  const double d2 = dx * dx + dy * dy;

  const auto worse = [](const std::pair<double, std::size_t>& a,
                        const std::pair<double, std::size_t>& b) {
    return a.first < b.first;
  };
  if (heap.size() < m) {
    heap.emplace_back(d2, slot);
    std::push_heap(heap.begin(), heap.end(), worse);
  } else if (d2 < heap.front().first) {
    std::pop_heap(heap.begin(), heap.end(), worse);
    heap.back() = {d2, slot};
    std::push_heap(heap.begin(), heap.end(), worse);
  }

  // delta = pivot coordinate - query coordinate; positive means the query
  // sits on the low side of the splitting plane.
  const double delta = (axis ? dy : dx);
  const bool query_low = delta > 0.0;
  const int near_lo = query_low ? lo : mid + 1;
  const int near_hi = query_low ? mid : hi;
  const int far_lo = query_low ? mid + 1 : lo;
  const int far_hi = query_low ? hi : mid;
  search(q, near_lo, near_hi, 1 - axis, m, heap);
  if (heap.size() < m || delta * delta < heap.front().first)
    search(q, far_lo, far_hi, 1 - axis, m, heap);
}

std::vector<std::pair<std::int64_t, double>> SpatialIndex::knn(const GeoPoint& q,
                                                               int k) const {
  if (k < 1) throw EmptyInput("k must be >= 1");
  if (static_cast<std::size_t>(k) > size())
    throw KTooLarge("k = " + std::to_string(k) + " exceeds index size " +
                    std::to_string(size()));

  const std::size_t m =
      std::min(size(), static_cast<std::size_t>(k) *
                           static_cast<std::size_t>(kCandidateMultiplier));
  std::vector<std::pair<double, std::size_t>> heap;
  heap.reserve(m + 1);
  search(project(q), 0, static_cast<int>(size()), 0, m, heap);

  // Exact re-rank of the projected candidates.
  std::vector<std::pair<std::int64_t, double>> ranked;
  ranked.reserve(heap.size());
  for (const auto& [d2, slot] : heap)
    ranked.emplace_back(ids_[slot], haversine_m(q, pts_[slot]));
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return a.first < b.first;
  });
  ranked.resize(static_cast<std::size_t>(k));
  return ranked;
}

std::pair<std::int64_t, double> SpatialIndex::nearest(const GeoPoint& q) const {
  return knn(q, 1).front();
}

const GeoPoint& SpatialIndex::point_for(std::int64_t id) const {
  const auto it = slot_of_.find(id);
  if (it == slot_of_.end())
    throw UnknownNode("id " + std::to_string(id) + " not in index");
  return pts_[it->second];
}

}  // namespace vulnmap::geo
