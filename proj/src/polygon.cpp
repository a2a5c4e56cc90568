#include "reachdec/error.hpp"
#include "reachdec/sets.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace reachdec {

namespace {

double cross(const Vector2& a, const Vector2& b) { return a.x() * b.y() - a.y() * b.x(); }

// 0 for angles in (-pi, 0], 1 for (0, pi].
int half_plane(const Vector2& v) { return (v.y() < 0.0 || (v.y() == 0.0 && v.x() > 0.0)) ? 0 : 1; }

using Constraint = HPolygon::Constraint;

Vector2 intersect(const Constraint& c1, const Constraint& c2) {
  const double det = cross(c1.normal, c2.normal);
  if (std::abs(det) < 1e-12 * c1.normal.norm() * c2.normal.norm()) {
    throw Error("sets", "degenerate",
                "HPolygon: adjacent constraints are near-parallel (det=" + std::to_string(det) + ")");
  }
  return {(c1.offset * c2.normal.y() - c2.offset * c1.normal.y()) / det,
          (c1.normal.x() * c2.offset - c2.normal.x() * c1.offset) / det};
}

}  // namespace

bool angular_less(const Vector2& a, const Vector2& b) {
  const int ha = half_plane(a);
  const int hb = half_plane(b);
  if (ha != hb) return ha < hb;
  return cross(a, b) > 0.0;
}

HPolygon::HPolygon(std::vector<Constraint> input) {
  if (input.size() < 3) {
    throw Error("sets", "unbounded",
                "HPolygon: need at least 3 constraints, got " + std::to_string(input.size()));
  }
  double scale = 1.0;
  for (auto& c : input) {
    const double len = c.normal.norm();
    if (!(len > 0.0) || !std::isfinite(len) || !std::isfinite(c.offset)) {
      throw Error("sets", "invalid", "HPolygon: zero or non-finite constraint");
    }
    c.normal /= len;
    c.offset /= len;
    scale = std::max(scale, std::abs(c.offset));
  }
  std::stable_sort(input.begin(), input.end(),
                   [](const Constraint& a, const Constraint& b) { return angular_less(a.normal, b.normal); });

  // Same direction: keep the tightest.
  std::vector<Constraint> sorted;
  for (const auto& c : input) {
    if (!sorted.empty() && std::abs(cross(sorted.back().normal, c.normal)) <= 1e-15 &&
        sorted.back().normal.dot(c.normal) > 0.0) {
      sorted.back().offset = std::min(sorted.back().offset, c.offset);
    } else {
      sorted.push_back(c);
    }
  }
  if (sorted.size() >= 2 && std::abs(cross(sorted.back().normal, sorted.front().normal)) <= 1e-15 &&
      sorted.back().normal.dot(sorted.front().normal) > 0.0) {
    sorted.front().offset = std::min(sorted.front().offset, sorted.back().offset);
    sorted.pop_back();
  }

  // Bounded iff consecutive normals (cyclically) turn by less than pi.
  const std::size_t m = sorted.size();
  if (m < 3) throw Error("sets", "unbounded", "HPolygon: normals do not positively span the plane");
  for (std::size_t i = 0; i < m; ++i) {
    if (cross(sorted[i].normal, sorted[(i + 1) % m].normal) <= 0.0) {
      throw Error("sets", "unbounded", "HPolygon: normals do not positively span the plane");
    }
  }

  // Half-plane intersection over the angularly sorted list.
  const double tol = 1e-12 * scale;
  auto outside = [&](const Constraint& c, const Vector2& p) { return c.normal.dot(p) > c.offset + tol; };
  auto empty = [] { return Error("sets", "empty", "HPolygon: constraints are infeasible"); };
  std::deque<Constraint> dq;
  for (const auto& c : sorted) {
    while (dq.size() >= 2 && outside(c, intersect(dq[dq.size() - 2], dq.back()))) dq.pop_back();
    while (dq.size() >= 2 && outside(c, intersect(dq[0], dq[1]))) dq.pop_front();
    if (!dq.empty() && cross(dq.back().normal, c.normal) <= 0.0) throw empty();
    dq.push_back(c);
  }
  while (dq.size() >= 3 && outside(dq.front(), intersect(dq[dq.size() - 2], dq.back()))) dq.pop_back();
  while (dq.size() >= 3 && outside(dq.back(), intersect(dq[0], dq[1]))) dq.pop_front();
  if (dq.size() < 3) throw empty();

  constraints_.assign(dq.begin(), dq.end());
  const std::size_t k = constraints_.size();
  for (std::size_t i = 0; i < k; ++i) {
    if (cross(constraints_[i].normal, constraints_[(i + 1) % k].normal) <= 0.0) throw empty();
  }
  vertices_.reserve(k);
  for (std::size_t i = 0; i < k; ++i) vertices_.push_back(intersect(constraints_[i], constraints_[(i + 1) % k]));

  const double check_tol = 1e-9 * scale;
  for (const auto& v : vertices_) {
    for (const auto& c : sorted) {
      if (c.normal.dot(v) > c.offset + check_tol) throw empty();
    }
  }
}

bool HPolygon::contains(const Vector2& x, double slack) const {
  return std::all_of(constraints_.begin(), constraints_.end(),
                     [&](const Constraint& c) { return c.normal.dot(x) <= c.offset + slack; });
}

Vector2 polygon_support_vector(const HPolygon& polygon, const Vector2& direction) {
  const auto& cs = polygon.constraints();
  const std::size_t m = cs.size();
  if (direction.x() == 0.0 && direction.y() == 0.0) return polygon.vertices().front();
  // First normal strictly after `direction`; the bracketing pair is (j-1, j).
  const auto it = std::upper_bound(cs.begin(), cs.end(), direction,
                                   [](const Vector2& d, const Constraint& c) { return angular_less(d, c.normal); });
  const std::size_t j = static_cast<std::size_t>(it - cs.begin());
  return polygon.vertices()[(j + m - 1) % m];
}

}  // namespace reachdec
