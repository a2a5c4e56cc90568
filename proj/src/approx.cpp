#include "reachdec/approx.hpp"

#include "reachdec/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace reachdec {

// ---------------------------------------------------------------------------
// BlockStructure

BlockStructure::BlockStructure(int n) : n_(n) {
  if (n <= 0) throw Error("approx", "dimension", "BlockStructure: dimension must be positive");
  for (int start = 0; start < n; start += 2) blocks_.push_back({start, std::min(2, n - start)});
}

Eigen::MatrixXd BlockStructure::projection(int i) const {
  const auto& r = blocks_.at(static_cast<std::size_t>(i));
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(r.size, n_);
  for (int k = 0; k < r.size; ++k) p(k, r.start + k) = 1.0;
  return p;
}

std::vector<int> BlockStructure::all_blocks() const {
  std::vector<int> out(blocks_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<int>(i);
  return out;
}

// ---------------------------------------------------------------------------
// ApproxScheme

ApproxScheme ApproxScheme::epsilon_close(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw Error("approx", "invalid", "epsilon-close scheme needs a positive finite epsilon");
  }
  return {Kind::EpsilonClose, eps};
}

ApproxScheme ApproxScheme::parse(const std::string& text) {
  if (text == "box") return box();
  if (text.rfind("eps:", 0) == 0) {
    const std::string value = text.substr(4);
    char* end = nullptr;
    const double eps = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size()) {
      throw Error("approx", "invalid", "cannot parse epsilon in scheme '" + text + "'");
    }
    return epsilon_close(eps);
  }
  throw Error("approx", "invalid", "unknown approximation scheme '" + text + "' (expected box or eps:<value>)");
}

std::string ApproxScheme::to_string() const {
  if (kind == Kind::BoxDirections) return "box";
  char buf[64];
  std::snprintf(buf, sizeof buf, "eps:%g", epsilon);
  return buf;
}

// ---------------------------------------------------------------------------
// Box and epsilon-close overapproximation

Hyperrectangle overapproximate_box(const LazySet& x) {
  if (const auto* h = x.get_if<Hyperrectangle>()) return *h;
  const int n = x.dim();
  Vector low(n), high(n);
  Vector e = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    e[i] = 1.0;
    high[i] = support_function(x, e);
    e[i] = -1.0;
    low[i] = -support_function(x, e);
    e[i] = 0.0;
  }
  // Rounding can invert a zero-width interval by an ulp.
  high = high.cwiseMax(low);
  return Hyperrectangle::from_bounds(low, high);
}

namespace {

struct Sample {
  Vector2 dir;
  Vector2 point;
  double value;
};

Sample sample(const LazySet& x, const Vector2& dir) {
  const Vector d = dir;
  Vector2 p = support_vector(x, d).head<2>();
  const double rho = std::max(support_function(x, d), dir.dot(p));
  return {dir, p, rho};
}

double segment_distance(const Vector2& p, const Vector2& a, const Vector2& b) {
  const Vector2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double local_gap(const Sample& s1, const Sample& s2) {
  const double det = s1.dir.x() * s2.dir.y() - s1.dir.y() * s2.dir.x();
  const Vector2 outer((s1.value * s2.dir.y() - s2.value * s1.dir.y()) / det,
                      (s1.dir.x() * s2.value - s2.dir.x() * s1.value) / det);
  return segment_distance(outer, s1.point, s2.point);
}

class EpsRefiner {
 public:
  EpsRefiner(const LazySet& x, double eps, const EpsOptions& options)
      : x_(x), eps_(eps), options_(options) {}

  void refine(const Sample& a, const Sample& b, int depth) {
    const double gap = local_gap(a, b);
    const double angle = std::atan2(a.dir.x() * b.dir.y() - a.dir.y() * b.dir.x(), a.dir.dot(b.dir));
    if (gap <= eps_ || angle < 1e-10 || depth > 60) {
      worst_ = std::max(worst_, gap);
      return;
    }
    if (out_.size() + 1 >= options_.max_constraints) {
      throw Error("approx", "nonconvergence",
                  "epsilon-close approximation exceeded " + std::to_string(options_.max_constraints) +
                      " constraints; achieved gap " + std::to_string(std::max(worst_, gap)));
    }
    const Sample mid = sample(x_, (a.dir + b.dir).normalized());
    refine(a, mid, depth + 1);
    out_.push_back({mid.dir, mid.value});
    refine(mid, b, depth + 1);
  }

  std::vector<HPolygon::Constraint>& out() { return out_; }

 private:
  const LazySet& x_;
  double eps_;
  EpsOptions options_;
  std::vector<HPolygon::Constraint> out_;
  double worst_ = 0.0;
};

}  // namespace

HPolygon overapproximate_eps(const LazySet& x, double eps, const EpsOptions& options) {
  if (x.dim() != 2) {
    throw Error("approx", "dimension",
                "overapproximate_eps needs a 2D set, got " + x.describe());
  }
  if (!(eps > 0.0)) throw Error("approx", "invalid", "epsilon must be positive");
  const std::array<Vector2, 4> box_dirs = {Vector2(1, 0), Vector2(0, 1), Vector2(-1, 0), Vector2(0, -1)};
  std::array<Sample, 4> samples;
  for (std::size_t i = 0; i < 4; ++i) samples[i] = sample(x, box_dirs[i]);

  EpsRefiner refiner(x, eps, options);
  for (std::size_t i = 0; i < 4; ++i) {
    refiner.out().push_back({samples[i].dir, samples[i].value});
    refiner.refine(samples[i], samples[(i + 1) % 4], 0);
  }
  return HPolygon(std::move(refiner.out()));
}

LazySet approximate(const LazySet& x, const ApproxScheme& scheme) {
  if (x.dim() <= 1 || scheme.kind == ApproxScheme::Kind::BoxDirections) {
    return overapproximate_box(x);
  }
  if (x.dim() == 2 && (x.get_if<Hyperrectangle>() || x.get_if<HPolygon>())) return x;
  if (x.dim() != 2) {
    throw Error("approx", "dimension", "epsilon-close approximation is only available in 2D");
  }
  return overapproximate_eps(x, scheme.epsilon);
}

std::vector<LazySet> decompose(const LazySet& x, const BlockStructure& blocks,
                               const ApproxScheme& scheme) {
  if (x.dim() != blocks.dim()) {
    throw Error("approx", "dimension",
                "decompose: set " + x.describe() + " does not match block structure of dimension " +
                    std::to_string(blocks.dim()));
  }
  std::vector<LazySet> out;
  out.reserve(static_cast<std::size_t>(blocks.count()));
  if (const auto* h = x.get_if<Hyperrectangle>()) {
    for (const auto& r : blocks.ranges()) {
      out.emplace_back(Hyperrectangle(h->center().segment(r.start, r.size), h->radius().segment(r.start, r.size)));
    }
    return out;
  }
  if (const auto* s = x.get_if<Singleton>()) {
    for (const auto& r : blocks.ranges()) out.emplace_back(Singleton(s->point().segment(r.start, r.size)));
    return out;
  }
  for (int i = 0; i < blocks.count(); ++i) {
    out.push_back(approximate(linear_map(blocks.projection(i), x), scheme));
  }
  return out;
}

}  // namespace reachdec
