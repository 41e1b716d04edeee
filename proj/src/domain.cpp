#include "fedswitch/domain.hpp"

#include <algorithm>
#include <stdexcept>

namespace fedswitch {

Domain Domain::box(ModelVector lower, ModelVector upper) {
  if (lower.dim() != upper.dim())
    throw std::invalid_argument("Domain::box: bound dimensions differ");
  for (std::size_t i = 0; i < lower.dim(); ++i) {
    if (lower[i] > upper[i])
      throw std::invalid_argument("Domain::box: lower > upper at index " +
                                  std::to_string(i));
  }
  Domain d(Kind::box);
  d.lower_ = std::move(lower);
  d.upper_ = std::move(upper);
  return d;
}

Domain Domain::ball(ModelVector center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("Domain::ball: radius must be finite and positive");
  Domain d(Kind::ball);
  d.center_ = std::move(center);
  d.radius_ = radius;
  return d;
}

bool Domain::contains(const ModelVector& v) const {
  switch (kind_) {
    case Kind::unbounded:
      return true;
    case Kind::box:
      if (v.dim() != lower_.dim()) return false;
      for (std::size_t i = 0; i < v.dim(); ++i)
        if (v[i] < lower_[i] || v[i] > upper_[i]) return false;
      return true;
    case Kind::ball: {
      if (v.dim() != center_.dim()) return false;
      double s = 0.0;
      for (std::size_t i = 0; i < v.dim(); ++i) {
        const double d = v[i] - center_[i];
        s += d * d;
      }
      return s <= radius_ * radius_;
    }
  }
  return false;
}

ModelVector project(const ModelVector& x, const Domain& dom) {
  switch (dom.kind()) {
    case Domain::Kind::unbounded:
      return x;
    case Domain::Kind::box: {
      if (x.dim() != dom.lower().dim())
        throw std::invalid_argument("project: dimension mismatch with box domain");
      ModelVector out = x;
      for (std::size_t i = 0; i < out.dim(); ++i)
        out[i] = std::clamp(out[i], dom.lower()[i], dom.upper()[i]);
      return out;
    }
    case Domain::Kind::ball: {
      if (x.dim() != dom.center().dim())
        throw std::invalid_argument("project: dimension mismatch with ball domain");
      if (dom.contains(x)) return x;
      // Radial rescale toward the center. The scale is shrunk by single ulps
      // until the rounded result passes the membership test, which makes the
      // projection exactly idempotent.
      const ModelVector& c = dom.center();
      ModelVector diff = x;
      diff -= c;
      double scale = dom.radius() / norm(diff);
      ModelVector out(x.dim());
      for (;;) {
        for (std::size_t i = 0; i < out.dim(); ++i) out[i] = c[i] + scale * diff[i];
        if (dom.contains(out)) return out;
        scale = std::nextafter(scale, 0.0);
      }
    }
  }
  throw std::logic_error("project: unreachable");
}

double diameter(const Domain& dom) {
  switch (dom.kind()) {
    case Domain::Kind::unbounded:
      throw std::invalid_argument("diameter: unbounded domain has no finite diameter");
    case Domain::Kind::box:
      return distance(dom.upper(), dom.lower());
    case Domain::Kind::ball:
      return 2.0 * dom.radius();
  }
  throw std::logic_error("diameter: unreachable");
}

}  // namespace fedswitch
