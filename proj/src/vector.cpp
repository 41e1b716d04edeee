#include "fedswitch/vector.hpp"

namespace fedswitch {

double dot(const ModelVector& a, const ModelVector& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

double squared_norm(const ModelVector& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.dim(); ++i) s += v[i] * v[i];
  return s;
}

double norm(const ModelVector& v) { return std::sqrt(squared_norm(v)); }

double distance(const ModelVector& a, const ModelVector& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("distance: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace fedswitch
