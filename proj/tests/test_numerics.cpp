#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "fedswitch/domain.hpp"
#include "fedswitch/rng.hpp"
#include "fedswitch/vector.hpp"

using namespace fedswitch;

namespace {

ModelVector vec(std::initializer_list<double> vals) {
  return ModelVector(std::vector<double>(vals));
}

ModelVector random_vector(std::size_t d, Rng& rng, double scale = 1.0) {
  ModelVector v(d);
  for (std::size_t i = 0; i < d; ++i) v[i] = scale * rng.normal();
  return v;
}

Domain random_domain(std::size_t d, Rng& rng) {
  if (rng.below(2) == 0) {
    ModelVector lo(d), hi(d);
    for (std::size_t i = 0; i < d; ++i) {
      const double a = rng.normal(), b = rng.normal();
      lo[i] = std::min(a, b);
      hi[i] = std::max(a, b);
    }
    return Domain::box(std::move(lo), std::move(hi));
  }
  return Domain::ball(random_vector(d, rng), 0.25 + 2.0 * rng.uniform());
}

}  // namespace

TEST_CASE("vector arithmetic and reductions") {
  const ModelVector a = vec({1.0, 2.0, 3.0});
  const ModelVector b = vec({-1.0, 0.5, 2.0});
  CHECK(dot(a, b) == doctest::Approx(6.0));
  CHECK(squared_norm(a) == doctest::Approx(14.0));
  CHECK(norm(vec({3.0, 4.0})) == doctest::Approx(5.0));
  CHECK(distance(a, a) == 0.0);

  ModelVector c = a;
  c.axpy(2.0, b);
  CHECK(c == vec({-1.0, 3.0, 7.0}));
}

TEST_CASE("vectors reject non-finite entries and mismatched dimensions") {
  CHECK_THROWS_AS(ModelVector(std::vector<double>{1.0, std::nan("")}),
                  std::invalid_argument);
  CHECK_THROWS_AS(ModelVector(std::vector<double>{
                      std::numeric_limits<double>::infinity()}),
                  std::invalid_argument);
  ModelVector a = vec({1.0, 2.0});
  CHECK_THROWS_AS(a += vec({1.0}), std::invalid_argument);
  CHECK_THROWS_AS(dot(vec({1.0}), vec({1.0, 2.0})), std::invalid_argument);
}

TEST_CASE("ball projection rescales radially") {
  const Domain ball = Domain::ball(ModelVector::zeros(2), 1.0);
  const ModelVector p = project(vec({3.0, 4.0}), ball);
  CHECK(p[0] == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(ball.contains(p));
}

TEST_CASE("box projection clamps per coordinate") {
  const Domain box = Domain::box(vec({0.0, 0.0}), vec({1.0, 1.0}));
  CHECK(project(vec({0.5, 0.5}), box) == vec({0.5, 0.5}));  // interior fixed
  CHECK(project(vec({-2.0, 3.0}), box) == vec({0.0, 1.0}));
}

TEST_CASE("projection rejects dimension mismatches") {
  const Domain box = Domain::box(vec({0.0}), vec({1.0}));
  CHECK_THROWS_AS(project(vec({1.0, 2.0}), box), std::invalid_argument);
}

TEST_CASE("diameter: ball, box, unbounded") {
  CHECK(diameter(Domain::ball(ModelVector::zeros(3), 1.0)) == 2.0);
  CHECK(diameter(Domain::box(vec({0.0, 0.0}), vec({1.0, 1.0}))) ==
        doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(diameter(Domain::unbounded()), std::invalid_argument);
}

TEST_CASE("domain constructors validate their shapes") {
  CHECK_THROWS_AS(Domain::box(vec({1.0}), vec({0.0})), std::invalid_argument);
  CHECK_THROWS_AS(Domain::ball(ModelVector::zeros(2), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Domain::ball(ModelVector::zeros(2), -1.0), std::invalid_argument);
}

TEST_CASE("projection properties on random domains") {
  Rng rng(123456789);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t d = 1 + rng.below(5);
    const Domain dom = random_domain(d, rng);
    const ModelVector x = random_vector(d, rng, 3.0);
    const ModelVector y = random_vector(d, rng, 3.0);

    const ModelVector px = project(x, dom);
    CHECK(dom.contains(px));
    CHECK(project(px, dom) == px);  // exactly idempotent
    if (dom.contains(x)) CHECK(px == x);

    CHECK(distance(px, project(y, dom)) <= distance(x, y) + 1e-12);
  }
}
