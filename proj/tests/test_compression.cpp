#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fedswitch/compress.hpp"
#include "fedswitch/verify.hpp"

using namespace fedswitch;

namespace {

ModelVector vec(std::initializer_list<double> vals) {
  return ModelVector(std::vector<double>(vals));
}

Rng fresh(std::uint64_t salt = 0) { return Rng(derive_seed(99, "test-comp", salt)); }

}  // namespace

TEST_CASE("top_k keeps the largest magnitudes and certifies contraction") {
  Rng rng = fresh();
  const ModelVector v = vec({3.0, 1.0, 1.0, 1.0});
  const ModelVector c = compress(CompressorSpec::top_k(1), v, rng);
  CHECK(c == vec({3.0, 0.0, 0.0, 0.0}));
  const double err = squared_norm(c - v);
  CHECK(err == doctest::Approx(3.0));
  CHECK(err <= (1.0 - 0.25) * squared_norm(v));  // 3 <= 9
}

TEST_CASE("top_k breaks magnitude ties by lowest index") {
  Rng rng = fresh();
  const ModelVector v = vec({1.0, -1.0, 1.0});
  CHECK(compress(CompressorSpec::top_k(2), v, rng) == vec({1.0, -1.0, 0.0}));
}

TEST_CASE("identity returns its input bit-for-bit") {
  Rng rng = fresh();
  const ModelVector v = vec({5.0, -2.0});
  CHECK(compress(CompressorSpec::identity(), v, rng) == v);
}

TEST_CASE("uniform_quant rounds to the per-vector grid") {
  Rng rng = fresh();
  // 4 levels over [-1, 1]: {-1, -1/3, 1/3, 1}
  const ModelVector c = compress(CompressorSpec::uniform_quant(2), vec({1.0, -0.3}), rng);
  CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c[1] == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("all-zero input is returned unchanged for every kind") {
  Rng rng = fresh();
  const ModelVector z = ModelVector::zeros(4);
  for (const auto& spec :
       {CompressorSpec::identity(), CompressorSpec::top_k(2), CompressorSpec::rand_k(2),
        CompressorSpec::uniform_quant(3)}) {
    CHECK(compress(spec, z, rng) == z);
  }
}

TEST_CASE("k larger than the dimension is a structural error") {
  Rng rng = fresh();
  CHECK_THROWS_AS(compress(CompressorSpec::top_k(3), vec({1.0, 2.0}), rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(contraction(CompressorSpec::rand_k(5), 2), std::invalid_argument);
}

TEST_CASE("contraction accuracies per kind") {
  CHECK(contraction(CompressorSpec::identity(), 7) == 1.0);
  CHECK(contraction(CompressorSpec::top_k(2), 8) == 0.25);
  CHECK(contraction(CompressorSpec::rand_k(1), 10) == 0.1);
  // analytic per-vector bound: 1 - d/(2^bits - 1)^2
  CHECK(contraction(CompressorSpec::uniform_quant(4), 100) ==
        doctest::Approx(1.0 - 100.0 / 225.0));
  CHECK(contraction(CompressorSpec::uniform_quant(4, 0.7), 100) == 0.7);
  // bits=2 at d=100 cannot be certified without a user-supplied q
  CHECK_THROWS_AS(contraction(CompressorSpec::uniform_quant(2), 100),
                  std::invalid_argument);
}

TEST_CASE("uplink EF step: compress, remember the rest") {
  Rng rng = fresh();
  SUBCASE("top_k keeps the dominant entry and banks the other") {
    const EfResidual r0 = EfResidual::zero(2, 7);
    const UplinkStep up = uplink_ef_step(r0, vec({3.0, 1.0}), CompressorSpec::top_k(1), rng);
    CHECK(up.sent == vec({3.0, 0.0}));
    CHECK(up.residual.value == vec({0.0, 1.0}));
    CHECK(up.residual.owner == 7);
  }
  SUBCASE("identity flushes the residual") {
    const EfResidual r{vec({0.0, 1.0}), 0};
    const UplinkStep up =
        uplink_ef_step(r, ModelVector::zeros(2), CompressorSpec::identity(), rng);
    CHECK(up.sent == vec({0.0, 1.0}));
    CHECK(up.residual.value == ModelVector::zeros(2));
  }
  SUBCASE("zero in, zero out") {
    const UplinkStep up = uplink_ef_step(EfResidual::zero(2, 0), ModelVector::zeros(2),
                                         CompressorSpec::top_k(1), rng);
    CHECK(up.sent == ModelVector::zeros(2));
    CHECK(up.residual.value == ModelVector::zeros(2));
  }
}

TEST_CASE("downlink EF step") {
  Rng rng = fresh();
  SUBCASE("identity broadcast equals the server model bit-for-bit") {
    const ModelVector x = vec({0.1234567890123, -7.5});
    const ModelVector w = vec({1.0, 1.0});
    const DownlinkStep down = downlink_ef_step(x, w, CompressorSpec::identity(), rng);
    CHECK(down.new_broadcast == x);
  }
  SUBCASE("top_k sends the dominant coordinate of the difference") {
    const ModelVector w = vec({1.0, 1.0});
    const ModelVector x = vec({1.5, 1.2});  // x - w = (0.5, 0.2)
    const DownlinkStep down = downlink_ef_step(x, w, CompressorSpec::top_k(1), rng);
    CHECK(down.message == vec({0.5, 0.0}));
    CHECK(down.new_broadcast == vec({1.5, 1.0}));
  }
  SUBCASE("no movement, no message") {
    const ModelVector w = vec({2.0, -3.0});
    const DownlinkStep down = downlink_ef_step(w, w, CompressorSpec::top_k(1), rng);
    CHECK(down.message == ModelVector::zeros(2));
    CHECK(down.new_broadcast == w);
  }
}

TEST_CASE("message size accounting") {
  CHECK(message_bytes(CompressorSpec::identity(), 100) == 800);
  CHECK(message_bytes(CompressorSpec::top_k(10), 100) == 120);
  CHECK(message_bytes(CompressorSpec::rand_k(3), 50) == 36);
  CHECK(message_bytes(CompressorSpec::uniform_quant(4), 100) == 58);
  CHECK(message_bytes(CompressorSpec::uniform_quant(3), 7) == 11);  // ceil(21/8) + 8
  CHECK_THROWS_AS(message_bytes(CompressorSpec::identity(), 0), std::invalid_argument);
}

TEST_CASE("deterministic kinds satisfy per-vector contraction on 10^4 vectors") {
  const std::size_t d = 32;
  std::string detail;
  CHECK_MESSAGE(check_contraction_per_vector(CompressorSpec::identity(), 1.0, d, 10000,
                                             derive_seed(1, "t-id"), &detail),
                detail);
  const CompressorSpec tk = CompressorSpec::top_k(7);
  CHECK_MESSAGE(check_contraction_per_vector(tk, contraction(tk, d), d, 10000,
                                             derive_seed(1, "t-tk"), &detail),
                detail);
  const CompressorSpec uq = CompressorSpec::uniform_quant(4);
  CHECK_MESSAGE(check_contraction_per_vector(uq, contraction(uq, d), d, 10000,
                                             derive_seed(1, "t-uq"), &detail),
                detail);
}

TEST_CASE("a misdeclared contraction accuracy is caught") {
  // top_k with k=7 of 32 has q = 7/32; claiming q = 0.9 must fail.
  std::string detail;
  CHECK_FALSE(check_contraction_per_vector(CompressorSpec::top_k(7), 0.9, 32, 2000,
                                           derive_seed(1, "t-bad"), &detail));
  CHECK(!detail.empty());
}

TEST_CASE("rand_k Monte-Carlo contraction over 10^4 draws") {
  std::string detail;
  // q = 0.1, 0.25, 0.5 with 10 probe vectors each.
  CHECK_MESSAGE(check_rand_k_mc(1, 10, 10000, 10, derive_seed(2, "mc1"), &detail), detail);
  CHECK_MESSAGE(check_rand_k_mc(5, 20, 10000, 10, derive_seed(2, "mc2"), &detail), detail);
  CHECK_MESSAGE(check_rand_k_mc(5, 10, 10000, 10, derive_seed(2, "mc3"), &detail), detail);
}

TEST_CASE("EF residual recursion telescopes exactly") {
  // Per-round split: sent + residual' recombine to residual + delta exactly
  // for the sparsifying kinds, entry by entry.
  for (const auto& spec : {CompressorSpec::identity(), CompressorSpec::top_k(3),
                           CompressorSpec::rand_k(3)}) {
    Rng rng = fresh(static_cast<std::uint64_t>(spec.kind));
    EfResidual res = EfResidual::zero(8, 0);
    for (int t = 0; t < 200; ++t) {
      ModelVector delta(8);
      for (std::size_t i = 0; i < 8; ++i) delta[i] = 10.0 * (rng.uniform() - 0.5);
      ModelVector acc = res.value;
      acc += delta;  // the exact pre-split accumulator
      const UplinkStep up = uplink_ef_step(res, delta, spec, rng);
      ModelVector recombined = up.sent;
      recombined += up.residual.value;
      CHECK(recombined == acc);
      res = up.residual;
    }
  }
}

TEST_CASE("positive scale equivariance with a shared stream") {
  for (const auto& spec : {CompressorSpec::top_k(3), CompressorSpec::rand_k(3)}) {
    Rng gen = fresh(17);
    for (int t = 0; t < 500; ++t) {
      ModelVector v(8);
      for (std::size_t i = 0; i < 8; ++i) v[i] = gen.normal();
      const double c = std::exp(3.0 * (gen.uniform() - 0.5));
      Rng r1 = fresh(1000 + static_cast<std::uint64_t>(t));
      Rng r2 = fresh(1000 + static_cast<std::uint64_t>(t));
      ModelVector scaled = v;
      scaled *= c;
      ModelVector lhs = compress(spec, scaled, r1);
      ModelVector rhs = compress(spec, v, r2);
      rhs *= c;
      CHECK(lhs == rhs);
    }
  }
}
