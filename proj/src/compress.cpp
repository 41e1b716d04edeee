#include "fedswitch/compress.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fedswitch {

CompressorSpec CompressorSpec::top_k(int k) {
  if (k < 1) throw std::invalid_argument("top_k: k must be >= 1");
  CompressorSpec s;
  s.kind = Kind::top_k;
  s.k = k;
  return s;
}

CompressorSpec CompressorSpec::rand_k(int k) {
  if (k < 1) throw std::invalid_argument("rand_k: k must be >= 1");
  CompressorSpec s;
  s.kind = Kind::rand_k;
  s.k = k;
  return s;
}

CompressorSpec CompressorSpec::uniform_quant(int bits, std::optional<double> declared_q) {
  if (bits < 2) throw std::invalid_argument("uniform_quant: bits must be >= 2");
  if (declared_q && !(*declared_q > 0.0 && *declared_q <= 1.0))
    throw std::invalid_argument("uniform_quant: declared q must lie in (0,1]");
  CompressorSpec s;
  s.kind = Kind::uniform_quant;
  s.bits = bits;
  s.declared_q = declared_q;
  return s;
}

std::string CompressorSpec::kind_name() const {
  switch (kind) {
    case Kind::identity: return "identity";
    case Kind::top_k: return "top_k";
    case Kind::rand_k: return "rand_k";
    case Kind::uniform_quant: return "uniform_quant";
  }
  return "?";
}

double contraction(const CompressorSpec& spec, std::size_t d) {
  if (d == 0) throw std::invalid_argument("contraction: d must be >= 1");
  switch (spec.kind) {
    case CompressorSpec::Kind::identity:
      return 1.0;
    case CompressorSpec::Kind::top_k:
    case CompressorSpec::Kind::rand_k:
      if (static_cast<std::size_t>(spec.k) > d)
        throw std::invalid_argument(spec.kind_name() + ": k exceeds dimension");
      return static_cast<double>(spec.k) / static_cast<double>(d);
    case CompressorSpec::Kind::uniform_quant: {
      if (spec.declared_q) return *spec.declared_q;
      const double levels = std::ldexp(1.0, spec.bits);  // 2^bits
      const double q = 1.0 - static_cast<double>(d) / ((levels - 1.0) * (levels - 1.0));
      if (!(q > 0.0))
        throw std::invalid_argument(
            "uniform_quant: grid too coarse to certify contraction at d=" +
            std::to_string(d) + "; supply q explicitly");
      return q;
    }
  }
  throw std::logic_error("contraction: unreachable");
}

namespace {

bool all_zero(const ModelVector& v) {
  for (std::size_t i = 0; i < v.dim(); ++i)
    if (v[i] != 0.0) return false;
  return true;
}

ModelVector compress_top_k(int k, const ModelVector& v) {
  const std::size_t d = v.dim();
  std::vector<std::size_t> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  // Largest magnitudes first; ties broken by lowest index.
  std::sort(idx.begin(), idx.end(), [&v](std::size_t a, std::size_t b) {
    const double ma = std::fabs(v[a]), mb = std::fabs(v[b]);
    if (ma != mb) return ma > mb;
    return a < b;
  });
  ModelVector out(d);
  for (int i = 0; i < k; ++i) out[idx[i]] = v[idx[i]];
  return out;
}

ModelVector compress_rand_k(int k, const ModelVector& v, Rng& rng) {
  const std::size_t d = v.dim();
  std::vector<std::size_t> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates; kept entries keep their values (contractive,
  // biased convention: no rescaling).
  for (int i = 0; i < k; ++i) {
    const std::size_t j = i + rng.below(d - i);
    std::swap(idx[i], idx[j]);
  }
  ModelVector out(d);
  for (int i = 0; i < k; ++i) out[idx[i]] = v[idx[i]];
  return out;
}

ModelVector compress_uniform_quant(int bits, const ModelVector& v) {
  double maxabs = 0.0;
  for (std::size_t i = 0; i < v.dim(); ++i) maxabs = std::max(maxabs, std::fabs(v[i]));
  const double levels = std::ldexp(1.0, bits);
  const double step = 2.0 * maxabs / (levels - 1.0);
  ModelVector out(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) {
    double slot = std::round((v[i] + maxabs) / step);
    slot = std::clamp(slot, 0.0, levels - 1.0);
    out[i] = -maxabs + slot * step;
  }
  return out;
}

}  // namespace

ModelVector compress(const CompressorSpec& spec, const ModelVector& v, Rng& rng) {
  if (spec.kind != CompressorSpec::Kind::identity &&
      spec.kind != CompressorSpec::Kind::uniform_quant) {
    if (static_cast<std::size_t>(spec.k) > v.dim())
      throw std::invalid_argument(spec.kind_name() + ": k exceeds dimension");
  }
  if (all_zero(v)) return v;
  switch (spec.kind) {
    case CompressorSpec::Kind::identity:
      return v;
    case CompressorSpec::Kind::top_k:
      return compress_top_k(spec.k, v);
    case CompressorSpec::Kind::rand_k:
      return compress_rand_k(spec.k, v, rng);
    case CompressorSpec::Kind::uniform_quant:
      return compress_uniform_quant(spec.bits, v);
  }
  throw std::logic_error("compress: unreachable");
}

double measured_contraction(const CompressorSpec& spec, std::size_t d, Rng& rng,
                            int trials) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    ModelVector v(d);
    const double scale = std::exp(6.0 * (rng.uniform() - 0.5));
    for (std::size_t i = 0; i < d; ++i) v[i] = scale * rng.normal();
    const double denom = squared_norm(v);
    if (denom == 0.0) continue;
    const ModelVector c = compress(spec, v, rng);
    worst = std::max(worst, squared_norm(c - v) / denom);
  }
  return 1.0 - worst;
}

UplinkStep uplink_ef_step(const EfResidual& residual, const ModelVector& delta,
                          const CompressorSpec& spec, Rng& rng) {
  ModelVector acc = residual.value;
  acc += delta;
  ModelVector sent = compress(spec, acc, rng);
  acc -= sent;
  return {std::move(sent), EfResidual{std::move(acc), residual.owner}};
}

DownlinkStep downlink_ef_step(const ModelVector& server_model,
                              const ModelVector& broadcast_base,
                              const CompressorSpec& spec, Rng& rng) {
  ModelVector diff = server_model;
  diff -= broadcast_base;
  ModelVector message = compress(spec, diff, rng);
  if (spec.is_identity()) {
    // base + (x - base) == x in exact arithmetic; return x itself so the
    // equality also holds bit-for-bit.
    return {std::move(message), server_model};
  }
  ModelVector next = broadcast_base;
  next += message;
  return {std::move(message), std::move(next)};
}

std::int64_t message_bytes(const CompressorSpec& spec, std::size_t d) {
  if (d == 0) throw std::invalid_argument("message_bytes: d must be >= 1");
  const auto dd = static_cast<std::int64_t>(d);
  switch (spec.kind) {
    case CompressorSpec::Kind::identity:
      return 8 * dd;
    case CompressorSpec::Kind::top_k:
    case CompressorSpec::Kind::rand_k:
      return static_cast<std::int64_t>(spec.k) * (8 + 4);
    case CompressorSpec::Kind::uniform_quant:
      return (dd * spec.bits + 7) / 8 + 8;
  }
  throw std::logic_error("message_bytes: unreachable");
}

}  // namespace fedswitch
