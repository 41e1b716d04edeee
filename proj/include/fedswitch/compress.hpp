#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "fedswitch/rng.hpp"
#include "fedswitch/vector.hpp"

namespace fedswitch {

/// Contractive compression operator. Every kind satisfies, for its
/// contraction accuracy q in (0,1],
///
///     E[ ||compress(v) - v||^2 ] <= (1 - q) ||v||^2,
///
/// deterministically for identity / top_k / uniform_quant and in expectation
/// for rand_k.
struct CompressorSpec {
  enum class Kind { identity, top_k, rand_k, uniform_quant };

  Kind kind = Kind::identity;
  int k = 0;         // top_k / rand_k: entries kept
  int bits = 0;      // uniform_quant: bits per entry, >= 2
  std::optional<double> declared_q;  // uniform_quant: user-supplied accuracy

  static CompressorSpec identity() { return {}; }
  static CompressorSpec top_k(int k);
  static CompressorSpec rand_k(int k);
  static CompressorSpec uniform_quant(int bits,
                                      std::optional<double> declared_q = std::nullopt);

  bool is_identity() const { return kind == Kind::identity; }
  std::string kind_name() const;
};

/// Contraction accuracy q for vectors of dimension d.
///
/// identity -> 1, top_k / rand_k -> k/d. For uniform_quant the user-declared
/// q wins when present; otherwise the provable per-vector bound
/// 1 - d/(2^bits - 1)^2 is used (error if nonpositive, i.e. the grid is too
/// coarse for this dimension to certify anything).
double contraction(const CompressorSpec& spec, std::size_t d);

/// Applies the compressor. rng is consumed only by rand_k. The all-zero
/// vector is returned unchanged for every kind.
ModelVector compress(const CompressorSpec& spec, const ModelVector& v, Rng& rng);

/// Measured contraction accuracy: 1 - max over `trials` random vectors of
/// ||C(v)-v||^2 / ||v||^2. Diagnostic only; the declared q must stay at or
/// below it for a sound compressor.
double measured_contraction(const CompressorSpec& spec, std::size_t d, Rng& rng,
                            int trials);

/// Client-side error-feedback residual. Starts at zero and is updated only
/// in rounds where the owning client is sampled.
struct EfResidual {
  ModelVector value;
  int owner = 0;

  static EfResidual zero(std::size_t dim, int owner) {
    return {ModelVector::zeros(dim), owner};
  }
};

struct UplinkStep {
  ModelVector sent;
  EfResidual residual;
};

/// One uplink step: sent = C(residual + delta), residual' = residual + delta - sent.
/// The split is computed entrywise, so for sparsifying kinds sent and the new
/// residual partition residual + delta exactly.
UplinkStep uplink_ef_step(const EfResidual& residual, const ModelVector& delta,
                          const CompressorSpec& spec, Rng& rng);

struct DownlinkStep {
  ModelVector message;
  ModelVector new_broadcast;
};

/// One downlink step: message = C(server_model - broadcast_base),
/// new_broadcast = broadcast_base + message. With the identity compressor the
/// new broadcast equals the server model bit-for-bit.
DownlinkStep downlink_ef_step(const ModelVector& server_model,
                              const ModelVector& broadcast_base,
                              const CompressorSpec& spec, Rng& rng);

/// Bytes on the wire for one compressed message of dimension d.
/// Values: 8 bytes each; sparse indices: 4 bytes each; quantized entries:
/// `bits` bits each plus one 8-byte scale.
std::int64_t message_bytes(const CompressorSpec& spec, std::size_t d);

}  // namespace fedswitch
