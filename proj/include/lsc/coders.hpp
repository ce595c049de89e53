#pragma once

#include "lsc/models.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace lsc {

/// A coder's probability model, estimated once and never updated.
struct FrozenModel {
  ModelClass model_class = ModelClass::iid;
  // iid: {phat, unused}; markov: {phat0, phat1} (self-transition probabilities)
  std::array<double, 2> params{0.5, 0.0};

  static FrozenModel iid(double phat);
  static FrozenModel markov(double phat0, double phat1);
};

/// Ideal codelength -log2 P(x) under a frozen model, in bits. A Markov
/// model charges the first symbol with its own stationary law.
double frozen_codelength(const FrozenModel& model, std::span<const std::uint8_t> x);
/// Same quantity from the sufficient statistic of an i.i.d. model.
double frozen_codelength_iid_counts(double phat, std::uint64_t ones, std::uint64_t length);

/// Sequential add-1/2 (Krichevsky-Trofimov) codelength, in bits.
double kt_codelength_iid(std::span<const std::uint8_t> x);
/// Closed form of the KT codelength for a sequence with the given counts.
double kt_codelength_counts(std::uint64_t zeros, std::uint64_t ones);
/// First symbol at 1/2, then a KT estimator per previous state.
double kt_codelength_markov(std::span<const std::uint8_t> x);

/// Per-symbol redundancy pi0 D(p0||phat0) + pi1 D(p1||phat1), in bits.
double redundancy_markov(const MarkovModel& truth, const FrozenModel& frozen);

enum class StreamClass : std::uint8_t { frozen_iid = 0, frozen_markov = 1, kt_iid = 2, kt_markov = 3 };

/// The coding model of a stream: a frozen model or an adaptive KT model.
struct CoderModel {
  StreamClass stream_class = StreamClass::kt_iid;
  std::array<double, 2> params{0.0, 0.0};

  static CoderModel frozen(const FrozenModel& model);
  static CoderModel kt(ModelClass model_class);
};

struct CodeStream {
  CoderModel model;
  std::uint64_t bit_count = 0;        // original number of symbols
  std::vector<std::uint8_t> payload;  // arithmetic-coded bits, LSB-first
  std::uint64_t payload_bits = 0;     // exact number of meaningful payload bits

  /// Container bytes: "LSC1", version, class, parameters, count, payload, CRC32.
  std::vector<std::uint8_t> serialize() const;
  static CodeStream parse(std::span<const std::uint8_t> bytes);
};

CodeStream arith_encode(const CoderModel& model, std::span<const std::uint8_t> x);
BitSequence arith_decode(const CodeStream& stream);
BitSequence arith_decode(std::span<const std::uint8_t> container);

/// Codelength under the quantized probabilities the arithmetic coder uses.
double coder_model_codelength(const CoderModel& model, std::span<const std::uint8_t> x);
/// Ideal codelength of the unquantized model.
double ideal_codelength(const CoderModel& model, std::span<const std::uint8_t> x);

// Frozen model files: "LSCM", version, class, little-endian parameters, CRC32.
std::vector<std::uint8_t> serialize_model(const FrozenModel& model);
FrozenModel parse_model(std::span<const std::uint8_t> bytes);

}  // namespace lsc
