#pragma once

#include "lsc/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace lsc {

/// One bit per element, values 0 or 1.
using BitSequence = std::vector<std::uint8_t>;

enum class ModelClass : std::uint8_t { iid = 0, markov = 1 };

struct BernoulliModel {
  double p = 0.5;  // P(X = 1)
  explicit BernoulliModel(double p_one);
};

/// Binary Markov chain parameterized by the self-transition probabilities
/// p0 = P(stay in 0) and p1 = P(stay in 1).
struct MarkovModel {
  double p0 = 0.5;
  double p1 = 0.5;
  MarkovModel(double stay0, double stay1);
};

struct Stationary {
  double pi0;
  double pi1;
};

/// n sequences of length l stored back to back; m = n * l.
class TrainingSet {
 public:
  TrainingSet(std::size_t n, std::size_t l);
  TrainingSet(std::size_t n, std::size_t l, BitSequence bits);

  std::size_t n() const { return n_; }
  std::size_t l() const { return l_; }
  std::size_t m() const { return n_ * l_; }

  std::span<const std::uint8_t> sequence(std::size_t i) const;
  std::span<std::uint8_t> sequence(std::size_t i);
  const BitSequence& bits() const { return bits_; }

 private:
  std::size_t n_;
  std::size_t l_;
  BitSequence bits_;
};

BitSequence sample_iid(const BernoulliModel& model, std::size_t length, std::uint64_t seed);
/// Appends `length` i.i.d. bits drawn from `rng`.
void sample_iid_into(const BernoulliModel& model, std::size_t length, Rng& rng, BitSequence& out);

/// Balance-consistent stationary law of the chain. Throws when both states
/// are absorbing.
Stationary stationary(const MarkovModel& model);

/// n independent sequences, each started from the stationary law. Sequence i
/// uses its own stream keyed by (seed, i).
TrainingSet sample_markov(const MarkovModel& model, std::size_t n, std::size_t l,
                          std::uint64_t seed);
/// Fills `out` with one chain path started from the stationary law.
void sample_markov_path(const MarkovModel& model, const Stationary& pi, Rng& rng,
                        std::span<std::uint8_t> out);

double entropy_rate(const BernoulliModel& model);
double entropy_rate(const MarkovModel& model);

// Corpus files: u64 little-endian bit count followed by the bits packed
// LSB-first into bytes.
std::vector<std::uint8_t> pack_bits(std::span<const std::uint8_t> bits);
BitSequence unpack_bits(std::span<const std::uint8_t> bytes, std::size_t count);
std::vector<std::uint8_t> encode_corpus(std::span<const std::uint8_t> bits);
BitSequence decode_corpus(std::span<const std::uint8_t> bytes);

}  // namespace lsc
