#include "lsc/models.hpp"

#include "lsc/io.hpp"
#include "lsc/specfn.hpp"

#include <stdexcept>
#include <string>

namespace lsc {
namespace {

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
  }
}

}  // namespace

BernoulliModel::BernoulliModel(double p_one) : p(p_one) { check_probability(p, "p"); }

MarkovModel::MarkovModel(double stay0, double stay1) : p0(stay0), p1(stay1) {
  check_probability(p0, "p0");
  check_probability(p1, "p1");
}

TrainingSet::TrainingSet(std::size_t n, std::size_t l) : n_(n), l_(l), bits_(n * l, 0) {}

TrainingSet::TrainingSet(std::size_t n, std::size_t l, BitSequence bits)
    : n_(n), l_(l), bits_(std::move(bits)) {
  if (bits_.size() != n * l) throw std::invalid_argument("TrainingSet: bit count must equal n * l");
}

std::span<const std::uint8_t> TrainingSet::sequence(std::size_t i) const {
  return std::span(bits_).subspan(i * l_, l_);
}

std::span<std::uint8_t> TrainingSet::sequence(std::size_t i) {
  return std::span(bits_).subspan(i * l_, l_);
}

void sample_iid_into(const BernoulliModel& model, std::size_t length, Rng& rng, BitSequence& out) {
  out.reserve(out.size() + length);
  for (std::size_t i = 0; i < length; ++i) out.push_back(bernoulli(rng, model.p) ? 1 : 0);
}

BitSequence sample_iid(const BernoulliModel& model, std::size_t length, std::uint64_t seed) {
  auto rng = make_stream(seed, {0});
  BitSequence out;
  sample_iid_into(model, length, rng, out);
  return out;
}

Stationary stationary(const MarkovModel& model) {
  const double leave0 = 1.0 - model.p0;
  const double leave1 = 1.0 - model.p1;
  const double total = leave0 + leave1;
  if (total == 0.0) throw std::domain_error("stationary: both states are absorbing");
  const double pi0 = leave1 / total;
  return {pi0, leave0 / total};
}

void sample_markov_path(const MarkovModel& model, const Stationary& pi, Rng& rng,
                        std::span<std::uint8_t> out) {
  if (out.empty()) return;
  std::uint8_t state = bernoulli(rng, pi.pi1) ? 1 : 0;
  out[0] = state;
  for (std::size_t t = 1; t < out.size(); ++t) {
    const double stay = state ? model.p1 : model.p0;
    if (!bernoulli(rng, stay)) state ^= 1;
    out[t] = state;
  }
}

TrainingSet sample_markov(const MarkovModel& model, std::size_t n, std::size_t l, std::uint64_t seed) {
  const auto pi = stationary(model);
  TrainingSet ts(n, l);
  for (std::size_t i = 0; i < n; ++i) {
    auto rng = make_stream(seed, {i});
    sample_markov_path(model, pi, rng, ts.sequence(i));
  }
  return ts;
}

double entropy_rate(const BernoulliModel& model) { return binary_entropy(model.p); }

double entropy_rate(const MarkovModel& model) {
  const auto pi = stationary(model);
  return pi.pi0 * binary_entropy(model.p0) + pi.pi1 * binary_entropy(model.p1);
}

std::vector<std::uint8_t> pack_bits(std::span<const std::uint8_t> bits) {
  std::vector<std::uint8_t> out((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) out[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  }
  return out;
}

BitSequence unpack_bits(std::span<const std::uint8_t> bytes, std::size_t count) {
  if (bytes.size() * 8 < count) throw FormatError("packed bits shorter than declared count");
  BitSequence out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = (bytes[i / 8] >> (i % 8)) & 1u;
  return out;
}

std::vector<std::uint8_t> encode_corpus(std::span<const std::uint8_t> bits) {
  std::vector<std::uint8_t> out;
  put_u64(out, bits.size());
  auto packed = pack_bits(bits);
  out.insert(out.end(), packed.begin(), packed.end());
  return out;
}

BitSequence decode_corpus(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const std::uint64_t count = r.u64();
  if (count > r.remaining() * 8 || (count + 7) / 8 != r.remaining()) {
    throw FormatError("corpus length does not match its bit count");
  }
  return unpack_bits(r.take(r.remaining()), count);
}

}  // namespace lsc
