#include "lsc/coders.hpp"

#include "lsc/io.hpp"
#include "lsc/specfn.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace lsc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint8_t kVersion = 1;
constexpr std::uint64_t kOne = 1ull << 32;  // probability scale

double log2_prob(double p) { return p > 0.0 ? -std::log2(p) : kInf; }

void check_param(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("model parameter outside [0, 1]");
}

// P(first symbol = 1) under a frozen Markov model's own stationary law.
double frozen_first_one(double phat0, double phat1) {
  const double leave0 = 1.0 - phat0;
  const double leave1 = 1.0 - phat1;
  if (leave0 + leave1 == 0.0) return 0.5;
  return leave0 / (leave0 + leave1);
}

std::uint32_t quantize(double p_one) {
  const double scaled = std::nearbyint(p_one * static_cast<double>(kOne));
  if (scaled < 1.0) return 1;
  if (scaled > static_cast<double>(kOne - 1)) return static_cast<std::uint32_t>(kOne - 1);
  return static_cast<std::uint32_t>(scaled);
}

// Rounded (2 ones + 1) / (2 total + 2) in 32-bit fixed point.
std::uint32_t quantize_kt(std::uint64_t ones, std::uint64_t total) {
  const unsigned __int128 num = static_cast<unsigned __int128>(2 * ones + 1) * kOne + (total + 1);
  auto q = static_cast<std::uint64_t>(num / (2 * total + 2));
  if (q < 1) q = 1;
  if (q > kOne - 1) q = kOne - 1;
  return static_cast<std::uint32_t>(q);
}

// Sequential source of quantized P(next bit = 1) for every coder model.
class SymbolModel {
 public:
  explicit SymbolModel(const CoderModel& m) : model_(m) {
    if (m.stream_class == StreamClass::frozen_iid) {
      fixed_[0] = fixed_[1] = quantize(m.params[0]);
    } else if (m.stream_class == StreamClass::frozen_markov) {
      first_ = quantize(frozen_first_one(m.params[0], m.params[1]));
      fixed_[0] = quantize(1.0 - m.params[0]);
      fixed_[1] = quantize(m.params[1]);
    }
  }

  std::uint32_t q_one() const {
    switch (model_.stream_class) {
      case StreamClass::frozen_iid:
        return fixed_[0];
      case StreamClass::frozen_markov:
        return started_ ? fixed_[prev_] : first_;
      case StreamClass::kt_iid:
        return quantize_kt(ones_[0], total_[0]);
      case StreamClass::kt_markov:
        return started_ ? quantize_kt(ones_[prev_], total_[prev_]) : static_cast<std::uint32_t>(kOne / 2);
    }
    return static_cast<std::uint32_t>(kOne / 2);
  }

  void update(std::uint8_t bit) {
    if (model_.stream_class == StreamClass::kt_iid) {
      ++total_[0];
      ones_[0] += bit;
    } else if (model_.stream_class == StreamClass::kt_markov && started_) {
      ++total_[prev_];
      ones_[prev_] += bit;
    }
    started_ = true;
    prev_ = bit;
  }

 private:
  CoderModel model_;
  std::uint32_t fixed_[2] = {0, 0};
  std::uint32_t first_ = 0;
  std::uint64_t ones_[2] = {0, 0};
  std::uint64_t total_[2] = {0, 0};
  bool started_ = false;
  std::uint8_t prev_ = 0;
};

// Interval registers hold 62-bit values; the live interval always spans
// more than a quarter of the register range after renormalization.
constexpr std::uint64_t kTop = (1ull << 62) - 1;
constexpr std::uint64_t kHalf = 1ull << 61;
constexpr std::uint64_t kQuarter = 1ull << 60;

std::uint64_t split(std::uint64_t low, std::uint64_t high, std::uint32_t q_one) {
  const std::uint64_t range = high - low + 1;
  const std::uint64_t q_zero = kOne - q_one;
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(range) * q_zero) >> 32);
}

class BitWriter {
 public:
  void put(unsigned bit) {
    if (count_ % 8 == 0) bytes_.push_back(0);
    if (bit) bytes_.back() |= static_cast<std::uint8_t>(1u << (count_ % 8));
    ++count_;
  }
  std::uint64_t count() const { return count_; }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint64_t count_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
  // Bits past the end read as zero.
  unsigned get() {
    const std::uint64_t i = pos_++;
    if (i / 8 >= bytes_.size()) return 0;
    return (bytes_[i / 8] >> (i % 8)) & 1u;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::uint64_t pos_ = 0;
};

std::size_t param_count(StreamClass c) {
  switch (c) {
    case StreamClass::frozen_iid:
      return 1;
    case StreamClass::frozen_markov:
      return 2;
    default:
      return 0;
  }
}

}  // namespace

FrozenModel FrozenModel::iid(double phat) {
  check_param(phat);
  return {ModelClass::iid, {phat, 0.0}};
}

FrozenModel FrozenModel::markov(double phat0, double phat1) {
  check_param(phat0);
  check_param(phat1);
  return {ModelClass::markov, {phat0, phat1}};
}

double frozen_codelength_iid_counts(double phat, std::uint64_t ones, std::uint64_t length) {
  const std::uint64_t zeros = length - ones;
  double bits = 0.0;
  if (ones > 0) bits += static_cast<double>(ones) * log2_prob(phat);
  if (zeros > 0) bits += static_cast<double>(zeros) * log2_prob(1.0 - phat);
  return bits;
}

double frozen_codelength(const FrozenModel& model, std::span<const std::uint8_t> x) {
  if (model.model_class == ModelClass::iid) {
    std::uint64_t ones = 0;
    for (auto b : x) ones += b;
    return frozen_codelength_iid_counts(model.params[0], ones, x.size());
  }
  if (x.empty()) return 0.0;
  const double p0 = model.params[0];
  const double p1 = model.params[1];
  const double first_one = frozen_first_one(p0, p1);
  double bits = log2_prob(x[0] ? first_one : 1.0 - first_one);
  // Transition tallies: [state][stayed]
  std::uint64_t tally[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t t = 1; t < x.size(); ++t) ++tally[x[t - 1]][x[t] == x[t - 1]];
  const double stay[2] = {p0, p1};
  for (int s = 0; s < 2; ++s) {
    if (tally[s][1]) bits += static_cast<double>(tally[s][1]) * log2_prob(stay[s]);
    if (tally[s][0]) bits += static_cast<double>(tally[s][0]) * log2_prob(1.0 - stay[s]);
  }
  return bits;
}

double kt_codelength_iid(std::span<const std::uint8_t> x) {
  double bits = 0.0;
  std::uint64_t ones = 0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    const double p_one = (static_cast<double>(ones) + 0.5) / (static_cast<double>(t) + 1.0);
    bits -= std::log2(x[t] ? p_one : 1.0 - p_one);
    ones += x[t];
  }
  return bits;
}

double kt_codelength_counts(std::uint64_t zeros, std::uint64_t ones) {
  // P = Gamma(a + 1/2) Gamma(b + 1/2) / (pi Gamma(a + b + 1))
  using boost::math::lgamma;
  const double a = static_cast<double>(zeros);
  const double b = static_cast<double>(ones);
  const double ln_p = lgamma(a + 0.5) + lgamma(b + 0.5) - std::log(std::numbers::pi) - lgamma(a + b + 1.0);
  return -ln_p / kLn2;
}

double kt_codelength_markov(std::span<const std::uint8_t> x) {
  if (x.empty()) return 0.0;
  double bits = 1.0;
  std::uint64_t ones[2] = {0, 0};
  std::uint64_t total[2] = {0, 0};
  for (std::size_t t = 1; t < x.size(); ++t) {
    const auto s = x[t - 1];
    const double p_one = (static_cast<double>(ones[s]) + 0.5) / (static_cast<double>(total[s]) + 1.0);
    bits -= std::log2(x[t] ? p_one : 1.0 - p_one);
    ++total[s];
    ones[s] += x[t];
  }
  return bits;
}

double redundancy_markov(const MarkovModel& truth, const FrozenModel& frozen) {
  if (frozen.model_class != ModelClass::markov) {
    throw std::invalid_argument("redundancy_markov: frozen model must be Markov");
  }
  const auto pi = stationary(truth);
  return pi.pi0 * binary_kl(truth.p0, frozen.params[0]) + pi.pi1 * binary_kl(truth.p1, frozen.params[1]);
}

CoderModel CoderModel::frozen(const FrozenModel& model) {
  CoderModel c;
  c.stream_class = model.model_class == ModelClass::iid ? StreamClass::frozen_iid : StreamClass::frozen_markov;
  c.params = model.params;
  if (c.stream_class == StreamClass::frozen_iid) c.params[1] = 0.0;
  return c;
}

CoderModel CoderModel::kt(ModelClass model_class) {
  CoderModel c;
  c.stream_class = model_class == ModelClass::iid ? StreamClass::kt_iid : StreamClass::kt_markov;
  return c;
}

double ideal_codelength(const CoderModel& model, std::span<const std::uint8_t> x) {
  switch (model.stream_class) {
    case StreamClass::frozen_iid:
      return frozen_codelength(FrozenModel::iid(model.params[0]), x);
    case StreamClass::frozen_markov:
      return frozen_codelength(FrozenModel::markov(model.params[0], model.params[1]), x);
    case StreamClass::kt_iid:
      return kt_codelength_iid(x);
    case StreamClass::kt_markov:
      return kt_codelength_markov(x);
  }
  return kInf;
}

double coder_model_codelength(const CoderModel& model, std::span<const std::uint8_t> x) {
  SymbolModel sm(model);
  double bits = 0.0;
  for (auto b : x) {
    const std::uint64_t q1 = sm.q_one();
    const std::uint64_t q = b ? q1 : kOne - q1;
    bits += 32.0 - std::log2(static_cast<double>(q));
    sm.update(b);
  }
  return bits;
}

CodeStream arith_encode(const CoderModel& model, std::span<const std::uint8_t> x) {
  const auto klass = model.stream_class;
  if (klass == StreamClass::frozen_iid || klass == StreamClass::frozen_markov) {
    check_param(model.params[0]);
    if (klass == StreamClass::frozen_markov) check_param(model.params[1]);
    if (std::isinf(ideal_codelength(model, x))) {
      throw std::invalid_argument("arith_encode: input contains a symbol the frozen model excludes");
    }
  }
  SymbolModel sm(model);
  BitWriter out;
  std::uint64_t low = 0;
  std::uint64_t high = kTop;
  std::uint64_t pending = 0;
  auto emit = [&](unsigned bit) {
    out.put(bit);
    for (; pending > 0; --pending) out.put(bit ^ 1u);
  };

  for (auto b : x) {
    const std::uint64_t r0 = split(low, high, sm.q_one());
    if (b) {
      low += r0;
    } else {
      high = low + r0 - 1;
    }
    sm.update(b);
    for (;;) {
      if (high < kHalf) {
        emit(0);
      } else if (low >= kHalf) {
        emit(1);
        low -= kHalf;
        high -= kHalf;
      } else if (low >= kQuarter && high < kHalf + kQuarter) {
        ++pending;
        low -= kQuarter;
        high -= kQuarter;
      } else {
        break;
      }
      low <<= 1;
      high = (high << 1) | 1u;
    }
  }

  // Shortest tail whose dyadic interval fits inside [low, high].
  if (pending == 0 && low == 0 && high == kTop) {
    // the whole range: nothing to send
  } else if (low == 0) {
    emit(0);
  } else if (high == kTop) {
    emit(1);
  } else if (low < kQuarter) {
    emit(0);
    out.put(1);
  } else {
    emit(1);
    out.put(0);
  }

  CodeStream cs;
  cs.model = model;
  cs.bit_count = x.size();
  cs.payload_bits = out.count();
  cs.payload = out.take();
  return cs;
}

BitSequence arith_decode(const CodeStream& stream) {
  SymbolModel sm(stream.model);
  BitReader in(stream.payload);
  std::uint64_t low = 0;
  std::uint64_t high = kTop;
  std::uint64_t value = 0;
  for (int i = 0; i < 62; ++i) value = (value << 1) | in.get();

  BitSequence x;
  x.reserve(stream.bit_count);
  for (std::uint64_t t = 0; t < stream.bit_count; ++t) {
    const std::uint64_t r0 = split(low, high, sm.q_one());
    std::uint8_t b;
    if (value - low < r0) {
      b = 0;
      high = low + r0 - 1;
    } else {
      b = 1;
      low += r0;
    }
    x.push_back(b);
    sm.update(b);
    for (;;) {
      if (high < kHalf) {
        // nothing to subtract
      } else if (low >= kHalf) {
        low -= kHalf;
        high -= kHalf;
        value -= kHalf;
      } else if (low >= kQuarter && high < kHalf + kQuarter) {
        low -= kQuarter;
        high -= kQuarter;
        value -= kQuarter;
      } else {
        break;
      }
      low <<= 1;
      high = (high << 1) | 1u;
      value = (value << 1) | in.get();
    }
  }
  return x;
}

std::vector<std::uint8_t> CodeStream::serialize() const {
  std::vector<std::uint8_t> out = {'L', 'S', 'C', '1', kVersion, static_cast<std::uint8_t>(model.stream_class)};
  for (std::size_t i = 0; i < param_count(model.stream_class); ++i) put_f64(out, model.params[i]);
  put_u64(out, bit_count);
  out.insert(out.end(), payload.begin(), payload.end());
  seal_crc(out);
  return out;
}

CodeStream CodeStream::parse(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || bytes[0] != 'L' || bytes[1] != 'S' || bytes[2] != 'C' || bytes[3] != '1') {
    throw FormatError("not an LSC1 stream (bad magic)");
  }
  ByteReader r(check_crc(bytes));
  r.take(4);
  if (r.u8() != kVersion) throw FormatError("unsupported stream version");
  const std::uint8_t klass = r.u8();
  if (klass > 3) throw FormatError("unknown model class in stream header");
  CodeStream cs;
  cs.model.stream_class = static_cast<StreamClass>(klass);
  for (std::size_t i = 0; i < param_count(cs.model.stream_class); ++i) {
    const double p = r.f64();
    if (!(p >= 0.0 && p <= 1.0)) throw FormatError("stream parameter outside [0, 1]");
    cs.model.params[i] = p;
  }
  cs.bit_count = r.u64();
  auto payload = r.take(r.remaining());
  cs.payload.assign(payload.begin(), payload.end());
  cs.payload_bits = cs.payload.size() * 8;
  return cs;
}

BitSequence arith_decode(std::span<const std::uint8_t> container) {
  return arith_decode(CodeStream::parse(container));
}

std::vector<std::uint8_t> serialize_model(const FrozenModel& model) {
  std::vector<std::uint8_t> out = {'L', 'S', 'C', 'M', kVersion, static_cast<std::uint8_t>(model.model_class)};
  put_f64(out, model.params[0]);
  if (model.model_class == ModelClass::markov) put_f64(out, model.params[1]);
  seal_crc(out);
  return out;
}

FrozenModel parse_model(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || bytes[0] != 'L' || bytes[1] != 'S' || bytes[2] != 'C' || bytes[3] != 'M') {
    throw FormatError("not an LSCM model file (bad magic)");
  }
  ByteReader r(check_crc(bytes));
  r.take(4);
  if (r.u8() != kVersion) throw FormatError("unsupported model file version");
  const std::uint8_t klass = r.u8();
  if (klass > 1) throw FormatError("unknown model class in model file");
  const double a = r.f64();
  const double b = klass == 1 ? r.f64() : 0.0;
  if (r.remaining() != 0) throw FormatError("trailing bytes in model file");
  if (!(a >= 0.0 && a <= 1.0) || !(b >= 0.0 && b <= 1.0)) throw FormatError("model parameter outside [0, 1]");
  return klass == 0 ? FrozenModel::iid(a) : FrozenModel::markov(a, b);
}

}  // namespace lsc
