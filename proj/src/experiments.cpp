#include "lsc/experiments.hpp"

#include "lsc/coders.hpp"
#include "lsc/io.hpp"
#include "lsc/rng.hpp"
#include "lsc/specfn.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace lsc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZ95 = 1.959963984540054;
constexpr std::uint64_t kChunk = 1024;

// Neumaier summation.
struct Sum {
  double s = 0.0;
  double c = 0.0;
  void add(double x) {
    if (!std::isfinite(x) || !std::isfinite(s)) {
      s += x;
      c = 0.0;
      return;
    }
    const double t = s + x;
    if (std::fabs(s) >= std::fabs(x)) {
      c += (s - t) + x;
    } else {
      c += (x - t) + s;
    }
    s = t;
  }
  double value() const { return std::isfinite(s) ? s + c : s; }
};

TailEstimate tail_from_counts(std::uint64_t hits, std::uint64_t trials) {
  const double t = static_cast<double>(trials);
  const double v = static_cast<double>(hits) / t;
  // The 1/(2T) term keeps the interval open when no (or every) trial hits.
  const double half = kZ95 * std::sqrt(v * (1.0 - v) / t) + 0.5 / t;
  return {v, half, trials, EstimateMethod::montecarlo};
}

MeanEstimate mean_from_sums(double sum, double sum_sq, std::uint64_t trials) {
  const double t = static_cast<double>(trials);
  const double mean = sum / t;
  if (std::isinf(mean)) return {kInf, kInf, trials, EstimateMethod::montecarlo};
  const double var = trials > 1 ? std::max(0.0, (sum_sq - t * mean * mean) / (t - 1.0)) : 0.0;
  return {mean, kZ95 * std::sqrt(var / t), trials, EstimateMethod::montecarlo};
}

std::uint64_t count_ones(Rng& rng, double p, std::uint64_t length) {
  std::uint64_t k = 0;
  for (std::uint64_t i = 0; i < length; ++i) k += bernoulli(rng, p);
  return k;
}

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("source probability outside [0, 1]");
}

std::size_t argmax_of(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace

std::size_t worker_count() {
  if (const char* env = std::getenv("LSC_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<std::uint8_t> exceedance_set(std::uint64_t m, double p, double a, const EstimatorSpec& spec) {
  if (m > kExactBudget) throw std::invalid_argument("exact oracle: m exceeds the summation budget");
  check_probability(p);
  std::vector<std::uint8_t> flags(m + 1);
  for (std::uint64_t k = 0; k <= m; ++k) {
    flags[k] = binary_kl(p, estimate({k, m}, spec)) > a;
  }
  return flags;
}

TailEstimate exact_tail_iid(std::uint64_t m, double p, double a, const EstimatorSpec& spec) {
  const auto flags = exceedance_set(m, p, a, spec);
  double v = 0.0;
  for (std::uint64_t k = 0; k <= m; ++k) {
    if (flags[k]) v += binomial_pmf(static_cast<long>(m), static_cast<long>(k), p);
  }
  return {std::min(v, 1.0), 0.0, 0, EstimateMethod::exact};
}

double exact_avg_redundancy_iid(std::uint64_t m, double p, const EstimatorSpec& spec) {
  if (m > kExactBudget) throw std::invalid_argument("exact oracle: m exceeds the summation budget");
  check_probability(p);
  Sum s;
  for (std::uint64_t k = 0; k <= m; ++k) {
    const double w = binomial_pmf(static_cast<long>(m), static_cast<long>(k), p);
    if (w == 0.0) continue;
    s.add(w * binary_kl(p, estimate({k, m}, spec)));
  }
  return s.value();
}

std::vector<double> default_p_grid(std::uint64_t m) {
  if (m < 1) throw std::invalid_argument("default_p_grid: m must be positive");
  const double md = static_cast<double>(m);
  auto grid = log_grid(0.1 / md, 0.5, 200);
  for (double g : log_grid(0.05, 50.0, 100)) {
    if (g / md <= 0.5) grid.push_back(g / md);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

TailSweep exact_tail_sweep(const SweepConfig& cfg) {
  if (cfg.p_grid.empty()) throw std::invalid_argument("empty p grid");
  TailSweep out;
  out.points.resize(cfg.p_grid.size());
  parallel_for(cfg.p_grid.size(), [&](std::size_t i) {
    out.points[i] = exact_tail_iid(cfg.m, cfg.p_grid[i], cfg.a, cfg.spec);
  });
  std::vector<double> v;
  for (const auto& t : out.points) v.push_back(t.value);
  out.argmax = argmax_of(v);
  return out;
}

TailSweep mc_tail_iid(const SweepConfig& cfg) {
  if (cfg.p_grid.empty()) throw std::invalid_argument("empty p grid");
  if (cfg.trials < 1) throw std::invalid_argument("trials must be at least 1");
  for (double p : cfg.p_grid) check_probability(p);
  const std::size_t chunks = (cfg.trials + kChunk - 1) / kChunk;
  const std::size_t points = cfg.p_grid.size();
  std::vector<std::uint64_t> hits(points * chunks);
  parallel_for(points * chunks, [&](std::size_t job) {
    const std::size_t i = job / chunks;
    const std::size_t c = job % chunks;
    auto rng = make_stream(cfg.seed, {i, c});
    const std::uint64_t n = std::min<std::uint64_t>(kChunk, cfg.trials - c * kChunk);
    const double p = cfg.p_grid[i];
    std::uint64_t h = 0;
    for (std::uint64_t t = 0; t < n; ++t) {
      const std::uint64_t k = count_ones(rng, p, cfg.m);
      h += binary_kl(p, estimate({k, cfg.m}, cfg.spec)) > cfg.a;
    }
    hits[job] = h;
  });
  TailSweep out;
  std::vector<double> v;
  for (std::size_t i = 0; i < points; ++i) {
    std::uint64_t h = 0;
    for (std::size_t c = 0; c < chunks; ++c) h += hits[i * chunks + c];
    out.points.push_back(tail_from_counts(h, cfg.trials));
    v.push_back(out.points.back().value);
  }
  out.argmax = argmax_of(v);
  return out;
}

MeanSweep exact_avg_sweep(std::uint64_t m, const std::vector<double>& p_grid, const EstimatorSpec& spec) {
  if (p_grid.empty()) throw std::invalid_argument("empty p grid");
  MeanSweep out;
  out.points.resize(p_grid.size());
  parallel_for(p_grid.size(), [&](std::size_t i) {
    out.points[i] = {exact_avg_redundancy_iid(m, p_grid[i], spec), 0.0, 0, EstimateMethod::exact};
  });
  std::vector<double> v;
  for (const auto& e : out.points) v.push_back(e.value);
  out.argmax = argmax_of(v);
  return out;
}

MeanSweep mc_avg_redundancy_iid(std::uint64_t m, const std::vector<double>& p_grid, const EstimatorSpec& spec,
                                std::uint64_t trials, std::uint64_t seed) {
  if (m <= 20) return exact_avg_sweep(m, p_grid, spec);
  if (p_grid.empty()) throw std::invalid_argument("empty p grid");
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  for (double p : p_grid) check_probability(p);
  const std::size_t chunks = (trials + kChunk - 1) / kChunk;
  const std::size_t points = p_grid.size();
  std::vector<std::pair<double, double>> sums(points * chunks);
  parallel_for(points * chunks, [&](std::size_t job) {
    const std::size_t i = job / chunks;
    const std::size_t c = job % chunks;
    auto rng = make_stream(seed, {i, c});
    const std::uint64_t n = std::min<std::uint64_t>(kChunk, trials - c * kChunk);
    Sum s, s2;
    for (std::uint64_t t = 0; t < n; ++t) {
      const std::uint64_t k = count_ones(rng, p_grid[i], m);
      const double d = binary_kl(p_grid[i], estimate({k, m}, spec));
      s.add(d);
      s2.add(d * d);
    }
    sums[job] = {s.value(), s2.value()};
  });
  MeanSweep out;
  std::vector<double> v;
  for (std::size_t i = 0; i < points; ++i) {
    Sum s, s2;
    for (std::size_t c = 0; c < chunks; ++c) {
      s.add(sums[i * chunks + c].first);
      s2.add(sums[i * chunks + c].second);
    }
    out.points.push_back(mean_from_sums(s.value(), s2.value(), trials));
    v.push_back(out.points.back().value);
  }
  out.argmax = argmax_of(v);
  return out;
}

std::vector<MarkovPoint> mc_markov(const MarkovConfig& cfg) {
  if (cfg.grid.empty()) throw std::invalid_argument("empty (p0, p1) grid");
  if (cfg.n < 1 || cfg.l < 2) throw std::invalid_argument("mc_markov: need n >= 1 and l >= 2");
  if (cfg.trials < 1) throw std::invalid_argument("trials must be at least 1");
  const double eps = cfg.eps < 0.0 ? default_genie_eps(cfg.n) : cfg.eps;
  const std::size_t chunks = (cfg.trials + kChunk - 1) / kChunk;
  const std::size_t points = cfg.grid.size();

  struct Partial {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::uint64_t hits = 0;
    std::uint64_t invalid = 0;
  };
  std::vector<Partial> partial(points * chunks);
  std::vector<MarkovModel> models;
  for (auto [p0, p1] : cfg.grid) models.emplace_back(p0, p1);

  parallel_for(points * chunks, [&](std::size_t job) {
    const std::size_t i = job / chunks;
    const std::size_t c = job % chunks;
    const auto& model = models[i];
    const auto pi = stationary(model);
    const auto budget = genie_budget(model, cfg.n, cfg.l, eps);
    TrainingSet ts(cfg.n, cfg.l);
    const std::uint64_t n = std::min<std::uint64_t>(kChunk, cfg.trials - c * kChunk);
    Sum s, s2;
    Partial out;
    for (std::uint64_t t = 0; t < n; ++t) {
      const std::uint64_t trial = c * kChunk + t;
      auto rng = make_stream(cfg.seed, {i, trial});
      for (std::size_t j = 0; j < cfg.n; ++j) sample_markov_path(model, pi, rng, ts.sequence(j));
      CountStatistic c0, c1;
      if (cfg.genie) {
        const auto g = genie_inhibit(ts, budget.m0, budget.m1, model, rng());
        c0 = g.counts0;
        c1 = g.counts1;
        out.invalid += g.invalid;
      } else {
        const auto mc = markov_counts(ts);
        c0 = mc.state0;
        c1 = mc.state1;
      }
      const auto frozen = FrozenModel::markov(estimate_or_half(c0, cfg.spec), estimate_or_half(c1, cfg.spec));
      const double r = redundancy_markov(model, frozen);
      s.add(r);
      s2.add(r * r);
      out.hits += r > cfg.a;
    }
    out.sum = s.value();
    out.sum_sq = s2.value();
    partial[job] = out;
  });

  std::vector<MarkovPoint> result;
  for (std::size_t i = 0; i < points; ++i) {
    Sum s, s2;
    std::uint64_t hits = 0, invalid = 0;
    for (std::size_t c = 0; c < chunks; ++c) {
      const auto& p = partial[i * chunks + c];
      s.add(p.sum);
      s2.add(p.sum_sq);
      hits += p.hits;
      invalid += p.invalid;
    }
    MarkovPoint mp{cfg.grid[i].first, cfg.grid[i].second, mean_from_sums(s.value(), s2.value(), cfg.trials),
                   tail_from_counts(hits, cfg.trials), tail_from_counts(invalid, cfg.trials)};
    if (!cfg.genie) mp.invalid_rate = {0.0, 0.0, cfg.trials, EstimateMethod::exact};
    result.push_back(mp);
  }
  return result;
}

namespace {

double mean_of(const std::vector<double>& v) {
  Sum s;
  for (double x : v) s.add(x);
  return s.value() / static_cast<double>(v.size());
}

// Per-symbol excess codelength over the block entropy for one
// (training set, test sequence) pair: {learned, universal}.
std::pair<double, double> beat_trial(const BeatConfig& cfg, const EstimatorSpec& spec, std::uint64_t m, Rng& rng) {
  const double l = static_cast<double>(cfg.l);
  if (cfg.cls == ModelClass::iid) {
    const std::uint64_t k_train = count_ones(rng, cfg.p, m);
    const double phat = estimate({k_train, m}, spec);
    const std::uint64_t k = count_ones(rng, cfg.p, cfg.l);
    const double entropy = l * binary_entropy(cfg.p);
    const double learned = frozen_codelength_iid_counts(phat, k, cfg.l) - entropy;
    const double universal = kt_codelength_counts(cfg.l - k, k) - entropy;
    return {learned / l, universal / l};
  }
  const MarkovModel model(cfg.p0, cfg.p1);
  const auto pi = stationary(model);
  const auto n = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m))));
  const auto len = std::max<std::size_t>(2, static_cast<std::size_t>((m + n - 1) / n));
  TrainingSet ts(n, len);
  for (std::size_t j = 0; j < n; ++j) sample_markov_path(model, pi, rng, ts.sequence(j));
  const auto counts = markov_counts(ts);
  const auto frozen = FrozenModel::markov(estimate_or_half(counts.state0, spec), estimate_or_half(counts.state1, spec));
  BitSequence x(cfg.l);
  sample_markov_path(model, pi, rng, x);
  const double entropy = binary_entropy(pi.pi1) + (l - 1.0) * entropy_rate(model);
  return {(frozen_codelength(frozen, x) - entropy) / l, (kt_codelength_markov(x) - entropy) / l};
}

double upper_quantile(std::vector<double> v, double pe) {
  auto idx = static_cast<std::size_t>(std::ceil((1.0 - pe) * static_cast<double>(v.size())));
  idx = std::clamp<std::size_t>(idx, 1, v.size()) - 1;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(idx), v.end());
  return v[idx];
}

}  // namespace

BeatReport beat_universal_experiment(const BeatConfig& cfg) {
  if (cfg.replicates < 1 || cfg.trials < 1) throw std::invalid_argument("beat: replicates and trials must be positive");
  if (cfg.cls == ModelClass::iid) {
    check_probability(cfg.p);
  } else {
    MarkovModel check(cfg.p0, cfg.p1);
    stationary(check);
  }
  BeatReport rep;
  rep.l = cfg.l;
  rep.winner = "inconclusive";
  if (cfg.l <= 2) return rep;

  const std::uint64_t threshold = training_threshold(cfg.l, cfg.mode, cfg.cls, cfg.pe);
  rep.m = static_cast<std::uint64_t>(std::ceil(cfg.safety * static_cast<double>(threshold)));
  const EstimatorSpec spec = cfg.mode == ThresholdMode::average
                                 ? EstimatorSpec::add_alpha(kAlpha0)
                                 : EstimatorSpec::add_alpha(gaussian_level(cfg.pe) / 6.0);

  rep.learned.resize(cfg.replicates);
  rep.universal.resize(cfg.replicates);
  parallel_for(cfg.replicates, [&](std::size_t r) {
    std::vector<double> learned(cfg.trials), universal(cfg.trials);
    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
      auto rng = make_stream(cfg.seed, {r, t});
      std::tie(learned[t], universal[t]) = beat_trial(cfg, spec, rep.m, rng);
    }
    if (cfg.mode == ThresholdMode::average) {
      rep.learned[r] = mean_of(learned);
      rep.universal[r] = mean_of(universal);
    } else {
      rep.learned[r] = upper_quantile(learned, cfg.pe);
      rep.universal[r] = upper_quantile(universal, cfg.pe);
    }
  });

  rep.learned_mean = mean_of(rep.learned);
  rep.universal_mean = mean_of(rep.universal);
  std::vector<double> diff(cfg.replicates);
  std::uint64_t wins = 0;
  for (std::size_t r = 0; r < cfg.replicates; ++r) {
    diff[r] = rep.universal[r] - rep.learned[r];
    wins += rep.learned[r] < rep.universal[r];
  }
  rep.win_fraction = static_cast<double>(wins) / static_cast<double>(cfg.replicates);
  const double d = mean_of(diff);
  double var = 0.0;
  for (double x : diff) var += (x - d) * (x - d);
  const double reps = static_cast<double>(cfg.replicates);
  rep.diff_se = cfg.replicates > 1 ? std::sqrt(var / (reps - 1.0) / reps) : kInf;
  if (std::fabs(d) > 2.0 * rep.diff_se) rep.winner = d > 0.0 ? "learned" : "universal";
  return rep;
}

Config parse_config(std::string_view text) {
  Config cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("config line " + std::to_string(lineno) + ": expected key=value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw FormatError("config line " + std::to_string(lineno) + ": empty key");
    if (!cfg.emplace(key, value).second) throw FormatError("config: duplicate key '" + key + "'");
  }
  return cfg;
}

std::string config_hash(const Config& cfg) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (const auto& [k, v] : cfg) {
    for (char ch : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(ch);
      h *= 0x100000001B3ull;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

class ConfigReader {
 public:
  explicit ConfigReader(const Config& cfg) : cfg_(cfg) {}

  const std::string* find(const std::string& key) {
    used_.insert(key);
    auto it = cfg_.find(key);
    return it == cfg_.end() ? nullptr : &it->second;
  }
  std::string str(const std::string& key, const std::string& fallback) {
    const auto* v = find(key);
    return v ? *v : fallback;
  }
  std::string required(const std::string& key) {
    const auto* v = find(key);
    if (!v) throw std::invalid_argument("config: missing key '" + key + "'");
    return *v;
  }
  double real(const std::string& key, double fallback) {
    const auto* v = find(key);
    return v ? to_real(key, *v) : fallback;
  }
  std::uint64_t count(const std::string& key, std::uint64_t fallback) {
    const auto* v = find(key);
    if (!v) return fallback;
    std::size_t pos = 0;
    unsigned long long n = 0;
    try {
      n = std::stoull(*v, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != v->size() || v->empty() || (*v)[0] == '-') {
      throw std::invalid_argument("config: '" + key + "' must be a nonnegative integer");
    }
    return n;
  }
  void finish() const {
    for (const auto& [k, v] : cfg_) {
      if (!used_.count(k)) throw std::invalid_argument("config: unknown key '" + k + "'");
    }
  }
  static double to_real(const std::string& key, const std::string& text) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != text.size() || text.empty()) throw std::invalid_argument("config: '" + key + "' must be a number");
    return v;
  }

 private:
  const Config& cfg_;
  std::set<std::string> used_;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

std::vector<double> read_p_grid(ConfigReader& r, std::uint64_t m) {
  const auto text = r.str("p_grid", "default");
  if (text == "default") return default_p_grid(m);
  std::vector<double> grid;
  for (const auto& item : split(text, ',')) grid.push_back(ConfigReader::to_real("p_grid", item));
  if (grid.empty()) throw std::invalid_argument("config: empty p_grid");
  return grid;
}

// a = <bits>, or achievable / converse at level pe, times a_scale.
double read_threshold(ConfigReader& r, std::uint64_t m, ModelClass cls) {
  const auto text = r.str("a", "");
  const double scale = r.real("a_scale", 1.0);
  if (text == "achievable" || text == "converse") {
    const double pe = r.real("pe", std::numeric_limits<double>::quiet_NaN());
    if (std::isnan(pe)) throw std::invalid_argument("config: a=" + text + " needs pe");
    TailBoundResult b;
    if (cls == ModelClass::iid) {
      b = text == "achievable" ? iid_achievable_a(m, pe) : iid_converse_a(m, pe);
    } else {
      b = text == "achievable" ? markov_achievable_a(m, pe) : markov_converse_a(m, pe);
    }
    return scale * b.a;
  }
  if (text.empty()) return 0.0;
  return scale * ConfigReader::to_real("a", text);
}

std::string point_label(const std::string& metric, double p) { return metric + "[p=" + format_real(p) + "]"; }

std::string pair_label(const std::string& metric, double p0, double p1) {
  return metric + "[p0=" + format_real(p0) + ";p1=" + format_real(p1) + "]";
}

}  // namespace

std::vector<ResultRow> run_simulation(const Config& cfg, std::uint64_t seed) {
  ConfigReader r(cfg);
  const auto experiment = r.required("experiment");
  std::vector<ResultRow> rows;

  if (experiment == "exact_tail_iid" || experiment == "tail_iid") {
    SweepConfig sc;
    sc.m = r.count("m", 0);
    if (sc.m < 1) throw std::invalid_argument("config: m must be positive");
    sc.p_grid = read_p_grid(r, sc.m);
    sc.spec = EstimatorSpec::parse(r.str("spec", "mle"));
    sc.a = read_threshold(r, sc.m, ModelClass::iid);
    sc.trials = r.count("trials", 100'000);
    sc.seed = seed;
    r.finish();
    const bool exact = experiment == "exact_tail_iid";
    const auto sweep = exact ? exact_tail_sweep(sc) : mc_tail_iid(sc);
    for (std::size_t i = 0; i < sc.p_grid.size(); ++i) {
      const auto& e = sweep.points[i];
      rows.push_back({point_label("tail", sc.p_grid[i]), e.value, e.ci_halfwidth, e.trials});
    }
    const auto sup = sweep.sup();
    rows.push_back({"sup_tail", sup.value, sup.ci_halfwidth, sup.trials});
    rows.push_back({"threshold_a", sc.a, 0.0, 0});
  } else if (experiment == "avg_iid") {
    const std::uint64_t m = r.count("m", 0);
    if (m < 1) throw std::invalid_argument("config: m must be positive");
    const auto grid = read_p_grid(r, m);
    const auto spec = EstimatorSpec::parse(r.str("spec", "add_alpha:0.50922"));
    const std::uint64_t trials = r.count("trials", 100'000);
    const bool exact = r.str("method", "montecarlo") == "exact";
    r.finish();
    const auto sweep = exact ? exact_avg_sweep(m, grid, spec) : mc_avg_redundancy_iid(m, grid, spec, trials, seed);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto& e = sweep.points[i];
      rows.push_back({point_label("mean_redundancy", grid[i]), e.value, e.ci_halfwidth, e.trials});
    }
    const auto sup = sweep.sup();
    const double md = static_cast<double>(m);
    rows.push_back({"m_times_sup_mean", md * sup.value, md * sup.ci_halfwidth, sup.trials});
  } else if (experiment == "markov") {
    MarkovConfig mc;
    for (const auto& item : split(r.required("grid"), ',')) {
      const auto parts = split(item, ':');
      if (parts.size() != 2) throw std::invalid_argument("config: grid entries must be p0:p1");
      mc.grid.emplace_back(ConfigReader::to_real("grid", parts[0]), ConfigReader::to_real("grid", parts[1]));
    }
    mc.n = r.count("n", 1);
    mc.l = r.count("l", 2);
    mc.spec = EstimatorSpec::parse(r.str("spec", "add_alpha:0.50922"));
    const auto genie = r.str("genie", "false");
    if (genie != "true" && genie != "false") throw std::invalid_argument("config: genie must be true or false");
    mc.genie = genie == "true";
    mc.eps = r.real("eps", -1.0);
    mc.a = read_threshold(r, mc.n * mc.l, ModelClass::markov);
    mc.trials = r.count("trials", 1000);
    mc.seed = seed;
    r.finish();
    const auto points = mc_markov(mc);
    double sup = 0.0, sup_ci = 0.0;
    for (const auto& p : points) {
      rows.push_back({pair_label("mean_redundancy", p.p0, p.p1), p.redundancy.value, p.redundancy.ci_halfwidth,
                      p.redundancy.trials});
      rows.push_back({pair_label("tail", p.p0, p.p1), p.tail.value, p.tail.ci_halfwidth, p.tail.trials});
      if (mc.genie) {
        rows.push_back({pair_label("invalid_rate", p.p0, p.p1), p.invalid_rate.value, p.invalid_rate.ci_halfwidth,
                        p.invalid_rate.trials});
      }
      if (p.redundancy.value > sup) {
        sup = p.redundancy.value;
        sup_ci = p.redundancy.ci_halfwidth;
      }
    }
    const double md = static_cast<double>(mc.n * mc.l);
    rows.push_back({"m_times_sup_mean", md * sup, md * sup_ci, mc.trials});
  } else if (experiment == "beat") {
    BeatConfig bc;
    bc.l = r.count("l", 4096);
    const auto cls = r.str("class", "iid");
    if (cls != "iid" && cls != "markov") throw std::invalid_argument("config: class must be iid or markov");
    bc.cls = cls == "iid" ? ModelClass::iid : ModelClass::markov;
    bc.p = r.real("p", 0.5);
    bc.p0 = r.real("p0", 0.5);
    bc.p1 = r.real("p1", 0.5);
    const auto mode = r.str("mode", "average");
    if (mode != "average" && mode != "tail") throw std::invalid_argument("config: mode must be average or tail");
    bc.mode = mode == "average" ? ThresholdMode::average : ThresholdMode::tail;
    bc.pe = r.real("pe", 0.05);
    bc.replicates = r.count("replicates", 200);
    bc.trials = r.count("trials", 100);
    bc.safety = r.real("safety", 2.0);
    bc.seed = seed;
    r.finish();
    const auto rep = beat_universal_experiment(bc);
    rows.push_back({"training_m", static_cast<double>(rep.m), 0.0, 0});
    rows.push_back({"learned_excess", rep.learned_mean, 0.0, bc.replicates});
    rows.push_back({"universal_excess", rep.universal_mean, 0.0, bc.replicates});
    rows.push_back({"excess_gap", rep.universal_mean - rep.learned_mean, kZ95 * rep.diff_se, bc.replicates});
    rows.push_back({"learned_win_fraction", rep.win_fraction, 0.0, bc.replicates});
    rows.push_back({"winner=" + rep.winner, 1.0, 0.0, bc.replicates});
  } else {
    throw std::invalid_argument("config: unknown experiment '" + experiment + "'");
  }
  return rows;
}

std::string results_csv(const std::string& hash, const std::vector<ResultRow>& rows, std::uint64_t seed) {
  std::ostringstream os;
  for (const auto& row : rows) {
    os << hash << ',' << row.metric << ',' << format_real(row.value) << ',' << format_real(row.ci) << ','
       << row.trials << ',' << seed << '\n';
  }
  return os.str();
}

}  // namespace lsc
