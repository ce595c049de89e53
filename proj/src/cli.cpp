#include "lsc/cli.hpp"

#include "lsc/bounds.hpp"
#include "lsc/coders.hpp"
#include "lsc/estimators.hpp"
#include "lsc/experiments.hpp"
#include "lsc/io.hpp"
#include "lsc/models.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace lsc::cli {
namespace {

namespace fs = std::filesystem;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

ModelClass parse_class(const std::string& s) { return s == "markov" ? ModelClass::markov : ModelClass::iid; }

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_file_atomic(path, text);
  }
}

struct Options {
  // bounds
  std::uint64_t m = 0;
  double pe = 0.0, fig_pe = 1e-6, beat_pe = 0.05;
  std::string cls = "iid";
  // figures
  int which = 1;
  std::optional<double> alpha;
  std::size_t points = 0;
  double gamma_min = 1e-2, gamma_max = 1e2;
  double pe_min = 1e-12, pe_max = 0.1;
  // shared
  std::string in, out, config, model, kt, estimator = "add_alpha:0.50922", mode = "average";
  std::uint64_t seed = 0, n = 1, l = 0, seq_len = 0, trials = 200, per_replicate = 100;
  std::optional<double> p, p0, p1;
};

void cmd_bounds(const Options& o, std::ostream& out) { out << bounds_table_csv(o.m, o.pe, parse_class(o.cls)); }

void cmd_figures(const Options& o, std::ostream& out) {
  if (o.which == 1) {
    const double alpha = o.alpha ? *o.alpha : alpha_range(o.fig_pe).lo;
    const auto grid = log_grid(o.gamma_min, o.gamma_max, o.points ? o.points : 400);
    emit(figure1_csv(figure1_data(o.fig_pe, alpha, grid)), o.out, out);
  } else {
    if (!(o.pe_min > 0.0 && o.pe_max < 0.5 && o.pe_min <= o.pe_max)) {
      throw UsageError("--pe-min/--pe-max must satisfy 0 < pe-min <= pe-max < 0.5");
    }
    emit(figure2_csv(figure2_data(log_grid(o.pe_min, o.pe_max, o.points ? o.points : 100))), o.out, out);
  }
}

void cmd_simulate(const Options& o) {
  const auto bytes = read_file(o.config);
  const auto cfg = parse_config(std::string(bytes.begin(), bytes.end()));
  const auto rows = run_simulation(cfg, o.seed);
  std::string text;
  if (fs::exists(o.out)) {
    const auto prev = read_file(o.out);
    text.assign(prev.begin(), prev.end());
  }
  if (text.empty()) text = std::string(kResultsHeader);
  text += results_csv(config_hash(cfg), rows, o.seed);
  write_file_atomic(o.out, text);
}

void cmd_gen(const Options& o) {
  if (o.l < 1 || o.n < 1) throw UsageError("--n and --l must be positive");
  BitSequence bits;
  if (parse_class(o.cls) == ModelClass::iid) {
    if (!o.p) throw UsageError("gen --class iid needs --p");
    bits = sample_iid(BernoulliModel(*o.p), o.n * o.l, o.seed);
  } else {
    if (!o.p0 || !o.p1) throw UsageError("gen --class markov needs --p0 and --p1");
    bits = sample_markov(MarkovModel(*o.p0, *o.p1), o.n, o.l, o.seed).bits();
  }
  write_file_atomic(o.out, encode_corpus(bits));
}

void cmd_train(const Options& o) {
  const auto bits = decode_corpus(read_file(o.in));
  const auto spec = EstimatorSpec::parse(o.estimator);
  FrozenModel model;
  if (parse_class(o.cls) == ModelClass::iid) {
    std::uint64_t ones = 0;
    for (auto b : bits) ones += b;
    model = FrozenModel::iid(estimate({ones, bits.size()}, spec));
  } else {
    const std::size_t len = o.seq_len ? o.seq_len : bits.size();
    if (len < 2 || bits.size() % len != 0) {
      throw UsageError("--seq-len must be at least 2 and divide the corpus length");
    }
    const auto counts = markov_counts(TrainingSet(bits.size() / len, len, bits));
    model = FrozenModel::markov(estimate_or_half(counts.state0, spec), estimate_or_half(counts.state1, spec));
  }
  write_file_atomic(o.out, serialize_model(model));
}

void cmd_compress(const Options& o) {
  if (o.model.empty() == o.kt.empty()) throw UsageError("compress needs exactly one of --model and --kt");
  const auto bits = decode_corpus(read_file(o.in));
  const CoderModel cm = o.model.empty() ? CoderModel::kt(parse_class(o.kt))
                                        : CoderModel::frozen(parse_model(read_file(o.model)));
  write_file_atomic(o.out, arith_encode(cm, bits).serialize());
}

void cmd_decompress(const Options& o) { write_file_atomic(o.out, encode_corpus(arith_decode(read_file(o.in)))); }

void cmd_beat(const Options& o, std::ostream& out) {
  BeatConfig bc;
  bc.l = o.l;
  bc.cls = parse_class(o.cls);
  if (bc.cls == ModelClass::iid) {
    if (!o.p) throw UsageError("beat --class iid needs --p");
    bc.p = *o.p;
  } else {
    if (!o.p0 || !o.p1) throw UsageError("beat --class markov needs --p0 and --p1");
    bc.p0 = *o.p0;
    bc.p1 = *o.p1;
  }
  bc.mode = o.mode == "tail" ? ThresholdMode::tail : ThresholdMode::average;
  bc.pe = o.beat_pe;
  bc.replicates = o.trials;
  bc.trials = o.per_replicate;
  bc.seed = o.seed;
  const auto rep = beat_universal_experiment(bc);
  out << "field,value\n"
      << "l," << rep.l << '\n'
      << "training_m," << rep.m << '\n'
      << "learned_excess," << format_real(rep.learned_mean) << '\n'
      << "universal_excess," << format_real(rep.universal_mean) << '\n'
      << "gap_se," << format_real(rep.diff_se) << '\n'
      << "learned_win_fraction," << format_real(rep.win_fraction) << '\n'
      << "winner," << rep.winner << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learned lossless source coding: bounds, experiments and compression", "lsc"};
  app.require_subcommand(1);
  Options o;
  const auto probability = CLI::Range(0.0, 1.0);
  const auto classes = CLI::IsMember({"iid", "markov"});

  auto* bounds = app.add_subcommand("bounds", "Print converse and achievable redundancy bounds");
  bounds->add_option("--m", o.m, "Training samples")->required()->check(CLI::PositiveNumber);
  bounds->add_option("--pe", o.pe, "Error probability")->required()->check(CLI::Range(0.0, 0.5));
  bounds->add_option("--class", o.cls, "Source class")->check(classes);

  auto* figures = app.add_subcommand("figures", "Write figure data as CSV");
  figures->add_option("--which", o.which, "Figure 1 (Poisson quantile curves) or 2 (bound gaps)")
      ->required()
      ->check(CLI::IsMember({1, 2}));
  figures->add_option("--pe", o.fig_pe, "Error probability for figure 1")->default_val(1e-6)->check(CLI::Range(0.0, 0.5));
  figures->add_option("--alpha", o.alpha, "Estimator constant (default: lower end of the optimal range)");
  figures->add_option("--points", o.points, "Grid points")->check(CLI::PositiveNumber);
  figures->add_option("--gamma-min", o.gamma_min, "Smallest normalized gamma")->check(CLI::PositiveNumber);
  figures->add_option("--gamma-max", o.gamma_max, "Largest normalized gamma")->check(CLI::PositiveNumber);
  figures->add_option("--pe-min", o.pe_min, "Smallest error probability for figure 2");
  figures->add_option("--pe-max", o.pe_max, "Largest error probability for figure 2");
  figures->add_option("--out", o.out, "Output CSV (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "Run an experiment config and append result rows");
  simulate->add_option("--config", o.config, "key=value experiment file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--seed", o.seed, "Random seed")->required();
  simulate->add_option("--out", o.out, "Results CSV (appended)")->required();

  auto* gen = app.add_subcommand("gen", "Sample a corpus file");
  gen->add_option("--class", o.cls, "Source class")->required()->check(classes);
  gen->add_option("--p", o.p, "P(X = 1) for IID sources")->check(probability);
  gen->add_option("--p0", o.p0, "Stay probability of state 0")->check(probability);
  gen->add_option("--p1", o.p1, "Stay probability of state 1")->check(probability);
  gen->add_option("--n", o.n, "Number of sequences")->check(CLI::PositiveNumber);
  gen->add_option("--l", o.l, "Sequence length")->required()->check(CLI::PositiveNumber);
  gen->add_option("--seed", o.seed, "Random seed")->required();
  gen->add_option("--out", o.out, "Corpus file")->required();

  auto* train = app.add_subcommand("train", "Estimate a frozen model from a corpus");
  train->add_option("--in", o.in, "Corpus file")->required()->check(CLI::ExistingFile);
  train->add_option("--class", o.cls, "Model class")->required()->check(classes);
  train->add_option("--estimator", o.estimator, "mle, add_alpha:<a> or add_beta:<b>");
  train->add_option("--seq-len", o.seq_len, "Markov training sequence length (default: whole corpus)");
  train->add_option("--out", o.out, "Model file")->required();

  auto* compress = app.add_subcommand("compress", "Arithmetic-code a corpus file");
  compress->add_option("--in", o.in, "Corpus file")->required()->check(CLI::ExistingFile);
  compress->add_option("--out", o.out, "Stream file")->required();
  auto* model_opt = compress->add_option("--model", o.model, "Frozen model file")->check(CLI::ExistingFile);
  auto* kt_opt = compress->add_option("--kt", o.kt, "Adaptive KT coder class")->check(classes);
  model_opt->excludes(kt_opt);

  auto* decompress = app.add_subcommand("decompress", "Decode a stream file back into a corpus file");
  decompress->add_option("--in", o.in, "Stream file")->required()->check(CLI::ExistingFile);
  decompress->add_option("--out", o.out, "Corpus file")->required();

  auto* beat = app.add_subcommand("beat", "Compare a trained frozen coder with the universal coder");
  beat->add_option("--l", o.l, "Test sequence length")->required()->check(CLI::PositiveNumber);
  beat->add_option("--class", o.cls, "Source class")->check(classes);
  beat->add_option("--p", o.p, "P(X = 1) for IID sources")->check(probability);
  beat->add_option("--p0", o.p0, "Stay probability of state 0")->check(probability);
  beat->add_option("--p1", o.p1, "Stay probability of state 1")->check(probability);
  beat->add_option("--mode", o.mode, "average or tail")->check(CLI::IsMember({"average", "tail"}));
  beat->add_option("--pe", o.beat_pe, "Tail-mode error probability")->default_val(0.05)->check(CLI::Range(0.0, 0.5));
  beat->add_option("--trials", o.trials, "Macro-replicates")->check(CLI::PositiveNumber);
  beat->add_option("--per-replicate", o.per_replicate, "Paired trainings per replicate")->check(CLI::PositiveNumber);
  beat->add_option("--seed", o.seed, "Random seed")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*bounds) cmd_bounds(o, out);
    if (*figures) cmd_figures(o, out);
    if (*simulate) cmd_simulate(o);
    if (*gen) cmd_gen(o);
    if (*train) cmd_train(o);
    if (*compress) cmd_compress(o);
    if (*decompress) cmd_decompress(o);
    if (*beat) cmd_beat(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace lsc::cli
