#include "lsc/bounds.hpp"
#include "lsc/cli.hpp"
#include "lsc/coders.hpp"
#include "lsc/estimators.hpp"
#include "lsc/experiments.hpp"
#include "lsc/io.hpp"
#include "lsc/models.hpp"
#include "lsc/specfn.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace lsc;

namespace {

ModelClass model_class(const std::string& s) {
  if (s == "iid") return ModelClass::iid;
  if (s == "markov") return ModelClass::markov;
  throw std::invalid_argument("model class must be 'iid' or 'markov'");
}

py::dict bound_dict(const TailBoundResult& r) {
  py::dict d;
  d["a"] = r.a;
  d["pe"] = r.pe;
  d["m"] = r.m;
  d["alpha"] = r.alpha;
  d["b"] = r.b;
  return d;
}

py::bytes to_bytes(const std::vector<std::uint8_t>& v) {
  return py::bytes(reinterpret_cast<const char*>(v.data()), v.size());
}

std::vector<std::uint8_t> from_bytes(const py::bytes& b) {
  const std::string s = b;
  return {s.begin(), s.end()};
}

CoderModel coder_model(const std::string& kind, const std::vector<double>& params) {
  if (kind == "kt_iid") return CoderModel::kt(ModelClass::iid);
  if (kind == "kt_markov") return CoderModel::kt(ModelClass::markov);
  if (kind == "iid" && params.size() == 1) return CoderModel::frozen(FrozenModel::iid(params[0]));
  if (kind == "markov" && params.size() == 2) return CoderModel::frozen(FrozenModel::markov(params[0], params[1]));
  throw std::invalid_argument("model must be kt_iid, kt_markov, iid [p] or markov [p0, p1]");
}

}  // namespace

PYBIND11_MODULE(_lsc, m) {
  m.doc() = "Learned lossless source coding core";

  m.def("binary_kl", &binary_kl, py::arg("p"), py::arg("phat"));
  m.def("binary_entropy", &binary_entropy, py::arg("p"));
  m.def("q_inv", &q_inv, py::arg("u"));
  m.def("poisson_cdf", &poisson_cdf, py::arg("k"), py::arg("gamma"));
  m.def("poisson_div", &poisson_div, py::arg("x"), py::arg("y"));

  m.def("estimate", [](std::uint64_t k, std::uint64_t n, const std::string& spec) {
    return estimate({k, n}, EstimatorSpec::parse(spec));
  }, py::arg("k"), py::arg("m"), py::arg("spec") = "add_alpha:0.50922");
  m.def("alpha_range", [](double pe) {
    const auto r = alpha_range(pe);
    return py::make_tuple(r.lo, r.hi);
  }, py::arg("pe"));

  m.def("iid_converse_a", [](std::uint64_t n, double pe) { return bound_dict(iid_converse_a(n, pe)); });
  m.def("iid_achievable_a", [](std::uint64_t n, double pe) { return bound_dict(iid_achievable_a(n, pe)); });
  m.def("markov_converse_a", [](std::uint64_t n, double pe) { return bound_dict(markov_converse_a(n, pe)); });
  m.def("markov_achievable_a", [](std::uint64_t n, double pe) { return bound_dict(markov_achievable_a(n, pe)); });
  m.def("b_upper", [](double pe) { return b_upper(pe); }, py::arg("pe"));
  m.def("training_threshold", [](std::uint64_t l, const std::string& mode, const std::string& cls, double pe) {
    if (mode != "average" && mode != "tail") throw std::invalid_argument("mode must be 'average' or 'tail'");
    return training_threshold(l, mode == "tail" ? ThresholdMode::tail : ThresholdMode::average, model_class(cls), pe);
  }, py::arg("l"), py::arg("mode") = "average", py::arg("cls") = "iid", py::arg("pe") = 0.0);

  m.def("exact_tail_iid", [](std::uint64_t n, double p, double a, const std::string& spec) {
    return exact_tail_iid(n, p, a, EstimatorSpec::parse(spec)).value;
  }, py::arg("m"), py::arg("p"), py::arg("a"), py::arg("spec"));
  m.def("exact_avg_redundancy_iid", [](std::uint64_t n, double p, const std::string& spec) {
    return exact_avg_redundancy_iid(n, p, EstimatorSpec::parse(spec));
  }, py::arg("m"), py::arg("p"), py::arg("spec"));
  m.def("mc_tail_iid", [](const std::vector<double>& grid, std::uint64_t n, const std::string& spec, double a,
                          std::uint64_t trials, std::uint64_t seed) {
    SweepConfig cfg{grid, n, EstimatorSpec::parse(spec), a, trials, seed};
    std::vector<py::tuple> out;
    for (const auto& e : mc_tail_iid(cfg).points) out.push_back(py::make_tuple(e.value, e.ci_halfwidth));
    return out;
  }, py::arg("p_grid"), py::arg("m"), py::arg("spec"), py::arg("a"), py::arg("trials"), py::arg("seed"));

  m.def("sample_iid", [](double p, std::size_t length, std::uint64_t seed) {
    return to_bytes(sample_iid(BernoulliModel(p), length, seed));
  }, py::arg("p"), py::arg("length"), py::arg("seed"));
  m.def("sample_markov", [](double p0, double p1, std::size_t n, std::size_t l, std::uint64_t seed) {
    return to_bytes(sample_markov(MarkovModel(p0, p1), n, l, seed).bits());
  }, py::arg("p0"), py::arg("p1"), py::arg("n"), py::arg("l"), py::arg("seed"));

  m.def("compress", [](const py::bytes& bits, const std::string& model, const std::vector<double>& params) {
    return to_bytes(arith_encode(coder_model(model, params), from_bytes(bits)).serialize());
  }, py::arg("bits"), py::arg("model") = "kt_iid", py::arg("params") = std::vector<double>{});
  m.def("decompress", [](const py::bytes& container) { return to_bytes(arith_decode(from_bytes(container))); },
        py::arg("container"));
  m.def("ideal_codelength", [](const py::bytes& bits, const std::string& model, const std::vector<double>& params) {
    return ideal_codelength(coder_model(model, params), from_bytes(bits));
  }, py::arg("bits"), py::arg("model") = "kt_iid", py::arg("params") = std::vector<double>{});

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int rc = cli::run(args, out, err);
    return py::make_tuple(rc, out.str(), err.str());
  }, py::arg("args"));

  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
}
