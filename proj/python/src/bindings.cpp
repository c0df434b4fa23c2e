#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "aoisched/baselines.hpp"
#include "aoisched/config_io.hpp"
#include "aoisched/mc.hpp"
#include "aoisched/mgf.hpp"
#include "aoisched/nots.hpp"
#include "aoisched/sams.hpp"
#include "aoisched/sim.hpp"

namespace py = pybind11;
using namespace aoi;

namespace {

// Python sees patterns as 1-based source numbers, like the text form.
Pattern to_pattern(const std::vector<std::size_t>& one_based) {
  Pattern p;
  for (auto v : one_based) {
    if (v == 0) throw InfeasibleError("pattern entries are 1-based");
    p.slots.push_back(v - 1);
  }
  return p;
}

std::vector<std::size_t> from_pattern(const Pattern& p) {
  std::vector<std::size_t> out;
  for (auto v : p.slots) out.push_back(v + 1);
  return out;
}

SystemConfig make_config(const std::vector<SourceParams>& sources) {
  return validate_config(sources);
}

}  // namespace

PYBIND11_MODULE(_aoisched, m) {
  m.doc() = "Cyclic schedulers and evaluators for weighted age of information";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::enum_<ServiceDist>(m, "ServiceDist")
      .value("deterministic", ServiceDist::deterministic)
      .value("exponential", ServiceDist::exponential)
      .value("gamma", ServiceDist::gamma);

  py::class_<SourceParams>(m, "SourceParams")
      .def(py::init([](double mean_service, double scov, double drop_prob, double weight,
                       const std::string& dist) {
             return SourceParams{mean_service, scov, drop_prob, weight, parse_dist(dist)};
           }),
           py::arg("mean_service") = 1.0, py::arg("scov") = 0.0, py::arg("drop_prob") = 0.0,
           py::arg("weight") = 1.0, py::arg("dist") = "deterministic")
      .def_readwrite("mean_service", &SourceParams::mean_service)
      .def_readwrite("scov", &SourceParams::scov)
      .def_readwrite("drop_prob", &SourceParams::drop_prob)
      .def_readwrite("weight", &SourceParams::weight)
      .def_readwrite("dist", &SourceParams::dist)
      .def("__repr__", [](const SourceParams& s) {
        return "SourceParams(mean_service=" + std::to_string(s.mean_service) +
               ", scov=" + std::to_string(s.scov) + ", drop_prob=" + std::to_string(s.drop_prob) +
               ", weight=" + std::to_string(s.weight) + ", dist='" + std::string(to_string(s.dist)) +
               "')";
      });

  py::class_<SystemConfig>(m, "SystemConfig")
      .def(py::init(&make_config), py::arg("sources"))
      .def_static("from_json", &parse_config_json, py::arg("text"))
      .def_static("scenario", &scenario_config, py::arg("scenario"), py::arg("num_sources"))
      .def("to_json", &dump_config_json)
      .def("__len__", &SystemConfig::size)
      .def("__getitem__",
           [](const SystemConfig& c, std::size_t n) {
             if (n >= c.size()) throw py::index_error();
             return c[n];
           })
      .def("__eq__", &SystemConfig::operator==);

  py::class_<AoiReport>(m, "AoiReport")
      .def_readonly("per_source_aoi", &AoiReport::per_source_aoi)
      .def_readonly("gap_mean", &AoiReport::gap_mean)
      .def_readonly("gap_second", &AoiReport::gap_second)
      .def_readonly("gap_scov", &AoiReport::gap_scov)
      .def_readonly("weighted_aoi", &AoiReport::weighted_aoi)
      .def_property_readonly("method", [](const AoiReport& r) { return std::string(to_string(r.method)); });

  m.def(
      "evaluate",
      [](const SystemConfig& config, const std::vector<std::size_t>& pattern, const std::string& method) {
        const Pattern p = to_pattern(pattern);
        switch (parse_method(method)) {
          case EvalMethod::mc: return mc_report(config, p);
          case EvalMethod::mgf: return mgf_report(config, p);
          case EvalMethod::closed2: return closed2_report(config, pattern_to_placement(p));
          default: throw ConfigError("evaluate supports mc, mgf and closed2");
        }
      },
      py::arg("config"), py::arg("pattern"), py::arg("method") = "mgf");

  m.def("rr_aoi", &rr_aoi, py::arg("config"));
  m.def(
      "two_source_aoi",
      [](const SystemConfig& config, const std::vector<std::uint64_t>& r) {
        return two_source_aoi(config, PlacementVector{r});
      },
      py::arg("config"), py::arg("placement"));
  m.def(
      "arrange_placement",
      [](std::uint64_t a1, std::uint64_t a2) { return arrange_placement(a1, a2).r; },
      py::arg("alpha1"), py::arg("alpha2"));
  m.def(
      "placement_to_pattern",
      [](const std::vector<std::uint64_t>& r) { return from_pattern(placement_to_pattern({r})); },
      py::arg("placement"));

  m.def(
      "nots_build",
      [](const SystemConfig& config, std::uint64_t resolution) {
        const auto res = nots_build(config, resolution);
        py::dict d;
        d["pattern"] = from_pattern(res.pattern());
        d["placement"] = res.placement.r;
        d["alpha"] = res.alpha_pair;
        d["weighted_aoi"] = res.weighted_aoi;
        d["per_source_aoi"] = res.per_source;
        d["a_bounds"] = res.a_bounds;
        return d;
      },
      py::arg("config"), py::arg("resolution") = kDefaultNotsResolution);

  py::class_<FrequencySolution>(m, "FrequencySolution")
      .def_readonly("tau", &FrequencySolution::tau)
      .def_readonly("x_star", &FrequencySolution::x_star)
      .def_readonly("freq", &FrequencySolution::freq);
  m.def(
      "solve_utilizations",
      [](const std::vector<double>& a, const std::vector<double>& b) { return solve_utilizations(a, b); },
      py::arg("a"), py::arg("b"));
  m.def(
      "quantize_frequencies",
      [](const std::vector<double>& f, double eps) { return quantize_frequencies(f, eps).counts; },
      py::arg("freq"), py::arg("epsilon") = 0.0);
  m.def(
      "drr_spread",
      [](const std::vector<std::size_t>& counts) { return from_pattern(drr_spread(counts)); },
      py::arg("counts"));
  m.def(
      "grouped_spread",
      [](const std::vector<std::size_t>& counts) { return from_pattern(grouped_spread(counts)); },
      py::arg("counts"));
  m.def(
      "sams_build",
      [](const SystemConfig& config, int variant, bool grouped) {
        const auto res = sams_build(config, SamsConfig::variant(variant, grouped));
        py::dict d;
        d["pattern"] = from_pattern(res.pattern);
        d["weighted_aoi"] = res.report.weighted_aoi;
        d["per_source_aoi"] = res.report.per_source_aoi;
        d["iteration"] = res.iteration;
        d["epsilon"] = res.epsilon;
        return d;
      },
      py::arg("config"), py::arg("variant") = 3, py::arg("grouped") = false);

  m.def(
      "is_build",
      [](const SystemConfig& config, std::size_t max_size) {
        const auto res = is_build(config, max_size);
        py::dict d;
        d["pattern"] = from_pattern(res.pattern);
        d["weighted_aoi"] = res.report.weighted_aoi;
        d["aoi_trace"] = res.aoi_trace;
        return d;
      },
      py::arg("config"), py::arg("max_size") = kDefaultIsMaxSize);
  m.def(
      "pgaw_aoi",
      [](const SystemConfig& config, const std::vector<double>& eta) { return pgaw_aoi(config, {eta}); },
      py::arg("config"), py::arg("eta"));
  m.def(
      "pgaw_optimize",
      [](const SystemConfig& config, double step) {
        const auto res = pgaw_optimize(config, step);
        return py::make_tuple(res.policy.eta, res.report);
      },
      py::arg("config"), py::arg("step") = kDefaultGridStep);

  py::class_<SimReport>(m, "SimReport")
      .def_readonly("per_source_aoi", &SimReport::per_source_aoi)
      .def_readonly("stderr", &SimReport::stderr_aoi)
      .def_readonly("gap_mean", &SimReport::gap_mean)
      .def_readonly("gap_second", &SimReport::gap_second)
      .def_readonly("busy_fraction", &SimReport::busy_fraction)
      .def_readonly("weighted_aoi", &SimReport::weighted_aoi)
      .def_readonly("slots_simulated", &SimReport::slots_simulated);
  m.def(
      "simulate",
      [](const SystemConfig& config, const std::vector<std::size_t>& pattern, std::uint64_t horizon,
         std::uint64_t seed) {
        SimSpec spec;
        spec.schedule = to_pattern(pattern);
        spec.horizon = horizon;
        spec.seed = seed;
        py::gil_scoped_release release;
        return simulate(config, spec);
      },
      py::arg("config"), py::arg("pattern"), py::arg("horizon") = 100000, py::arg("seed") = 1);
}
