#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "asymmap/commands.hpp"
#include "asymmap/config.hpp"
#include "asymmap/ensembles.hpp"
#include "asymmap/model.hpp"
#include "asymmap/scalar.hpp"

namespace py = pybind11;
using namespace asymmap;

namespace {

PenaltySpec penalty_from(const std::string& kind, double exponent) {
  switch (penalty_from_name(kind)) {
    case PenaltyKind::ZeroNorm: return PenaltySpec::zero_norm();
    case PenaltyKind::L1: return PenaltySpec::l1();
    case PenaltyKind::L2: return PenaltySpec::l2();
    case PenaltyKind::Lp: return PenaltySpec::lp(exponent);
    case PenaltyKind::ZeroNormPlus: break;
  }
  throw InvalidArgument("zero_norm_plus needs a smooth term; use a config document");
}

// Commands take and return JSON text; the Python side converts with json.
std::string run(CommandResult (*fn)(const RunConfig&, std::size_t), const std::string& config,
                std::size_t threads) {
  RunConfig cfg = parse_config_text(config);
  CommandResult r;
  {
    py::gil_scoped_release release;
    r = fn(cfg, threads);
  }
  check_finite(r.canonical);
  nlohmann::json out{{"result", r.canonical}, {"exit_code", r.exit_code}, {"csv", r.csv}};
  return out.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Replica-symmetric MAP distortion predictions (C++ core).";

  py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NoConvergenceError>(m, "NoConvergenceError", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  py::class_<MatrixEnsemble>(m, "MatrixEnsemble")
      .def_static("marcenko_pastur", &MatrixEnsemble::marcenko_pastur, py::arg("alpha"))
      .def_static("identity", &MatrixEnsemble::identity, py::arg("alpha") = 1.0)
      .def_static("empirical", &MatrixEnsemble::empirical, py::arg("eigenvalues"), py::arg("alpha"))
      .def_property_readonly("alpha", &MatrixEnsemble::alpha)
      .def_property_readonly("mean_eigenvalue", &MatrixEnsemble::mean_eigenvalue)
      .def("r_transform", [](const MatrixEnsemble& e, double w) { return r_transform(e, w); })
      .def("r_transform_deriv", [](const MatrixEnsemble& e, double w) { return r_transform_deriv(e, w); });

  m.def(
      "effective_params",
      [](const MatrixEnsemble& e, double chi, double p, double lambda, double lambda0) {
        const auto r = effective_params(e, chi, p, lambda, lambda0);
        return py::make_tuple(r.theta, r.theta0);
      },
      py::arg("ensemble"), py::arg("chi"), py::arg("p"), py::arg("lam"), py::arg("lam0"),
      "(theta, theta0) of the decoupled channel");

  m.def(
      "scalar_map",
      [](const std::string& kind, double theta, double c, double y, double exponent) {
        return scalar_map(penalty_from(kind, exponent), theta, c, y);
      },
      py::arg("penalty"), py::arg("theta"), py::arg("c"), py::arg("y"), py::arg("exponent") = 1.0);

  m.def(
      "block_sizes",
      [](const std::vector<double>& fractions, std::size_t n) {
        SignalModel sm;
        for (double f : fractions) sm.blocks.push_back(BlockSpec{f, 0.0});
        return finite_profile(sm, n).sizes;
      },
      py::arg("fractions"), py::arg("n"));

  m.def("normalize_config", [](const std::string& text) { return to_json(parse_config_text(text)).dump(); });

  m.def("_predict", [](const std::string& c, std::size_t t) { return run(&cmd_predict, c, t); },
        py::arg("config"), py::arg("threads") = 1);
  m.def("_tune", [](const std::string& c, std::size_t t) { return run(&cmd_tune, c, t); },
        py::arg("config"), py::arg("threads") = 1);
  m.def("_rt", [](const std::string& c, std::size_t t) { return run(&cmd_rt, c, t); },
        py::arg("config"), py::arg("threads") = 1);
  m.def("_sweep", [](const std::string& c, std::size_t t) { return run(&cmd_sweep, c, t); },
        py::arg("config"), py::arg("threads") = 1);
  m.def("_validate", [](const std::string& c, std::size_t t) { return run(&cmd_validate, c, t); },
        py::arg("config"), py::arg("threads") = 1);
}
