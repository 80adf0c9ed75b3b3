#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pontryagin/cli.hpp"
#include "pontryagin/dense_spectra.hpp"
#include "pontryagin/ensembles.hpp"
#include "pontryagin/errors.hpp"
#include "pontryagin/experiments.hpp"
#include "pontryagin/indefinite_core.hpp"
#include "pontryagin/nevanlinna.hpp"

namespace py = pybind11;
using namespace pontryagin;

namespace {

SpectralMeasure measure_arg(const std::string& text) { return measure_from_json(nlohmann::json::parse(text)); }

EnsembleSpec spec_arg(const std::string& text) { return spec_from_json(nlohmann::json::parse(text)); }

BlockHSelfAdjoint block_arg(double a, const Eigen::VectorXcd& b, const Eigen::MatrixXcd& c) {
  BlockHSelfAdjoint m{a, b, c};
  m.validate();
  return m;
}

py::dict case_dict(const CanonicalCase& cc) {
  py::dict d;
  d["label"] = std::string(to_string(cc.label));
  d["beta"] = cc.beta;
  d["multiplicity"] = cc.multiplicity;
  return d;
}

py::dict gznt_dict(const Gznt& g) {
  py::dict d;
  d["point"] = g.point;
  d["kind"] = std::string(to_string(g.kind));
  d["limit_value"] = g.limit_value ? py::cast(*g.limit_value) : py::none();
  return d;
}

py::dict record_dict(const TrialRecord& r) {
  py::dict d;
  d["trial"] = r.trial;
  d["ok"] = r.ok();
  d["error"] = r.error ? py::cast(*r.error) : py::none();
  d["beta"] = r.beta;
  d["label"] = std::string(to_string(r.label));
  d["multiplicity"] = r.multiplicity;
  d["zeta"] = r.zeta;
  d["lambda"] = r.lambda;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "H-selfadjoint random matrices with one eigenvalue of nonpositive type";
  m.attr("__version__") = library_version();

  static py::exception<NumericalError> numerical(m, "NumericalError", PyExc_RuntimeError);
  static py::exception<AmbiguousClassification> ambiguous(m, "AmbiguousClassification", numerical.ptr());
  static py::exception<SearchFailure> search(m, "SearchFailure", numerical.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const AmbiguousClassification& e) {
      py::set_error(ambiguous, e.what());
    } catch (const SearchFailure& e) {
      py::set_error(search, e.what());
    } catch (const NumericalError& e) {
      py::set_error(numerical, e.what());
    }
  });

  m.def("hermitian_eig", [](const Eigen::MatrixXcd& c) {
    const auto r = hermitian_eig(c);
    return py::make_tuple(r.eigenvalues, r.basis);
  });
  m.def("general_eig", [](const Eigen::MatrixXcd& x) {
    const auto r = has_zero_imag(x) ? general_eig(Eigen::MatrixXd(x.real())) : general_eig(x);
    return py::make_tuple(r.eigenvalues, r.eigenvectors);
  });
  m.def("eig_residual", &eig_residual, py::arg("x"), py::arg("lam"), py::arg("v"));

  m.def("assemble", [](double a, const Eigen::VectorXcd& b, const Eigen::MatrixXcd& c) {
    return assemble(block_arg(a, b, c));
  }, py::arg("a"), py::arg("b"), py::arg("c"));
  m.def("is_h_selfadjoint", [](const Eigen::MatrixXcd& x, double tol) {
    if (x.rows() < 1) throw std::invalid_argument("is_h_selfadjoint: empty matrix");
    return is_h_selfadjoint(x, SignatureMatrix{static_cast<std::size_t>(x.rows() - 1)}, tol);
  }, py::arg("x"), py::arg("tol") = 1e-12);
  m.def("nonpositive_type_eigenvalue", [](double a, const Eigen::VectorXcd& b, const Eigen::MatrixXcd& c) {
    return case_dict(nonpositive_type_eigenvalue(block_arg(a, b, c)));
  }, py::arg("a"), py::arg("b"), py::arg("c"));
  m.def("real_spectrum", [](double a, const Eigen::VectorXcd& b, const Eigen::MatrixXcd& c) {
    return real_spectrum(block_arg(a, b, c)).zeta;
  }, py::arg("a"), py::arg("b"), py::arg("c"));
  m.def("scalar_resolvent", [](double a, const Eigen::VectorXcd& b, const Eigen::MatrixXcd& c, Complex z) {
    return scalar_resolvent(block_arg(a, b, c), z);
  }, py::arg("a"), py::arg("b"), py::arg("c"), py::arg("z"));

  m.def("stieltjes", [](const std::string& measure, Complex z) { return stieltjes(measure_arg(measure), z); },
        py::arg("measure"), py::arg("z"));
  m.def("q_eval", [](const std::string& measure, double a, double s2, Complex z) {
    return q_eval(N1Function{a, s2, measure_arg(measure)}, z);
  }, py::arg("measure"), py::arg("a"), py::arg("s2"), py::arg("z"));
  m.def("gznt_newton", [](const std::string& measure, double a, double s2) {
    return gznt_dict(gznt_newton(N1Function{a, s2, measure_arg(measure)}));
  }, py::arg("measure"), py::arg("a") = 0.0, py::arg("s2") = 1.0);
  m.def("gznt_discrete", [](const std::string& measure, double a, double s2) {
    return gznt_dict(gznt_discrete(N1Function{a, s2, measure_arg(measure)}));
  }, py::arg("measure"), py::arg("a") = 0.0, py::arg("s2") = 1.0);
  m.def("negative_squares", [](const std::string& measure, double a, double s2, const std::vector<Complex>& points,
                               double tol) {
    return negative_squares(N1Function{a, s2, measure_arg(measure)}, points, tol);
  }, py::arg("measure"), py::arg("a"), py::arg("s2"), py::arg("points"), py::arg("tol") = 1e-10);
  m.def("spectral_measure_of_pair", [](const Eigen::VectorXcd& b, const Eigen::MatrixXcd& c) {
    return measure_to_json(spectral_measure_of_pair(b, c)).dump();
  }, py::arg("b"), py::arg("c"));

  m.def("sample", [](const std::string& spec, std::uint64_t trial) {
    const BlockHSelfAdjoint blk = sample(spec_arg(spec), trial);
    return py::make_tuple(blk.a, blk.b, blk.c);
  }, py::arg("spec"), py::arg("trial") = 0);
  m.def("run_trials", [](const std::string& spec, std::size_t trials, unsigned threads) {
    RunOptions opts;
    opts.threads = threads;
    std::vector<TrialRecord> records;
    {
      py::gil_scoped_release release;
      records = run_trials(spec_arg(spec), trials, opts);
    }
    py::list out;
    for (const auto& r : records) out.append(record_dict(r));
    return out;
  }, py::arg("spec"), py::arg("trials"), py::arg("threads") = 0);
  m.def("convergence", [](const std::string& spec, const std::vector<std::size_t>& sizes, double eps,
                          std::size_t trials, unsigned threads) {
    RunOptions opts;
    opts.threads = threads;
    return to_json(convergence_in_probability(spec_arg(spec), sizes, eps, trials, opts)).dump();
  }, py::arg("spec"), py::arg("sizes"), py::arg("eps"), py::arg("trials"), py::arg("threads") = 0,
        py::call_guard<py::gil_scoped_release>());
  m.def("esd", [](const std::string& spec, std::uint64_t trial) {
    return to_json(esd_experiment(spec_arg(spec), trial)).dump();
  }, py::arg("spec"), py::arg("trial") = 0, py::call_guard<py::gil_scoped_release>());
  m.def("bq", [](const std::string& spec, Complex z, const std::vector<std::size_t>& sizes, std::size_t trials) {
    return to_json(resolvent_concentration(spec_arg(spec), z, sizes, trials)).dump();
  }, py::arg("spec"), py::arg("z"), py::arg("sizes"), py::arg("trials"), py::call_guard<py::gil_scoped_release>());
  m.def("continuity_probe", [](const std::string& measure, double a, double scale, std::size_t count) {
    const auto mu = measure_arg(measure);
    if (!std::holds_alternative<DiscreteMeasure>(mu)) throw std::invalid_argument("continuity_probe: discrete measure required");
    return to_json(continuity_probe(std::get<DiscreteMeasure>(mu), a, scale, count)).dump();
  }, py::arg("measure"), py::arg("a"), py::arg("scale"), py::arg("count") = 100);

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = 0;
    {
      py::gil_scoped_release release;
      code = cli::run_cli(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"));
}
