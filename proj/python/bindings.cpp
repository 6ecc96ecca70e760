#include "bosekms/bounds.hpp"
#include "bosekms/config.hpp"
#include "bosekms/cumulants.hpp"
#include "bosekms/dyson.hpp"
#include "bosekms/entropy.hpp"
#include "bosekms/hs.hpp"
#include "bosekms/propagator.hpp"
#include "bosekms/version.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace bosekms;

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

PYBIND11_MODULE(_core, m) {
  m.doc() = "Thermal propagators, HS averaging and convergence bounds on periodic lattices";

  py::register_exception<InvariantError>(m, "InvariantError", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<LimitError>(m, "LimitError", PyExc_OverflowError);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init<>())
      .def_readwrite("mass", &ModelParams::mass)
      .def_readwrite("beta", &ModelParams::beta)
      .def_readwrite("mu", &ModelParams::mu)
      .def_readwrite("epsilon", &ModelParams::epsilon)
      .def_readwrite("phi0", &ModelParams::phi0)
      .def_readwrite("coupling", &ModelParams::coupling)
      .def_readwrite("mu_tilde", &ModelParams::mu_tilde)
      .def_readwrite("condensate", &ModelParams::condensate)
      .def("mu_eff", &ModelParams::mu_eff)
      .def("validate", &ModelParams::validate);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<int, int, double, int, double>(), py::arg("dim"), py::arg("n_sites"), py::arg("box_length"),
           py::arg("n_time"), py::arg("beta"))
      .def_property_readonly("dim", &GridSpec::dim)
      .def_property_readonly("n_sites", &GridSpec::n_sites)
      .def_property_readonly("n_time", &GridSpec::n_time)
      .def_property_readonly("beta", &GridSpec::beta)
      .def_property_readonly("spacing", &GridSpec::spacing)
      .def_property_readonly("dt", &GridSpec::dt)
      .def_property_readonly("n_spatial", &GridSpec::n_spatial);

  py::class_<Potential>(m, "Potential")
      .def_static("gaussian", &Potential::gaussian, py::arg("height"), py::arg("width"))
      .def_static("bump", &Potential::bump, py::arg("height"), py::arg("radius"))
      .def("on_grid", &Potential::on_grid);

  py::class_<Cutoff>(m, "Cutoff")
      .def_static("uniform", &Cutoff::uniform)
      .def_static("single_site", &Cutoff::single_site)
      .def_static("plateau",
                  [](const GridSpec& g, std::vector<double> c, double plateau, double ramp) {
                    Coord x{0, 0, 0};
                    for (std::size_t k = 0; k < c.size() && k < 3; ++k) x[k] = c[k];
                    return Cutoff::plateau(g, x, plateau, ramp);
                  })
      .def_readonly("g", &Cutoff::g)
      .def_readonly("chi", &Cutoff::chi);

  py::class_<LatticeField>(m, "LatticeField")
      .def(py::init([](Eigen::MatrixXd v) { return LatticeField(std::move(v)); }), py::arg("values"))
      .def_readwrite("values", &LatticeField::values)
      .def("sup_norm", &LatticeField::sup_norm);

  py::class_<Norms>(m, "Norms")
      .def_readonly("v0", &Norms::v0)
      .def_readonly("v_l1", &Norms::v_l1)
      .def_readonly("g_l1", &Norms::g_l1)
      .def_readonly("vtilde_gg", &Norms::vtilde_gg);
  m.def("norms", &norms);

  py::class_<Config>(m, "Config")
      .def_readonly("model", &Config::model)
      .def_readonly("grid", &Config::grid)
      .def_readonly("potential", &Config::potential)
      .def_readonly("cutoff", &Config::cutoff);
  m.def("load_config", &load_config);
  m.def("parse_config", &parse_config);

  m.def("polylog", &polylog, py::arg("s"), py::arg("y"));
  m.def("bose_factors", [](double k, double beta) {
    const auto b = bose_factors(k, beta);
    return py::make_tuple(b.minus, b.plus);
  });

  py::class_<PropagatorKernel>(m, "PropagatorKernel")
      .def("value", &PropagatorKernel::value, py::arg("q"), py::arg("u"))
      .def("multiplier", &PropagatorKernel::multiplier)
      .def("dispersion", &PropagatorKernel::dispersion)
      .def("spatial_operator", &PropagatorKernel::spatial_operator, py::arg("u"), py::arg("before_jump") = false);
  m.def("build_kernel", &build_kernel);

  m.def("bell_number", &bell_number);
  m.def("connected_graph_count", &connected_graph_count);
  m.def("cumulants_from_moments", &cumulants_from_moments);
  m.def("moments_from_cumulants", &moments_from_cumulants);
  m.def("count_wick_pairings", [](const std::string& kind, int n) {
    if (kind != "real" && kind != "charged") throw DomainError("kind must be 'real' or 'charged'");
    return count_wick_pairings(kind == "real" ? FieldType::real : FieldType::charged, n);
  });

  py::enum_<VertexRule>(m, "VertexRule")
      .value("slice_exact", VertexRule::slice_exact)
      .value("trapezoid", VertexRule::trapezoid);
  py::class_<InteractingKernel>(m, "InteractingKernel")
      .def_readonly("op", &InteractingKernel::op)
      .def_readonly("order", &InteractingKernel::order)
      .def_readonly("ratio_bound", &InteractingKernel::ratio_bound)
      .def_readonly("tail_bound", &InteractingKernel::tail_bound)
      .def_readonly("hypothesis_warning", &InteractingKernel::hypothesis_warning)
      .def_property_readonly("provenance", [](const InteractingKernel& k) { return to_string(k.provenance); })
      .def("value", &InteractingKernel::value);
  m.def("free_slice_operator", &free_slice_operator);
  m.def("dyson_kernel", &dyson_kernel, py::arg("free"), py::arg("field"), py::arg("order"),
        py::arg("rule") = VertexRule::slice_exact);
  m.def("sliced_kernel", &sliced_kernel);
  m.def("resolvent_kernel", &resolvent_kernel, py::arg("free"), py::arg("field"),
        py::arg("rule") = VertexRule::slice_exact);
  m.def("truncated_two_point", &truncated_two_point);

  m.def(
      "w_a",
      [](const PropagatorKernel& free, const LatticeField& gA, double phi0, const Cutoff& cut) {
        const auto b = w_a(free, gA, phi0, cut);
        py::dict d;
        d["t0"] = b.t0;
        d["t1"] = b.t1;
        d["t2"] = b.t2;
        d["w_a"] = b.w_a;
        d["s0_series"] = b.s0_series;
        d["s0_lambda"] = b.s0_lambda;
        d["t1_by_parts"] = b.t1_forms.by_parts;
        return d;
      },
      py::arg("free"), py::arg("gA"), py::arg("phi0"), py::arg("cutoff"));

  m.def(
      "partition_mc",
      [](const PropagatorKernel& free, const Potential& v, const Cutoff& cut, double coupling, double phi0, long samples,
         std::uint64_t seed, int workers) {
        const auto z = partition_mc(free, v, cut, coupling, phi0, samples, seed, PartitionOptions{workers, 0.10});
        py::dict d;
        d["z"] = z.z.mean;
        d["std_error"] = z.z.std_error;
        d["rejection_fraction"] = z.rejection_fraction;
        d["c1_physical"] = z.c1_physical;
        d["c2_physical"] = z.c2_physical;
        return d;
      },
      py::arg("free"), py::arg("v"), py::arg("cutoff"), py::arg("coupling"), py::arg("phi0"), py::arg("samples"),
      py::arg("seed"), py::arg("workers") = 1);

  m.def("e_bound", [](double beta, double v0, double g_l1, double xi, double c_tilde) {
    const auto e = e_bound(beta, v0, g_l1, xi, c_tilde);
    return py::make_tuple(e.value, e.convergent);
  });
  m.def("c_tilde", [](const ModelParams& p, int dim) { return estimate_ctilde(p, dim).c_tilde; });
  m.def(
      "region",
      [](double beta, double phi0, double v0, double g_l1, double vtilde_gg, double epsilon, double c_tilde) {
        RegionInputs in{beta, phi0, v0, g_l1, vtilde_gg, epsilon, c_tilde, g_l1, GNorm::l1};
        const auto r = region(in);
        py::dict d;
        d["R"] = r.R;
        d["margin"] = r.margin;
        d["convergent"] = r.convergent;
        d["gamma"] = r.gamma;
        d["intro_margin"] = r.intro_margin;
        d["intro_convergent"] = r.intro_convergent;
        return d;
      },
      py::arg("beta"), py::arg("phi0"), py::arg("v0"), py::arg("g_l1"), py::arg("vtilde_gg"), py::arg("epsilon"),
      py::arg("c_tilde"));

#ifdef VERSION_INFO
  m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
  m.attr("__version__") = kVersion;
#endif
}
