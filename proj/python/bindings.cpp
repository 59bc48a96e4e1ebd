#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "crosskerr/config.hpp"
#include "crosskerr/dynamics.hpp"
#include "crosskerr/effective.hpp"
#include "crosskerr/floquet.hpp"
#include "crosskerr/hilbert.hpp"
#include "crosskerr/models.hpp"
#include "crosskerr/protocols.hpp"
#include "crosskerr/tomography.hpp"

namespace py = pybind11;
using namespace crosskerr;

namespace {

ModeSystem system_from_pairs(
    const std::vector<std::pair<std::string, int>>& modes) {
  std::vector<ModeSystem::Mode> ms;
  for (const auto& [label, dim] : modes) ms.push_back({label, dim});
  return ModeSystem(ms);
}

py::dict dressed_to_dict(const DressedParams& d) {
  py::dict out;
  out["omega_a_MHz"] = d.omega_a_MHz;
  out["omega_b_MHz"] = d.omega_b_MHz;
  out["omega_c_MHz"] = d.omega_c_MHz;
  out["chi_a_MHz"] = d.chi_a_MHz;
  out["chi_b_MHz"] = d.chi_b_MHz;
  out["kerr_a_MHz"] = d.kerr_a_MHz;
  out["kerr_b_MHz"] = d.kerr_b_MHz;
  out["kerr_ab_MHz"] = d.kerr_ab_MHz;
  out["anharmonicity_MHz"] = d.anharmonicity_MHz;
  out["exchange_resonance_MHz"] = d.exchange_resonance_MHz();
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Driven cross-Kerr gate simulation core";

  py::class_<ModeSystem>(m, "ModeSystem")
      .def(py::init(&system_from_pairs), py::arg("modes"))
      .def_property_readonly("total_dim", &ModeSystem::total_dim)
      .def("basis_index", &ModeSystem::basis_index)
      .def("dim_of", &ModeSystem::dim_of);

  py::class_<Operator>(m, "Operator")
      .def_property_readonly(
          "matrix", [](const Operator& op) { return op.matrix(); })
      .def("is_hermitian", &Operator::is_hermitian, py::arg("tol") = 1e-10);

  py::class_<DensityMatrix>(m, "DensityMatrix")
      .def(py::init<ModeSystem, Matrix>(), py::arg("system"),
           py::arg("matrix"))
      .def_property_readonly(
          "matrix", [](const DensityMatrix& rho) { return rho.matrix(); })
      .def_property_readonly("trace", &DensityMatrix::trace)
      .def_property_readonly("purity", &DensityMatrix::purity)
      .def("is_physical", &DensityMatrix::is_physical,
           py::arg("herm_tol") = 1e-10, py::arg("trace_tol") = 1e-9,
           py::arg("eig_tol") = 1e-10)
      .def("expectation", [](const DensityMatrix& rho, const Operator& op) {
        return rho.expectation(op);
      });

  m.def("basis_state", &basis_state);
  m.def("from_state",
        [](const ModeSystem& sys, const Vector& psi) {
          return DensityMatrix::from_state(sys, psi);
        });
  m.def("annihilation", &annihilation);
  m.def("creation", &creation);
  m.def("number", &number);
  m.def("fock_projector", &fock_projector);
  m.def("displacement", &displacement);
  m.def("parity_operator", &parity_operator);
  m.def("partial_trace", &partial_trace);
  m.def("uhlmann_fidelity", &uhlmann_fidelity);
  m.def("fidelity_to_pure", &fidelity_to_pure);
  m.def(
      "wigner",
      [](const DensityMatrix& rho, const std::string& label,
         const std::vector<double>& re, const std::vector<double>& im) {
        const PhaseSpaceGrid grid = wigner(rho, label, re, im);
        return grid.values;
      },
      py::arg("rho"), py::arg("label"), py::arg("re_axis"),
      py::arg("im_axis"));
  m.def("pauli_bars",
        [](const DensityMatrix& rho, std::pair<int, int> cw_a,
           std::pair<int, int> cw_b) {
          const PauliBars bars = pauli_bars(rho, cw_a, cw_b);
          py::dict out;
          for (std::size_t i = 0; i < 16; ++i) {
            out[PauliBars::labels()[i]] = bars.values[i];
          }
          out["leakage"] = bars.leakage;
          return out;
        });

  py::class_<CoherencePair>(m, "CoherencePair")
      .def_readwrite("t1_us", &CoherencePair::t1_us)
      .def_readwrite("tphi_us", &CoherencePair::tphi_us);

  py::class_<DeviceParams>(m, "DeviceParams")
      .def(py::init<>())
      .def_readwrite("omega_a_MHz", &DeviceParams::omega_a_MHz)
      .def_readwrite("omega_b_MHz", &DeviceParams::omega_b_MHz)
      .def_readwrite("omega_c_MHz", &DeviceParams::omega_c_MHz)
      .def_readwrite("kerr_a_MHz", &DeviceParams::kerr_a_MHz)
      .def_readwrite("kerr_b_MHz", &DeviceParams::kerr_b_MHz)
      .def_readwrite("kerr_ab_MHz", &DeviceParams::kerr_ab_MHz)
      .def_readwrite("anharmonicity_MHz", &DeviceParams::anharmonicity_MHz)
      .def_readwrite("chi_a_MHz", &DeviceParams::chi_a_MHz)
      .def_readwrite("chi_b_MHz", &DeviceParams::chi_b_MHz)
      .def_readwrite("ej1_GHz", &DeviceParams::ej1_GHz)
      .def_readwrite("ej2_GHz", &DeviceParams::ej2_GHz)
      .def_readwrite("ec_GHz", &DeviceParams::ec_GHz)
      .def_readwrite("flux", &DeviceParams::flux)
      .def_readwrite("g_ac_MHz", &DeviceParams::g_ac_MHz)
      .def_readwrite("g_bc_MHz", &DeviceParams::g_bc_MHz);

  m.def("fig2_bias", &fig2_bias);
  m.def("fig3_bias", &fig3_bias);
  py::enum_<SquidConvention>(m, "SquidConvention")
      .value("SQUARED_RATIO", SquidConvention::kSquaredRatio)
      .value("LITERAL_RATIO", SquidConvention::kLiteralRatio);
  m.def("squid_ej", &squid_ej, py::arg("flux"), py::arg("ej1_GHz"),
        py::arg("ej2_GHz"),
        py::arg("convention") = SquidConvention::kSquaredRatio);
  m.def("plasma_frequency_MHz", &plasma_frequency_MHz);
  m.def("drive_frequency", &drive_frequency, py::arg("params"),
        py::arg("delta_MHz"), py::arg("control_photons") = 1);
  m.def("snail_effective_crosskerr", &snail_effective_crosskerr);
  m.def("three_mode_system", &three_mode_system);
  m.def("two_mode_system", &two_mode_system);
  m.def("build_dispersive_hamiltonian",
        [](const DeviceParams& p, const ModeSystem& sys) {
          return build_dispersive_hamiltonian(p, sys);
        });
  m.def("build_effective_crosskerr", &build_effective_crosskerr);

  py::class_<SwtInputs>(m, "SwtInputs")
      .def(py::init([](double g1, double delta, double chi_b, double kerr_a,
                       double kerr_b, double kerr_ab, double chi_a) {
             return SwtInputs{g1, delta, chi_b, kerr_a, kerr_b, kerr_ab,
                              chi_a};
           }),
           py::arg("g1_MHz"), py::arg("delta_MHz"), py::arg("chi_b_MHz") = 0.0,
           py::arg("kerr_a_MHz") = 0.0, py::arg("kerr_b_MHz") = 0.0,
           py::arg("kerr_ab_MHz") = 0.0, py::arg("chi_a_MHz") = 0.0);
  m.def("beta_coefficient", &beta_coefficient);
  m.def("energy_shift", &energy_shift);
  m.def("engineered_crosskerr", &engineered_crosskerr);
  m.def("max_coupler_excitation", &max_coupler_excitation);
  m.def("gate_time", &gate_time, py::arg("g_ab_MHz"), py::arg("n_a"),
        py::arg("n_b"), py::arg("target_phase_rad"));
  m.def("gate_time_for_code", &gate_time_for_code);
  m.def("dressed_lifetime_estimate", &dressed_lifetime_estimate);

  m.def(
      "evolve_lindblad",
      [](const Operator& h,
         const std::vector<std::pair<Operator, double>>& collapse,
         const DensityMatrix& rho0, const std::vector<double>& times,
         const std::map<std::string, Operator>& observables) {
        LindbladModel model = LindbladModel::closed(h);
        model.collapse_ops = collapse;
        std::vector<std::pair<std::string, Operator>> obs(observables.begin(),
                                                          observables.end());
        const Trajectory traj = evolve_lindblad(model, rho0, times, obs);
        py::dict out;
        out["times_us"] = traj.times_us;
        for (const auto& [name, series] : traj.expectations) {
          out[name.c_str()] = series;
        }
        return out;
      },
      py::arg("hamiltonian"), py::arg("collapse"), py::arg("rho0"),
      py::arg("times_us"), py::arg("observables"));
  m.def("collapse_set", &collapse_set, py::arg("params"), py::arg("system"),
        py::arg("driven"));
  m.def("fit_damped_cosine",
        [](const std::vector<double>& t, const std::vector<double>& v) {
          const DampedCosineFit fit = fit_damped_cosine(t, v);
          py::dict out;
          out["amplitude"] = fit.amplitude;
          out["offset"] = fit.offset;
          out["kappa1_per_us"] = fit.kappa1_per_us;
          out["kappa_phi_per_us"] = fit.kappa_phi_per_us;
          out["g1_MHz"] = fit.g1_MHz;
          out["phi0_rad"] = fit.phi0_rad;
          out["residual_rms"] = fit.residual_rms;
          return out;
        });

  py::class_<FloquetEngine>(m, "FloquetEngine")
      .def(py::init<const DeviceParams&, const ModeSystem&>())
      .def("dressed_params",
           [](const FloquetEngine& eng) {
             return dressed_to_dict(eng.dressed_params());
           })
      .def(
          "crosskerr_sweep",
          [](const FloquetEngine& eng, double eps,
             const std::vector<double>& deltas) {
            py::list out;
            for (const CrossKerrPoint& pt :
                 crosskerr_sweep(eng, eps, deltas)) {
              py::dict d;
              d["delta_MHz"] = pt.delta_MHz;
              d["g_ab_MHz"] = pt.g_ab_MHz;
              d["confidence"] = pt.confidence;
              d["flagged"] = pt.flagged;
              out.append(d);
            }
            return out;
          },
          py::arg("eps_MHz"), py::arg("deltas_MHz"))
      .def("calibrate_exchange", [](const FloquetEngine& eng, double eps) {
        const DrivenCalibration cal = calibrate_exchange(eng, eps);
        py::dict out;
        out["resonance_MHz"] = cal.resonance_MHz;
        out["g1_MHz"] = cal.g1_MHz;
        out["stark_shift_MHz"] = cal.stark_shift_MHz;
        out["xi_op"] = cal.xi_op;
        return out;
      });

  py::class_<DisplacementPlan>(m, "DisplacementPlan")
      .def_readonly("dim_a", &DisplacementPlan::dim_a)
      .def_readonly("dim_b", &DisplacementPlan::dim_b)
      .def_readonly("alphas_a", &DisplacementPlan::alphas_a)
      .def_readonly("alphas_b", &DisplacementPlan::alphas_b)
      .def_property_readonly("size", &DisplacementPlan::size);
  m.def("optimize_displacements", &optimize_displacements,
        py::arg("dim_per_mode"), py::arg("count"), py::arg("seed"));
  m.def("exact_probabilities", &exact_probabilities);
  m.def("simulate_measurement", &simulate_measurement, py::arg("rho"),
        py::arg("plan"), py::arg("shots"), py::arg("confusions"),
        py::arg("seed"));
  m.def("measurement_probability", &measurement_probability);
  m.def("linear_inversion", &linear_inversion);
  m.def("alice_confusion", &alice_confusion);
  m.def("bob_confusion", &bob_confusion);
  m.def(
      "bayesian_refine",
      [](const DensityMatrix& rho_ls, double n, int retained, int thinning,
         std::uint64_t seed) {
        const PosteriorSummary post =
            bayesian_refine(rho_ls, n, retained, thinning, seed);
        py::dict out;
        out["rho_bme"] = post.rho_bme;
        out["acceptance_rate"] = post.acceptance_rate;
        out["retained"] = post.retained;
        out["thinning"] = post.thinning;
        return out;
      },
      py::arg("rho_ls"), py::arg("total_events"),
      py::arg("retained") = 1 << 10, py::arg("thinning") = 1 << 7,
      py::arg("seed") = 0);

  m.def(
      "chevron_scan",
      [](const DeviceParams& p, double g1, const std::vector<double>& deltas,
         const std::vector<double>& times, bool decoherence) {
        const ChevronResult res =
            chevron_scan(p, g1, deltas, times, decoherence);
        py::dict out;
        out["deltas_MHz"] = res.deltas_MHz;
        out["times_us"] = res.times_us;
        out["p_alice_vacuum"] = res.p_alice_vacuum;
        out["p_bob_vacuum"] = res.p_bob_vacuum;
        out["p_coupler_excited"] = res.p_coupler_excited;
        return out;
      },
      py::arg("params"), py::arg("g1_MHz"), py::arg("deltas_MHz"),
      py::arg("times_us"), py::arg("decoherence") = true);
  m.def("cphase_gate", &cphase_gate, py::arg("rho0"), py::arg("g_ab_MHz"),
        py::arg("target_phase_rad"), py::arg("n_a"), py::arg("n_b"),
        py::arg("collapse") = std::vector<std::pair<Operator, double>>{});
  m.def(
      "repeated_gate_fidelity",
      [](const Vector& psi0, const ModeSystem& sys, int gates, double g_ab,
         double phase, const std::vector<std::pair<Operator, double>>& ops) {
        const GateDecayResult res =
            repeated_gate_fidelity(psi0, sys, gates, g_ab, phase, 1, 1, ops);
        py::dict out;
        out["fidelities"] = res.fidelities;
        out["per_gate_infidelity"] = res.per_gate_infidelity;
        return out;
      },
      py::arg("psi0"), py::arg("system"), py::arg("gates"),
      py::arg("g_ab_MHz"), py::arg("target_phase_rad"), py::arg("collapse"));
  m.def("p_odd_analytic", &p_odd_analytic);
  m.def(
      "parity_check",
      [](const DeviceParams& p, const std::vector<double>& delays,
         double t1_us, bool ideal_snap, bool ideal_readout) {
        ParityCheckOptions opt;
        opt.t1_us = t1_us;
        opt.ideal_snap = ideal_snap;
        opt.ideal_readout = ideal_readout;
        const ParityCheckResult res = parity_check_protocol(p, delays, opt);
        py::dict out;
        out["delays_us"] = res.delays_us;
        out["p_odd"] = res.p_odd;
        out["p2_unconditioned"] = res.p2_unconditioned;
        out["p2_post_selected"] = res.p2_post_selected;
        out["t1_unconditioned_us"] = res.t1_unconditioned_us;
        out["t1_post_selected_us"] = res.t1_post_selected_us;
        return out;
      },
      py::arg("params"), py::arg("delays_us"), py::arg("t1_us") = 750.0,
      py::arg("ideal_snap") = true, py::arg("ideal_readout") = true);
  m.def("superposition_ket", &superposition_ket);
  m.def("basis_ket", &basis_ket);

  py::class_<SnapSpec>(m, "SnapSpec")
      .def(py::init([](Complex a1, std::vector<double> thetas, Complex a2) {
             return SnapSpec{a1, std::move(thetas), a2};
           }),
           py::arg("alpha1"), py::arg("thetas"), py::arg("alpha2"))
      .def_readwrite("alpha1", &SnapSpec::alpha1)
      .def_readwrite("thetas", &SnapSpec::thetas)
      .def_readwrite("alpha2", &SnapSpec::alpha2);
  m.def("snap_unitary", &snap_unitary);
  m.def("snap_prepare_fock1", &snap_prepare_fock1);
  m.def("snap_parity_mapping", &snap_parity_mapping);

  m.attr("__version__") = "0.1.0";
}
