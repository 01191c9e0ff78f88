// Python bindings: numpy arrays in and out, shapes (n,n,n) for scalars and
// (3,n,n,n) for vectors, both C-contiguous with x fastest. Heavy calls drop
// the GIL.
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <string>

#include "regwatch/config.hpp"
#include "regwatch/exponents.hpp"
#include "regwatch/fft_engine.hpp"
#include "regwatch/flows.hpp"
#include "regwatch/geometry.hpp"
#include "regwatch/norms.hpp"
#include "regwatch/run.hpp"
#include "regwatch/snapshot_io.hpp"
#include "regwatch/solver.hpp"
#include "regwatch/spectral_ops.hpp"
#include "regwatch/verify.hpp"

namespace py = pybind11;
using namespace regwatch;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

int grid_size_from(ssize_t n) {
    if (n < 8 || n % 2 != 0) throw py::value_error("grid size must be even and >= 8");
    return static_cast<int>(n);
}

ScalarField to_scalar(const DoubleArray& a) {
    if (a.ndim() != 3 || a.shape(0) != a.shape(1) || a.shape(1) != a.shape(2))
        throw py::value_error("expected a cubic (n, n, n) array");
    SpectralGrid grid(grid_size_from(a.shape(0)));
    ScalarField f(grid);
    std::memcpy(f.physical_mut().data(), a.data(), sizeof(double) * grid.physical_size());
    return f;
}

VectorField to_vector(const DoubleArray& a) {
    if (a.ndim() != 4 || a.shape(0) != 3 || a.shape(1) != a.shape(2) ||
        a.shape(2) != a.shape(3))
        throw py::value_error("expected a (3, n, n, n) array");
    SpectralGrid grid(grid_size_from(a.shape(1)));
    VectorField v(grid);
    const std::size_t stride = grid.physical_size();
    for (int c = 0; c < 3; ++c)
        std::memcpy(v[c].physical_mut().data(), a.data() + c * stride,
                    sizeof(double) * stride);
    return v;
}

py::array_t<double> from_scalar(const ScalarField& f) {
    const ssize_t n = f.grid().n();
    py::array_t<double> out({n, n, n});
    std::memcpy(out.mutable_data(), f.physical().data(),
                sizeof(double) * f.grid().physical_size());
    return out;
}

py::array_t<double> from_vector(const VectorField& v) {
    const ssize_t n = v.grid().n();
    py::array_t<double> out({ssize_t{3}, n, n, n});
    const std::size_t stride = v.grid().physical_size();
    for (int c = 0; c < 3; ++c)
        std::memcpy(out.mutable_data() + c * stride, v[c].physical().data(),
                    sizeof(double) * stride);
    return out;
}

py::array_t<double> from_values(const std::vector<double>& v) {
    py::array_t<double> out(static_cast<ssize_t>(v.size()));
    std::memcpy(out.mutable_data(), v.data(), sizeof(double) * v.size());
    return out;
}

CriterionKind kind_from_name(const std::string& name) {
    for (CriterionKind k : {CriterionKind::kappa_beta, CriterionKind::kappa,
                            CriterionKind::eta, CriterionKind::weighted_kappa})
        if (name == criterion_name(k)) return k;
    throw py::value_error("unknown criterion kind '" + name +
                          "' (expected kappa_beta, kappa, eta, or weighted_kappa)");
}

CriterionForm form_from_name(const std::string& name) {
    for (CriterionForm f :
         {CriterionForm::kappa_beta_smallness, CriterionForm::kappa_beta_mixed,
          CriterionForm::kappa_smallness, CriterionForm::kappa_mixed,
          CriterionForm::eta_mixed, CriterionForm::weighted_smallness})
        if (name == criterion_form_name(f)) return f;
    throw py::value_error("unknown criterion form '" + name + "'");
}

py::dict trajectory_to_dict(const Trajectory& traj) {
    const std::size_t m = traj.diagnostics.size();
    const std::size_t nb = traj.betas.size();
    const std::size_t nc = traj.criteria.size();

    py::array_t<double> times(static_cast<ssize_t>(m));
    py::array_t<double> max_velocity(static_cast<ssize_t>(m));
    py::array_t<double> tail_fraction(static_cast<ssize_t>(m));
    py::array_t<double> energy({m, nb}), dissipation({m, nb}), production({m, nb});
    py::array_t<double> criterion_norms({m, nc});
    for (std::size_t i = 0; i < m; ++i) {
        const DiagnosticSample& s = traj.diagnostics[i];
        times.mutable_at(i) = s.time;
        max_velocity.mutable_at(i) = s.max_velocity;
        tail_fraction.mutable_at(i) = s.tail_fraction;
        for (std::size_t b = 0; b < nb; ++b) {
            energy.mutable_at(i, b) = s.energy[b];
            dissipation.mutable_at(i, b) = s.dissipation[b];
            production.mutable_at(i, b) = s.production[b];
        }
        for (std::size_t c = 0; c < nc; ++c)
            criterion_norms.mutable_at(i, c) = s.criterion_norms[c];
    }

    py::list snapshot_times, snapshots;
    for (const TrajectorySample& snap : traj.snapshots) {
        snapshot_times.append(snap.time);
        snapshots.append(from_vector(snap.velocity));
    }

    py::dict out;
    out["nu"] = traj.nu;
    out["betas"] = traj.betas;
    out["times"] = times;
    out["max_velocity"] = max_velocity;
    out["tail_fraction"] = tail_fraction;
    out["energy"] = energy;
    out["dissipation"] = dissipation;
    out["production"] = production;
    out["criterion_norms"] = criterion_norms;
    out["snapshot_times"] = snapshot_times;
    out["snapshots"] = snapshots;
    return out;
}

py::dict outcome_to_dict(const VerifyOutcome& outcome) {
    py::list checks;
    for (const CheckResult& r : outcome.results) {
        py::dict d;
        d["name"] = r.name;
        d["passed"] = r.passed;
        d["skipped"] = r.skipped;
        d["detail"] = r.detail;
        checks.append(d);
    }
    py::dict out;
    out["all_passed"] = outcome.all_passed;
    out["checks"] = checks;
    return out;
}

std::vector<std::uint8_t> optional_mask(const SpectralGrid& grid, py::object center,
                                        py::object radius) {
    if (center.is_none() != radius.is_none())
        throw py::value_error("center and radius must be given together");
    if (center.is_none()) return {};
    auto c = center.cast<std::array<double, 3>>();
    return cylinder_mask(grid, c, radius.cast<double>());
}

} // namespace

PYBIND11_MODULE(_regwatch, m) {
    m.doc() = "Spectral periodic-box Navier-Stokes solver with alignment diagnostics";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<InstabilityError>(m, "InstabilityError", PyExc_RuntimeError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<SparseSamplingError>(m, "SparseSamplingError", PyExc_RuntimeError);

    m.def("set_fft_threads", &fft::set_threads, py::arg("count"),
          "FFTW thread count for subsequent transforms");

    // Initial fields.
    m.def(
        "taylor_green",
        [](int n) { return from_vector(initial_taylor_green(SpectralGrid(n))); },
        py::arg("n"));
    m.def(
        "abc",
        [](int n, double A, double B, double C) {
            return from_vector(initial_abc(SpectralGrid(n), A, B, C));
        },
        py::arg("n"), py::arg("A") = 1.0, py::arg("B") = 1.0, py::arg("C") = 1.0);
    m.def(
        "random_divfree",
        [](int n, std::uint64_t seed, double amplitude, double slope) {
            return from_vector(initial_random_divfree(SpectralGrid(n), slope, seed, amplitude));
        },
        py::arg("n"), py::arg("seed"), py::arg("amplitude") = 1.0,
        py::arg("slope") = -5.0 / 3.0);

    // Spectral operators.
    m.def("curl", [](const DoubleArray& v) { return from_vector(curl(to_vector(v))); },
          py::arg("v"));
    m.def("leray_project",
          [](const DoubleArray& v) { return from_vector(leray_project(to_vector(v))); },
          py::arg("v"));
    m.def(
        "lambda_beta",
        [](const DoubleArray& a, double beta) {
            if (a.ndim() == 3) return py::object(from_scalar(lambda_beta(to_scalar(a), beta)));
            return py::object(from_vector(lambda_beta(to_vector(a), beta)));
        },
        py::arg("field"), py::arg("beta"),
        "Fourier multiplier |k|^beta on a scalar or vector field");
    m.def("nonlinear_rotational",
          [](const DoubleArray& v) { return from_vector(nonlinear_rotational(to_vector(v))); },
          py::arg("v"), "Dealiased projected v x curl v");
    m.def("pressure",
          [](const DoubleArray& v) { return from_scalar(pressure_from_velocity(to_vector(v))); },
          py::arg("v"), "Zero-mean pressure from the spectral Poisson solve");

    // Alignment functionals.
    m.def(
        "criterion_field",
        [](const DoubleArray& v, const std::string& kind, double parameter, double floor) {
            CriterionSpec spec;
            spec.kind = kind_from_name(kind);
            spec.parameter = parameter;
            spec.direction_floor = floor;
            return from_scalar(criterion_field(to_vector(v), spec).values);
        },
        py::arg("v"), py::arg("kind"), py::arg("parameter") = 1.0,
        py::arg("floor") = default_direction_floor,
        "Pointwise positive-part alignment functional of the named kind");

    m.def(
        "energy_diagnostics",
        [](const DoubleArray& v, double beta) {
            const VectorField vf = to_vector(v);
            const EnergyTriple t = energy_diagnostics(vf, nonlinear_rotational(vf), beta);
            return py::make_tuple(t.energy, t.dissipation, t.production);
        },
        py::arg("v"), py::arg("beta"),
        "(energy, dissipation, production) of the graded balance at this beta");

    // Norms.
    m.def(
        "spatial_norm",
        [](const DoubleArray& a, double gamma, py::object center, py::object radius) {
            if (a.ndim() == 3) {
                const ScalarField f = to_scalar(a);
                const auto mask = optional_mask(f.grid(), center, radius);
                return mask.empty() ? spatial_norm(f, gamma) : spatial_norm(f, gamma, mask);
            }
            const VectorField v = to_vector(a);
            const auto mask = optional_mask(v.grid(), center, radius);
            return mask.empty() ? spatial_norm(v, gamma) : spatial_norm(v, gamma, mask);
        },
        py::arg("field"), py::arg("gamma"), py::arg("center") = py::none(),
        py::arg("radius") = py::none(),
        "Lattice L^gamma norm, optionally restricted to a periodic ball");
    m.def(
        "mixed_norm",
        [](const std::vector<double>& times, const std::vector<double>& values, double alpha,
           double begin, double end) {
            return mixed_norm(times, values, alpha, TimeWindow{begin, end});
        },
        py::arg("times"), py::arg("values"), py::arg("alpha"), py::arg("begin"),
        py::arg("end"), "L^alpha-in-time composition of a sampled spatial-norm series");
    m.def(
        "sobolev_norm",
        [](const DoubleArray& a, double s, bool inhomogeneous) {
            if (a.ndim() == 3) {
                if (inhomogeneous)
                    throw py::value_error("inhomogeneous variant takes a vector field");
                return sobolev_norm(to_scalar(a), s);
            }
            const VectorField v = to_vector(a);
            return inhomogeneous ? sobolev_norm_inhomogeneous(v, s) : sobolev_norm(v, s);
        },
        py::arg("field"), py::arg("s"), py::arg("inhomogeneous") = false);
    m.def(
        "ball_mask",
        [](int n, std::array<double, 3> center, double radius) {
            const SpectralGrid grid(n);
            const auto mask = cylinder_mask(grid, center, radius);
            py::array_t<bool> out({ssize_t(n), ssize_t(n), ssize_t(n)});
            for (std::size_t i = 0; i < mask.size(); ++i) out.mutable_data()[i] = mask[i] != 0;
            return out;
        },
        py::arg("n"), py::arg("center"), py::arg("radius"),
        "Boolean lattice indicator of a periodic ball");

    // Exponent bookkeeping.
    m.def(
        "pq_exponents",
        [](double gamma, double beta) {
            const PqPair pq = pq_exponents(gamma, beta);
            return py::make_tuple(pq.p.value(), pq.q.value());
        },
        py::arg("gamma"), py::arg("beta"),
        "Conjugate norm pair for the three-factor production split");
    m.def(
        "young_time_exponent",
        [](double gamma) { return young_time_exponent(rational_approx(gamma)).value(); },
        py::arg("gamma"));
    m.def(
        "admissible",
        [](const std::string& form, double gamma, double alpha, double parameter) {
            AdmissibleExponents spec;
            spec.form = form_from_name(form);
            spec.gamma = rational_approx(gamma);
            spec.alpha = rational_approx(alpha);
            spec.parameter = rational_approx(parameter);
            const Admissibility a = check_exponents(spec);
            return py::make_tuple(a.admissible, a.detail);
        },
        py::arg("form"), py::arg("gamma"), py::arg("alpha"), py::arg("parameter") = 1.0,
        "(admissible, detail) for one hypothesis shape");

    // Simulation and the persisted pipeline. Config text uses the same
    // sectioned key = value format as the command line tool.
    m.def(
        "simulate",
        [](const std::string& config_text) {
            const RunConfig rc = parse_config_text(config_text);
            Trajectory traj;
            {
                py::gil_scoped_release release;
                traj = simulate(rc.solver);
            }
            return trajectory_to_dict(traj);
        },
        py::arg("config_text"),
        "Run the solver on a parsed config; diagnostics and snapshots in a dict");
    m.def(
        "run_simulate",
        [](const std::string& config_text) {
            const RunConfig rc = parse_config_text(config_text);
            py::gil_scoped_release release;
            run_simulate(rc);
        },
        py::arg("config_text"),
        "Run and persist snapshots, diagnostics.csv, and the manifest");
    m.def(
        "run_diagnose",
        [](const std::string& config_text, const std::filesystem::path& snapshot_dir) {
            const RunConfig rc = parse_config_text(config_text);
            py::gil_scoped_release release;
            run_diagnose(rc, snapshot_dir);
        },
        py::arg("config_text"), py::arg("snapshot_dir"),
        "Recompute criterion norms from stored snapshots into criteria.csv");
    m.def(
        "run_verify",
        [](const std::string& config_text, py::object snapshot_dir) {
            const RunConfig rc = parse_config_text(config_text);
            VerifyOutcome outcome;
            if (snapshot_dir.is_none()) {
                py::gil_scoped_release release;
                outcome = run_verify(rc);
            } else {
                const auto dir = snapshot_dir.cast<std::filesystem::path>();
                py::gil_scoped_release release;
                outcome = run_verify(rc, dir);
            }
            return outcome_to_dict(outcome);
        },
        py::arg("config_text"), py::arg("snapshot_dir") = py::none(),
        "Run the estimate-chain checks live or on stored snapshots");
    m.def(
        "canonical_config",
        [](const std::string& config_text) {
            return write_config_text(parse_config_text(config_text));
        },
        py::arg("config_text"), "Parse and re-serialize a config in canonical form");

    // Snapshot files.
    m.def(
        "read_snapshot",
        [](const std::filesystem::path& path) {
            const LoadedSnapshot snap = read_snapshot(path);
            return py::make_tuple(snap.time, from_vector(snap.velocity));
        },
        py::arg("path"));
    m.def(
        "write_snapshot",
        [](const std::filesystem::path& path, double time, const DoubleArray& v) {
            write_snapshot(path, time, to_vector(v));
        },
        py::arg("path"), py::arg("time"), py::arg("v"));

    // Verification primitives on in-memory series.
    m.def(
        "young_split_margin", &young_split_margin, py::arg("factor"),
        py::arg("energy_norm"), py::arg("gradient_norm"), py::arg("gamma"),
        "Bound minus product for the weighted two-term split; nonnegative");
    m.def(
        "balance_residual",
        [](const std::string& config_text, double beta) {
            const RunConfig rc = parse_config_text(config_text);
            Trajectory traj;
            {
                py::gil_scoped_release release;
                traj = simulate(rc.solver);
            }
            const BalanceResiduals r = energy_balance_residual(traj, beta);
            py::dict out;
            out["midpoint_times"] = from_values(r.midpoint_times);
            out["residuals"] = from_values(r.residuals);
            out["relative"] = r.relative;
            out["within"] = r.within;
            return out;
        },
        py::arg("config_text"), py::arg("beta"),
        "Simulate and report the graded energy balance residuals");
}
