#include "grassrec/cubature.hpp"
#include "grassrec/error.hpp"
#include "grassrec/moments.hpp"
#include "grassrec/recover.hpp"
#include "grassrec/serialization.hpp"
#include "grassrec/sweep.hpp"
#include "grassrec/zonal.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace grassrec;

namespace {

std::vector<SymMatrix> to_sym(const std::vector<Eigen::MatrixXd>& ms) {
  std::vector<SymMatrix> out;
  out.reserve(ms.size());
  for (const auto& m : ms) out.emplace_back(m);
  return out;
}

std::vector<Eigen::MatrixXd> to_dense(const std::vector<SymMatrix>& ms) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(ms.size());
  for (const auto& m : ms) out.push_back(m.matrix());
  return out;
}

py::dict ensemble_dict(const WeightedEnsemble& ens) {
  py::dict d;
  d["spectrum"] = ens.spectrum().values();
  d["atoms"] = to_dense(ens.atoms());
  d["weights"] = ens.weights();
  return d;
}

WeightedEnsemble make_ensemble(const std::vector<double>& lambda,
                               const std::vector<Eigen::MatrixXd>& atoms,
                               const std::vector<double>& weights) {
  return WeightedEnsemble(Spectrum(lambda), to_sym(atoms), weights);
}

py::dict record_dict(const Record& r) {
  py::dict d;
  for (const auto& [k, v] : r) d[py::str(k)] = v;
  return d;
}

}  // namespace

PYBIND11_MODULE(_grassrec, m) {
  m.doc() = "Moments, cubatures and phase retrieval over orbits of symmetric matrices";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<UnsupportedDegree>(m, "UnsupportedDegree", PyExc_ValueError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);
  py::register_exception<CubatureError>(m, "CubatureError", PyExc_RuntimeError);
  py::register_exception<GolfingError>(m, "GolfingError", PyExc_RuntimeError);

  m.def("zonal", [](const std::vector<int>& parts, const Eigen::MatrixXd& x) {
    return zonal_eval(Partition(parts), SymMatrix(x));
  }, py::arg("partition"), py::arg("x"));

  m.def("trace_moment", [](const std::vector<double>& lambda, int t, const Eigen::MatrixXd& x) {
    return trace_moment(Spectrum(lambda), t, SymMatrix(x));
  }, py::arg("spectrum"), py::arg("t"), py::arg("x"),
     "E tr(P X)^t over the orbit of diag(spectrum), t <= 3.");

  m.def("moment_coefficients", [](const std::vector<double>& lambda) {
    const auto c = MomentCoefficients::from_spectrum(Spectrum(lambda));
    py::dict d;
    d["alpha_1"] = c.alpha_1();
    d["alpha_11"] = c.alpha_11();
    d["alpha_2"] = c.alpha_2();
    d["alpha_111"] = c.alpha_111();
    d["alpha_21"] = c.alpha_21();
    d["alpha_3"] = c.alpha_3();
    d["a1"] = c.a1;
    d["a2"] = c.a2;
    return d;
  }, py::arg("spectrum"));

  m.def("rank1_projector_moment", &rank1_projector_moment, py::arg("k"), py::arg("d"),
        py::arg("t"), py::arg("norm_sq") = 1.0);

  m.def("haar_sample", [](const std::vector<double>& lambda, std::uint64_t seed) {
    Rng rng(seed);
    return haar_sample(Spectrum(lambda), rng).matrix();
  }, py::arg("spectrum"), py::arg("seed") = 1);

  m.def("haar_samples", [](const std::vector<double>& lambda, int n, std::uint64_t seed) {
    Rng rng(seed);
    const Spectrum s(lambda);
    std::vector<Eigen::MatrixXd> out;
    for (int i = 0; i < n; ++i) out.push_back(haar_sample(s, rng).matrix());
    return out;
  }, py::arg("spectrum"), py::arg("n"), py::arg("seed") = 1);

  m.def("build_cubature", [](const std::vector<double>& lambda, int t, int pool, double residual,
                             std::uint64_t seed) {
    const Spectrum s(lambda);
    Rng rng(seed);
    const int p = pool > 0 ? pool : static_cast<int>(default_pool_size(s, t));
    auto res = construct_cubature(s, t, p, residual, rng);
    py::dict d = ensemble_dict(res.ensemble);
    d["max_residual"] = res.report.max_residual;
    d["verify_mode"] = to_string(res.report.mode);
    d["pool_size"] = res.pool_size;
    d["support_size"] = res.support_size;
    return d;
  }, py::arg("spectrum"), py::arg("t"), py::arg("pool") = 0, py::arg("residual") = 1e-8,
     py::arg("seed") = 1);

  m.def("verify_strength", [](const std::vector<double>& lambda,
                              const std::vector<Eigen::MatrixXd>& atoms,
                              const std::vector<double>& weights, int t, double tol,
                              const std::string& mode, int probes, std::uint64_t seed) {
    const auto ens = make_ensemble(lambda, atoms, weights);
    Rng rng(seed);
    VerificationReport r;
    if (mode == "tight") r = verify_tight_fusion(ens, t, tol, probes, rng);
    else if (mode == "exact") r = verify_strength(ens, t, tol, VerifyMode::exact, probes, rng);
    else if (mode == "randomized") r = verify_strength(ens, t, tol, VerifyMode::randomized, probes, rng);
    else if (mode == "auto")
      r = verify_strength(ens, t, tol,
                          hs_dim(ens.dim()) <= kMaxExactHsDim ? VerifyMode::exact : VerifyMode::randomized,
                          probes, rng);
    else throw InvalidArgument("mode must be auto, exact, randomized or tight");
    py::dict d;
    d["passed"] = r.passed;
    d["max_residual"] = r.max_residual;
    d["mode"] = to_string(r.mode);
    d["probes_used"] = r.probes_used;
    return d;
  }, py::arg("spectrum"), py::arg("atoms"), py::arg("weights"), py::arg("t"),
     py::arg("tol") = 1e-8, py::arg("mode") = "auto", py::arg("probes") = 200, py::arg("seed") = 1);

  m.def("load_ensemble", [](const std::string& path) {
    const auto f = load_ensemble(path);
    py::dict d = ensemble_dict(f.ensemble);
    d["t"] = f.claimed_strength;
    return d;
  }, py::arg("path"));

  m.def("save_ensemble", [](const std::string& path, const std::vector<double>& lambda,
                            const std::vector<Eigen::MatrixXd>& atoms,
                            const std::vector<double>& weights, int t) {
    save_ensemble(path, make_ensemble(lambda, atoms, weights), t);
  }, py::arg("path"), py::arg("spectrum"), py::arg("atoms"), py::arg("weights"), py::arg("t"));

  m.def("measure", [](const Eigen::VectorXd& x, const std::vector<Eigen::MatrixXd>& atoms) {
    const auto ps = to_sym(atoms);
    return measure(x, ps).values;
  }, py::arg("x"), py::arg("atoms"));

  m.def("solve", [](const std::vector<Eigen::MatrixXd>& atoms, const std::vector<double>& values,
                    double trace_value, int d, double tol, int max_iter) {
    MeasurementSet ms{to_sym(atoms), values, trace_value, d};
    const auto r = solve_feasibility(ms, tol, max_iter);
    py::dict out = record_dict(r.to_record());
    out["x_hat"] = r.x_hat.matrix();
    out["extracted_x"] = r.extracted_x;
    out["converged"] = r.converged;
    out["iterations"] = r.iterations;
    out["feasibility_residual"] = r.feasibility_residual;
    out["spectral_gap"] = r.spectral_gap;
    return out;
  }, py::arg("atoms"), py::arg("values"), py::arg("trace_value"), py::arg("d") = 0,
     py::arg("tol") = 1e-7, py::arg("max_iter") = 5000,
     "Alternating projections for X >= 0 with <X, P_j> = b_j and tr X = trace_value.");

  m.def("recovery_error", [](const Eigen::MatrixXd& x_hat, const Eigen::VectorXd& x) {
    return recovery_error(SymMatrix(x_hat), x);
  }, py::arg("x_hat"), py::arg("x"));

  m.def("isometry_constants", [](const std::vector<Eigen::MatrixXd>& atoms, const Eigen::VectorXd& x) {
    const auto ps = to_sym(atoms);
    const auto c = isometry_constants(ps, x);
    py::dict d;
    d["alpha"] = c.alpha;
    d["beta_bound"] = c.beta_bound;
    d["beta_exact"] = c.beta_exact;
    return d;
  }, py::arg("atoms"), py::arg("x"));

  m.def("deterministic_guarantee", [](double alpha, double beta, double gamma, double delta) {
    const auto v = deterministic_guarantee(alpha, beta, gamma, delta);
    return py::make_tuple(v.holds, v.lhs, v.rhs);
  }, py::arg("alpha"), py::arg("beta"), py::arg("gamma"), py::arg("delta"));

  m.def("golfing_certificate", [](const Eigen::VectorXd& x, const std::vector<double>& lambda,
                                  double c0, double batch_mult, int batch_size, int max_repeats,
                                  std::uint64_t seed) {
    GolfingParams p;
    p.c0 = c0;
    p.batch_mult = batch_mult;
    p.batch_size = batch_size;
    p.max_repeats = max_repeats;
    Rng rng(seed);
    const auto rep = golfing_certificate(x, AtomSource::haar(Spectrum(lambda)), p, rng);
    py::dict d = record_dict(rep.to_record());
    d["y"] = rep.y.matrix();
    d["gamma_measured"] = rep.gamma_measured;
    d["delta_measured"] = rep.delta_measured;
    d["in_span"] = rep.in_span;
    d["depth"] = rep.depth;
    d["batch_size"] = rep.batch_size;
    d["q_norms"] = rep.q_norms;
    d["atoms"] = to_dense(rep.atoms);
    return d;
  }, py::arg("x"), py::arg("spectrum"), py::arg("c0") = 10.0, py::arg("batch_mult") = 5.0,
     py::arg("batch_size") = 0, py::arg("max_repeats") = 20, py::arg("seed") = 1);

  m.def("run_sweep", [](const std::string& config_text) {
    std::istringstream in(config_text);
    const auto cfg = SweepConfig::parse(in);
    std::ostringstream out;
    {
      py::gil_scoped_release release;
      write_csv(out, run_sweep(cfg));
    }
    return out.str();
  }, py::arg("config_text"), "Runs a sweep from config text and returns the CSV.");
}
