#include "grassrec/cli.hpp"

#include "grassrec/moments.hpp"
#include "grassrec/recover.hpp"
#include "grassrec/serialization.hpp"
#include "grassrec/sweep.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

namespace grassrec::cli {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw UsageError(msg);
}

void print_record(std::ostream& out, const Record& rec) {
  for (const auto& [k, v] : rec) out << k << " = " << v << '\n';
}

Eigen::VectorXd gaussian_vector(int d, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd x(d);
  for (int i = 0; i < d; ++i) x(i) = normal(rng);
  return x;
}

}  // namespace

Spectrum parse_spectrum(const std::string& text, int d) {
  try {
    if (text == "e1") {
      require(d >= 1, "--lambda e1 needs --d");
      return Spectrum::e1(d);
    }
    if (text.rfind("projector:", 0) == 0) {
      require(d >= 1, "--lambda projector:K needs --d");
      return Spectrum::projector(d, std::stoi(text.substr(10)));
    }
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      vals.push_back(std::stod(item, &used));
      require(used == item.size(), "bad spectrum entry '" + item + "'");
    }
    require(d == 0 || static_cast<int>(vals.size()) == d,
            "--lambda has " + std::to_string(vals.size()) + " values but --d is " + std::to_string(d));
    return Spectrum(std::move(vals));
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError("invalid spectrum '" + text + "': " + e.what());
  }
}

int cmd_moments(const MomentsOptions& o, std::ostream& out) {
  const Spectrum lambda = parse_spectrum(o.lambda, o.d);
  const int d = lambda.dim();
  const bool rank1 = lambda.is_projector() && lambda.rank() == 1;
  require(o.t >= 1, "--t must be >= 1");
  require(o.t <= 3 || (rank1 && o.t <= 8),
          "unsupported degree t = " + std::to_string(o.t) + " (t <= 3, or t <= 8 for lambda = e1)");
  require(d >= o.t, "d < t: need d >= t (d = " + std::to_string(d) + ", t = " + std::to_string(o.t) + ")");
  require(o.n_mc >= 2, "--n-mc must be >= 2");

  Rng rng(derive_seed(o.seed, {0x6d6f6dULL}));
  std::vector<std::pair<std::string, SymMatrix>> probes;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
  e(0) = 1.0;
  probes.emplace_back("xx*", SymMatrix::outer(e));
  probes.emplace_back("identity", SymMatrix::identity(d));
  std::vector<double> ramp(d);
  for (int i = 0; i < d; ++i) ramp[i] = (i + 1.0) / d;
  probes.emplace_back("ramp", SymMatrix::diagonal(ramp));
  Eigen::MatrixXd g(d, d);
  std::normal_distribution<double> normal;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = normal(rng);
  const Eigen::MatrixXd sym = 0.5 * (g + g.transpose());
  probes.emplace_back("random", SymMatrix(sym / sym.norm()));

  std::vector<double> analytic;
  for (const auto& [name, x] : probes) {
    if (o.t <= 3) {
      analytic.push_back(trace_moment(lambda, o.t, x));
    } else {
      const auto ev = spectral_decompose(x).eigenvalues;
      analytic.push_back(rank1_general_moment(d, o.t, std::span<const double>(ev.data(), ev.size())));
    }
  }
  std::vector<double> sum(probes.size(), 0.0), sum_sq(probes.size(), 0.0);
  for (int i = 0; i < o.n_mc; ++i) {
    const SymMatrix p = haar_sample(lambda, rng);
    for (std::size_t j = 0; j < probes.size(); ++j) {
      const double v = std::pow(hs_inner(p, probes[j].second), o.t);
      sum[j] += v;
      sum_sq[j] += v * v;
    }
  }
  bool all_ok = true;
  out << std::setprecision(12);
  out << "d = " << d << ", t = " << o.t << ", n_mc = " << o.n_mc << '\n';
  for (std::size_t j = 0; j < probes.size(); ++j) {
    const double n = o.n_mc;
    const double mean = sum[j] / n;
    const double var = std::max(0.0, (sum_sq[j] - n * mean * mean) / (n - 1));
    const double se = std::sqrt(var / n);
    const double diff = std::abs(mean - analytic[j]);
    const bool ok = diff <= 3 * se + 1e-9 * std::max(1.0, std::abs(analytic[j]));
    all_ok = all_ok && ok;
    out << std::left << std::setw(9) << probes[j].first << " analytic " << analytic[j] << "  mc " << mean
        << "  se " << se << "  " << (ok ? "ok" : "FAIL") << '\n';
  }
  return all_ok ? 0 : 1;
}

int cmd_build(const BuildOptions& o, std::ostream& out) {
  const Spectrum lambda = parse_spectrum(o.lambda, o.d);
  require(o.t >= 1 && o.t <= 3, "--t must be 1..3");
  require(lambda.dim() >= o.t, "d < t: need d >= t");
  require(!o.out_path.empty(), "--out is required");
  const auto bounds = pol_dim_bounds(lambda.dim(), o.t);
  const int pool = o.pool > 0 ? o.pool : static_cast<int>(default_pool_size(lambda, o.t));
  Rng rng(derive_seed(o.seed, {0x6275696c64ULL}));
  const auto res = construct_cubature(lambda, o.t, pool, o.residual, rng);
  save_ensemble(o.out_path, res.ensemble, o.t);
  out << "pool " << res.pool_size << ", support " << res.support_size << '\n';
  out << "pol_dim full bound " << bounds.full_bound << ", diagonal bound " << bounds.diag_bound << '\n';
  out << "verification " << to_string(res.report.mode) << " residual " << std::setprecision(6)
      << res.report.max_residual << '\n';
  out << "wrote " << o.out_path << '\n';
  return 0;
}

int cmd_verify(const VerifyOptions& o, std::ostream& out) {
  require(o.mode == "auto" || o.mode == "exact" || o.mode == "randomized" || o.mode == "tight",
          "--mode must be auto, exact, randomized or tight");
  require(o.tol > 0, "--tol must be > 0");
  const auto file = load_ensemble(o.path);
  const int t = o.t > 0 ? o.t : file.claimed_strength;
  require(t >= 1, "strength t must be >= 1");
  Rng rng(derive_seed(o.seed, {0x766572ULL}));
  VerificationReport rep;
  if (o.mode == "tight") {
    rep = verify_tight_fusion(file.ensemble, t, o.tol, o.probes, rng);
  } else {
    require(t <= 3, "strength verification supports t <= 3");
    VerifyMode mode = o.mode == "exact" ? VerifyMode::exact : VerifyMode::randomized;
    if (o.mode == "auto")
      mode = hs_dim(file.ensemble.dim()) <= kMaxExactHsDim ? VerifyMode::exact : VerifyMode::randomized;
    rep = verify_strength(file.ensemble, t, o.tol, mode, o.probes, rng);
  }
  out << "atoms " << file.ensemble.size() << ", claimed " << file.claimed_strength << ", checked t " << t
      << '\n';
  out << "mode " << (o.mode == "tight" ? "tight" : to_string(rep.mode)) << ", probes " << rep.probes_used
      << ", max residual " << std::setprecision(6) << rep.max_residual << '\n';
  out << (rep.passed ? "pass" : "fail") << '\n';
  return rep.passed ? 0 : 1;
}

int cmd_recover(const RecoverOptions& o, std::ostream& out) {
  require(o.n >= 1, "--n must be >= 1");
  require(o.tol > 0 && o.max_iter >= 1, "--tol and --max-iter must be positive");
  std::optional<AtomSource> source;
  int d = o.d;
  if (o.ensemble == "haar") {
    require(d >= 2 && o.k >= 1 && o.k < d, "need d >= 2 and 1 <= k < d");
    source = AtomSource::haar(Spectrum::projector(d, o.k));
  } else {
    auto file = load_ensemble(o.ensemble);
    require(d == 0 || d == file.ensemble.dim(), "--d does not match the ensemble file");
    d = file.ensemble.dim();
    source = AtomSource::from_ensemble(std::move(file.ensemble));
  }
  Rng rng(derive_seed(o.seed, {0x726563ULL}));
  const Eigen::VectorXd x = gaussian_vector(d, rng);
  const auto ps = source->draw(static_cast<std::size_t>(o.n), rng);
  const auto m = measure(x, ps);
  if (!o.save_measurements.empty()) {
    std::ofstream f(o.save_measurements);
    if (!f) throw Error("cannot open '" + o.save_measurements + "' for writing");
    write_measurements(f, m);
  }
  const auto res = solve_feasibility(m, o.tol, o.max_iter);
  const double err = recovery_error(res.x_hat, x);
  const auto iso = isometry_constants(ps, x);
  out << std::setprecision(10);
  out << "d = " << d << '\n' << "n = " << o.n << '\n';
  print_record(out, res.to_record());
  out << "recovery_error = " << err << '\n';
  out << "alpha = " << iso.alpha << '\n' << "beta_exact = " << iso.beta_exact << '\n';
  out << "success = " << (err <= o.success_tol ? 1 : 0) << '\n';
  return 0;
}

int cmd_certify(const CertifyOptions& o, std::ostream& out) {
  require(o.d >= 2 && o.k >= 1 && o.k < o.d, "need d >= 2 and 1 <= k < d");
  require(o.c0 > std::sqrt(2.0), "--c0 must exceed sqrt(2) so that B = sqrt(2)/c0 < 1");
  Rng rng(derive_seed(o.seed, {0x63657274ULL}));
  const Eigen::VectorXd x = gaussian_vector(o.d, rng);
  const auto source = AtomSource::haar(Spectrum::projector(o.d, o.k));
  GolfingParams params;
  params.c0 = o.c0;
  params.batch_mult = o.batch_mult;
  params.batch_size = o.batch_size;
  params.t = o.t;
  params.max_repeats = o.max_repeats;
  const auto rep = golfing_certificate(x, source, params, rng);
  const Eigen::VectorXd u = x / x.norm();
  const auto iso = isometry_constants(rep.atoms, u);
  const auto verdict = deterministic_guarantee(iso.alpha, iso.beta_exact, rep.gamma_measured,
                                               rep.delta_measured);
  const auto res = solve_feasibility(measure(u, rep.atoms), o.tol, 20000);
  out << std::setprecision(10);
  out << "d = " << o.d << '\n' << "k = " << o.k << '\n' << "n = " << rep.atoms.size() << '\n';
  print_record(out, rep.to_record());
  out << "gamma_bound = " << 2.0 / (o.c0 * o.c0 * o.d) << '\n';
  out << "delta_bound = " << 1.0 / (o.c0 - std::sqrt(2.0)) << '\n';
  out << "alpha = " << iso.alpha << '\n' << "beta_exact = " << iso.beta_exact << '\n';
  out << "guarantee = " << (verdict.holds ? 1 : 0) << " (" << verdict.reason << ")\n";
  out << "recovery_error = " << recovery_error(res.x_hat, u) << '\n';
  return 0;
}

int cmd_sweep(const SweepOptions& o, std::ostream& out) {
  const auto cfg = SweepConfig::load(o.config_path);
  const auto rows = run_sweep(cfg);
  if (o.out_csv.empty() || o.out_csv == "-") {
    write_csv(out, rows);
  } else {
    std::ofstream f(o.out_csv, std::ios::binary);
    if (!f) throw Error("cannot open '" + o.out_csv + "' for writing");
    write_csv(f, rows);
    if (!f) throw Error("write to '" + o.out_csv + "' failed");
  }
  return 0;
}

int guarded(const std::function<int()>& fn, std::ostream& err) {
  try {
    return fn();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const UnsupportedDegree& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace grassrec::cli
