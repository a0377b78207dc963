// Acceptance suite: one pass/fail line per criterion, nonzero exit if any fails.

#include "grassrec/cubature.hpp"
#include "grassrec/error.hpp"
#include "grassrec/moments.hpp"
#include "grassrec/recover.hpp"
#include "grassrec/sweep.hpp"
#include "grassrec/zonal.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace grassrec;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

SymMatrix random_sym(int d, Rng& rng) {
  std::normal_distribution<double> n;
  Eigen::MatrixXd g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = n(rng);
  return SymMatrix(0.5 * (g + g.transpose()));
}

Spectrum random_spectrum(int d, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(d);
  for (auto& x : v) x = u(rng);
  std::sort(v.rbegin(), v.rend());
  const double top = v.front();
  for (auto& x : v) x /= top;
  v.front() = 1.0;
  // Zero out a random tail so low-rank profiles are covered as well.
  const int zeros = std::uniform_int_distribution<int>(0, d - 2)(rng);
  for (int i = 0; i < zeros; ++i) v[d - 1 - i] = 0.0;
  return Spectrum(v);
}

Eigen::VectorXd random_unit(int d, Rng& rng) {
  std::normal_distribution<double> n;
  Eigen::VectorXd x(d);
  for (int i = 0; i < d; ++i) x(i) = n(rng);
  return x / x.norm();
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

struct Outcome {
  bool pass;
  std::string detail;
};

// ---------------------------------------------------------------------------

Outcome zonal_identity() {
  const auto t0 = Clock::now();
  Rng rng(101);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const int d = 3 + i % 6;
    // Wishart draws: an indefinite X can have tr X near 0, where a relative
    // error against tr(X)^t measures cancellation rather than the identity.
    const SymMatrix g = random_sym(d, rng);
    const SymMatrix x(g.matrix() * g.matrix() / d);
    const double tr = x.trace();
    for (int t = 1; t <= 3; ++t) {
      double sum = 0.0;
      for (const auto& p : partitions(t, d)) sum += zonal_eval(p, x);
      worst = std::max(worst, std::abs(sum - std::pow(tr, t)) / std::max(1e-300, std::abs(std::pow(tr, t))));
    }
  }
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << "max rel err " << worst << ", " << secs << " s";
  return {worst < 1e-10 && secs < 1.0, os.str()};
}

Outcome dual_path_moments() {
  const auto t0 = Clock::now();
  Rng rng(202);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const int t = 1 + i % 3;
    const int d = std::max(3, 3 + static_cast<int>(rng() % 6));
    const Spectrum lambda = random_spectrum(d, rng);
    const SymMatrix x = random_sym(d, rng);
    const auto coeffs = MomentCoefficients::from_spectrum(lambda);
    const std::vector<SymMatrix> xs(t, x);
    const double a = trace_moment(lambda, t, x);
    const double b = coefficient_moment(coeffs, xs);
    worst = std::max(worst, std::abs(a - b) / std::max(1e-300, std::abs(a)));
  }
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << "max rel err " << worst << ", " << secs << " s";
  return {worst < 1e-10 && secs < 5.0, os.str()};
}

Outcome closed_form_anchors() {
  // For P = u u^T with u uniform on the sphere, <P, x x^T> = u_1^2 ~ Beta(1/2, (d-1)/2),
  // whose t-th moment is prod_{i<t} (1/2 + i) / (d/2 + i).
  auto beta_moment = [](int d, int t) {
    double r = 1.0;
    for (int i = 0; i < t; ++i) r *= (0.5 + i) / (0.5 * d + i);
    return r;
  };
  Rng rng(303);
  const Eigen::VectorXd x3 = random_unit(3, rng);
  const SymMatrix xx3 = SymMatrix::outer(x3);
  const double m2 = trace_moment(Spectrum::e1(3), 2, xx3);
  const double m3 = trace_moment(Spectrum::e1(3), 3, xx3);
  // d = 2: u = (cos th, sin th) uniform, <P, e1 e1^T>^2 = cos^4 th. Trapezoid rule
  // on a periodic trigonometric polynomial is exact once the grid outruns the degree.
  const int grid = 64;
  double integral = 0.0;
  for (int i = 0; i < grid; ++i) integral += std::pow(std::cos(2 * std::numbers::pi * i / grid), 4);
  integral /= grid;
  Eigen::VectorXd e2 = Eigen::VectorXd::Zero(2);
  e2(0) = 1.0;
  const double m22 = trace_moment(Spectrum::e1(2), 2, SymMatrix::outer(e2));
  const double err = std::max({std::abs(m2 - 0.2), std::abs(m2 - beta_moment(3, 2)),
                               std::abs(m3 - 1.0 / 7), std::abs(m3 - beta_moment(3, 3)),
                               std::abs(m22 - integral), std::abs(integral - 0.375)});
  std::ostringstream os;
  os << "mu2 = " << m2 << ", mu3 = " << m3 << ", d=2 mu2 = " << m22 << " vs quadrature " << integral
     << ", max abs err " << err;
  return {err < 1e-12, os.str()};
}

Outcome expectation_operators() {
  const auto t0 = Clock::now();
  Rng rng(404);
  const int d = 4;
  const int draws = 1000000;
  bool ok = true;
  int checks = 0, misses = 0;
  double worst_z = 0.0;
  const SymMatrix x = random_sym(d, rng);
  for (const Spectrum& lambda : {Spectrum::e1(d), Spectrum({1.0, 0.5, 0.0, 0.0})}) {
    const auto c = MomentCoefficients::from_spectrum(lambda);
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(d, d), sum_sq = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < draws; ++i) {
      const SymMatrix p = haar_sample(lambda, rng);
      const Eigen::MatrixXd v = hs_inner(p, x) * p.matrix();
      sum += v;
      sum_sq += v.cwiseProduct(v);
    }
    const Eigen::MatrixXd mean = sum / draws;
    const Eigen::MatrixXd se =
        ((sum_sq / draws - mean.cwiseProduct(mean)) * (draws / (draws - 1.0)) / draws).cwiseSqrt();
    const Eigen::MatrixXd target = x.matrix() + c.a2 * x.trace() * Eigen::MatrixXd::Identity(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        ++checks;
        const double z = std::abs(c.a1 * mean(i, j) - target(i, j)) / (c.a1 * se(i, j));
        worst_z = std::max(worst_z, z);
        if (z > 3.0) ++misses;
      }
  }
  ok = ok && misses == 0;
  double inv_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Spectrum lambda = random_spectrum(d, rng);
    const auto c = MomentCoefficients::from_spectrum(lambda);
    const SymMatrix y = random_sym(d, rng);
    const SymMatrix back = s_map(c, c.a1 * expectation_operator(c, y));
    inv_err = std::max(inv_err, (back - y).matrix().cwiseAbs().maxCoeff());
  }
  const auto e1 = MomentCoefficients::from_spectrum(Spectrum::e1(4));
  const bool consts = std::abs(e1.a1 - 12.0) < 1e-12 && std::abs(e1.a2 - 0.5) < 1e-12;
  const double secs = seconds_since(t0);
  ok = ok && inv_err < 1e-12 && consts && secs < 60.0;
  std::ostringstream os;
  os << misses << "/" << checks << " entries beyond 3 SE (max z " << worst_z << "), S inverse err " << inv_err
     << ", e1 d=4 a1 = " << e1.a1 << " a2 = " << e1.a2 << ", " << secs << " s";
  return {ok, os.str()};
}

Outcome second_order_operator_check() {
  Rng rng(505);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int d = 3 + i % 4;
    const Spectrum lambda = random_spectrum(d, rng);
    const auto c = MomentCoefficients::from_spectrum(lambda);
    const std::vector<SymMatrix> xs{random_sym(d, rng), random_sym(d, rng), random_sym(d, rng)};
    const double lhs = hs_inner(second_order_operator(c, xs[0], xs[1]), xs[2]);
    const double rhs = cross_moment(lambda, xs);
    worst = std::max(worst, rel_err(lhs, rhs));
  }
  // Monte Carlo against sampling for a few triples.
  int misses = 0;
  double worst_z = 0.0;
  const int draws = 400000;
  for (int trip = 0; trip < 4; ++trip) {
    const int d = 4;
    const Spectrum lambda = trip % 2 ? Spectrum({1.0, 0.6, 0.2, 0.0}) : Spectrum::projector(d, 2);
    const auto c = MomentCoefficients::from_spectrum(lambda);
    const SymMatrix x1 = random_sym(d, rng), x2 = random_sym(d, rng), x3 = random_sym(d, rng);
    const double analytic = hs_inner(second_order_operator(c, x1, x2), x3);
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < draws; ++i) {
      const SymMatrix p = haar_sample(lambda, rng);
      const double v = hs_inner(p, x1) * hs_inner(p, x2) * hs_inner(p, x3);
      s += v;
      s2 += v * v;
    }
    const double mean = s / draws;
    const double se = std::sqrt((s2 / draws - mean * mean) / (draws - 1.0));
    const double z = std::abs(mean - analytic) / se;
    worst_z = std::max(worst_z, z);
    if (z > 3.0) ++misses;
  }
  std::ostringstream os;
  os << "max rel err vs cross moment " << worst << ", Monte Carlo " << misses << "/4 beyond 3 SE (max z "
     << worst_z << ")";
  return {worst < 1e-10 && misses == 0, os.str()};
}

Outcome cubature_construction() {
  const auto t0 = Clock::now();
  struct Case {
    Spectrum lambda;
    int t;
    int pool;
  };
  const std::vector<Case> cases{{Spectrum::e1(3), 3, 1000}, {Spectrum({1, 1, 0, 0}), 2, 1000}};
  bool ok = true;
  std::ostringstream os;
  for (const auto& c : cases) {
    int success = 0, downgrade_ok = 0, strength3 = 0;
    for (int attempt = 0; attempt < 10; ++attempt) {
      Rng rng(derive_seed(606, {static_cast<std::uint64_t>(c.t), static_cast<std::uint64_t>(attempt)}));
      try {
        const auto res = construct_cubature(c.lambda, c.t, c.pool, 1e-8, rng);
        if (res.report.mode != VerifyMode::exact || res.report.max_residual > 1e-8) continue;
        ++success;
        if (c.t == 3) {
          ++strength3;
          const auto r2 = verify_strength_exact(res.ensemble, 2, 1e-8);
          const auto r1 = verify_strength_exact(res.ensemble, 1, 1e-8);
          if (r2.passed && r1.passed) ++downgrade_ok;
        }
      } catch (const CubatureError&) {
      }
    }
    ok = ok && success >= 9 && downgrade_ok == strength3;
    os << "d=" << c.lambda.dim() << " t=" << c.t << ": " << success << "/10";
    if (c.t == 3) os << " (downgrade " << downgrade_ok << "/" << strength3 << ")";
    os << "; ";
  }
  const double secs = seconds_since(t0);
  os << secs << " s";
  return {ok && secs < 300.0, os.str()};
}

// Success rate per (d, k, n) from a sweep.
using Curve = std::map<int, double>;

std::map<std::pair<int, int>, Curve> success_curves(const std::vector<SweepRow>& rows) {
  std::map<std::pair<int, int>, std::map<int, std::pair<int, int>>> counts;
  for (const auto& r : rows) {
    auto& c = counts[{r.d, r.k}][r.n];
    c.first += r.success;
    c.second += 1;
  }
  std::map<std::pair<int, int>, Curve> out;
  for (const auto& [key, byn] : counts)
    for (const auto& [n, c] : byn) out[key][n] = static_cast<double>(c.first) / c.second;
  return out;
}

SweepConfig phase_config() {
  SweepConfig cfg;
  cfg.d_list = {4, 6, 8, 10};
  cfg.k_list = {1, 2};
  cfg.n_list = {1, 2, 3, 4, 5, 6, 7, 8};
  cfg.n_per_d = true;
  cfg.trials = 50;
  cfg.seed = 707;
  return cfg;
}

Outcome phase_transition() {
  const auto t0 = Clock::now();
  const auto curves = success_curves(run_sweep(phase_config()));
  bool ok = true;
  std::ostringstream os;
  for (const auto& [key, curve] : curves) {
    int cross = -1;
    int inversions = 0;
    double worst_drop = 0.0;
    double prev = -1.0;
    for (const auto& [n, rate] : curve) {
      if (cross < 0 && rate >= 0.9) cross = n;
      if (prev >= 0 && rate < prev) {
        ++inversions;
        worst_drop = std::max(worst_drop, prev - rate);
      }
      prev = rate;
    }
    const bool cell_ok = cross > 0 && cross <= 8 * key.first && inversions <= 1 && worst_drop <= 0.05;
    ok = ok && cell_ok;
    os << "d=" << key.first << ",k=" << key.second << ": n90=" << cross << (cell_ok ? "" : " FAIL") << "; ";
  }
  const double secs = seconds_since(t0);
  os << secs << " s";
  return {ok && secs < 900.0, os.str()};
}

Outcome cubature_parity() {
  SweepConfig haar = phase_config();
  haar.d_list = {8};
  haar.k_list = {1};
  SweepConfig cub = haar;
  cub.ensemble_source = "build";
  cub.build_t = 3;
  const auto ch = success_curves(run_sweep(haar)).at({8, 1});
  const auto cc = success_curves(run_sweep(cub)).at({8, 1});
  double worst = 0.0;
  std::ostringstream os;
  for (const auto& [n, rate] : ch) {
    os << n << ":" << rate << "/" << cc.at(n) << " ";
    if (n >= 4 * 8) worst = std::max(worst, std::abs(rate - cc.at(n)));
  }
  os << "(haar/cubature), max gap for n >= 4d " << worst;
  return {worst <= 0.1, os.str()};
}

struct GolfingRun {
  std::vector<double> q_norms;
  int depth;
  int d;
  double c0;
};

std::vector<GolfingRun> g_golfing_runs;

Outcome certificate_soundness() {
  const double tol = 1e-9;
  const double c0 = 10.0;
  int certified = 0, counterexamples = 0, golf_failed = 0;
  double worst_cert_err = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 8 + 2 * (trial % 5);
    const int k = 1 + (trial / 5) % 2;
    Rng rng(derive_seed(909, {static_cast<std::uint64_t>(trial)}));
    const Eigen::VectorXd x = random_unit(d, rng);
    GolfingParams params;
    params.c0 = c0;
    params.batch_mult = 5.0;
    CertificateReport rep;
    try {
      rep = golfing_certificate(x, AtomSource::haar(Spectrum::projector(d, k)), params, rng);
    } catch (const GolfingError&) {
      ++golf_failed;
      continue;
    }
    g_golfing_runs.push_back({rep.q_norms, rep.depth, d, c0});
    const auto iso = isometry_constants(rep.atoms, x);
    const auto verdict = deterministic_guarantee(iso.alpha, iso.beta_exact, rep.gamma_measured, rep.delta_measured);
    if (!verdict.holds || !rep.in_span) continue;
    ++certified;
    const auto res = solve_feasibility(measure(x, rep.atoms), tol, 20000);
    const double err = (res.x_hat.matrix() - x * x.transpose()).norm();
    worst_cert_err = std::max(worst_cert_err, err);
    if (err > 10 * tol) ++counterexamples;
  }
  std::ostringstream os;
  os << certified << "/200 certified, " << counterexamples << " counterexamples, " << golf_failed
     << " golfing failures, worst certified error " << worst_cert_err;
  return {certified > 0 && counterexamples == 0, os.str()};
}

Outcome golfing_decay() {
  if (g_golfing_runs.empty()) return {false, "no accepted golfing runs"};
  int bad_ratio = 0, bad_depth = 0;
  double worst_ratio = 0.0;
  for (const auto& run : g_golfing_runs) {
    const double b = std::sqrt(2.0) / run.c0;
    // Smallest integer m with b^m <= 1/d, plus two.
    int m = 0;
    double p = 1.0;
    while (p > 1.0 / run.d) {
      p *= b;
      ++m;
    }
    if (run.depth != m + 2 || static_cast<int>(run.q_norms.size()) != run.depth + 1) ++bad_depth;
    for (std::size_t i = 1; i < run.q_norms.size(); ++i) {
      if (run.q_norms[i - 1] == 0.0) continue;
      const double ratio = run.q_norms[i] / run.q_norms[i - 1];
      worst_ratio = std::max(worst_ratio, ratio);
      if (ratio > b) ++bad_ratio;
    }
  }
  std::ostringstream os;
  os << g_golfing_runs.size() << " runs, worst ratio " << worst_ratio << " (bound " << std::sqrt(2.0) / 10
     << "), " << bad_ratio << " ratio violations, " << bad_depth << " depth mismatches";
  return {bad_ratio == 0 && bad_depth == 0, os.str()};
}

Outcome determinism() {
  SweepConfig cfg;
  cfg.d_list = {4, 6};
  cfg.k_list = {1, 2};
  cfg.n_list = {8, 12, 16};
  cfg.trials = 5;
  cfg.seed = 1111;
  auto csv = [&](int workers) {
    cfg.workers = workers;
    std::ostringstream os;
    write_csv(os, run_sweep(cfg));
    return os.str();
  };
  const std::string a = csv(1), b = csv(1), c = csv(3);
  return {a == b && a == c && !a.empty(),
          std::to_string(a.size()) + " bytes, repeat " + (a == b ? "identical" : "DIFFERENT") +
              ", 3 workers " + (a == c ? "identical" : "DIFFERENT")};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "zonal identity", zonal_identity},
      {2, "dual-path moments", dual_path_moments},
      {3, "closed-form anchors", closed_form_anchors},
      {4, "expectation operators", expectation_operators},
      {5, "second-order operator", second_order_operator_check},
      {6, "cubature construction", cubature_construction},
      {7, "recovery phase transition", phase_transition},
      {8, "cubature-vs-Haar parity", cubature_parity},
      {9, "certificate soundness", certificate_soundness},
      {10, "golfing decay", golfing_decay},
      {11, "determinism", determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
