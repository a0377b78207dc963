#include "grassrec/recover.hpp"

#include "grassrec/error.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace grassrec {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + std::to_string(v[i]);
  return s;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + fmt(v[i]);
  return s;
}

void require_dims(std::span<const SymMatrix> ps, int d, const char* who) {
  for (const auto& p : ps)
    if (p.dim() != d) throw DimensionError(std::string(who) + ": dimension mismatch");
}

// Orthonormal basis of span{I, P_1, ..., P_n} in Hilbert-Schmidt coordinates.
Eigen::MatrixXd span_basis(std::span<const SymMatrix> ps, int d) {
  const int dd = hs_dim(d);
  Eigen::MatrixXd coords(dd, ps.size() + 1);
  hs_coordinates(Eigen::MatrixXd::Identity(d, d), coords.col(0));
  for (std::size_t j = 0; j < ps.size(); ++j) hs_coordinates(ps[j].matrix(), coords.col(j + 1));
  for (Eigen::Index j = 0; j < coords.cols(); ++j) {
    const double n = coords.col(j).norm();
    if (n > 0) coords.col(j) /= n;
  }
  const Eigen::MatrixXd frame = coords * coords.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(frame);
  const double cutoff = 1e-12 * es.eigenvalues().maxCoeff();
  int r = 0;
  for (int i = 0; i < dd; ++i)
    if (es.eigenvalues()(i) > cutoff) ++r;
  return es.eigenvectors().rightCols(r);
}

}  // namespace

MeasurementSet measure(const Eigen::VectorXd& x, std::span<const SymMatrix> ps) {
  MeasurementSet m;
  m.trace_value = x.squaredNorm();
  m.dimension = static_cast<int>(x.size());
  m.matrices.assign(ps.begin(), ps.end());
  m.values.reserve(ps.size());
  for (const auto& p : ps) {
    if (p.dim() != x.size()) throw DimensionError("measure: dimension mismatch");
    m.values.push_back(x.dot(p.matrix() * x));
  }
  return m;
}

Record RecoveryResult::to_record() const {
  std::string xs;
  for (int i = 0; i < extracted_x.size(); ++i) xs += (i ? ";" : "") + fmt(extracted_x(i));
  return {{"converged", converged ? "1" : "0"},
          {"iterations", std::to_string(iterations)},
          {"feasibility_residual", fmt(feasibility_residual)},
          {"spectral_gap", fmt(spectral_gap)},
          {"extracted_x", xs}};
}

RecoveryResult solve_feasibility(const MeasurementSet& m, double tol, int max_iter,
                                 double relaxation) {
  if (m.dim() < 1) throw DimensionError("solve_feasibility: unknown dimension");
  if (m.matrices.size() != m.values.size())
    throw InvalidArgument("solve_feasibility: matrix and value counts differ");
  if (!(tol > 0)) throw InvalidArgument("solve_feasibility: tol must be > 0");
  if (max_iter < 1) throw InvalidArgument("solve_feasibility: max_iter must be >= 1");
  if (!(relaxation > 0 && relaxation < 2))
    throw InvalidArgument("solve_feasibility: relaxation must lie in (0, 2)");
  const int d = m.dim();
  require_dims(m.matrices, d, "solve_feasibility");
  const int dd = hs_dim(d);
  const int rows = static_cast<int>(m.size()) + 1;

  Eigen::MatrixXd a(rows, dd);
  Eigen::VectorXd b(rows);
  Eigen::VectorXd v(dd);
  for (int j = 0; j + 1 < rows; ++j) {
    hs_coordinates(m.matrices[j].matrix(), v);
    a.row(j) = v.transpose();
    b(j) = m.values[j];
  }
  hs_coordinates(Eigen::MatrixXd::Identity(d, d), v);
  a.row(rows - 1) = v.transpose();
  b(rows - 1) = m.trace_value;

  auto finish = [&](RecoveryResult r) {
    const auto sd = spectral_decompose(r.x_hat);
    r.spectral_gap = d > 1 ? sd.eigenvalues(0) - sd.eigenvalues(1) : sd.eigenvalues(0);
    r.extracted_x = std::sqrt(std::max(0.0, sd.eigenvalues(0))) * sd.eigenvectors.col(0);
    return r;
  };

  if (m.trace_value == 0.0) {
    // The zero matrix is the only PSD matrix with zero trace.
    const double viol = b.cwiseAbs().maxCoeff();
    if (viol > tol) throw InfeasibleError("solve_feasibility: trace 0 forces X = 0, but some b_j != 0");
    RecoveryResult r{SymMatrix::zeros(d), true, 0, viol, 0.0, Eigen::VectorXd::Zero(d)};
    return finish(std::move(r));
  }

  // Orthonormal row-space basis and the minimum-norm affine point.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a.transpose());
  qr.setThreshold(1e-11);
  const int rank = static_cast<int>(qr.rank());
  const Eigen::MatrixXd q = Eigen::MatrixXd(qr.householderQ()).leftCols(rank);
  // A = R^T Q^T with pivoting; solve for x0 = Q c with (A Q) c = b in least squares.
  const Eigen::MatrixXd aq = a * q;
  const Eigen::VectorXd c = aq.colPivHouseholderQr().solve(b);
  const Eigen::VectorXd x0 = q * c;
  const double inconsistency = (a * x0 - b).cwiseAbs().maxCoeff();
  if (inconsistency > 1e-8 * (1.0 + b.cwiseAbs().maxCoeff()))
    throw InfeasibleError("solve_feasibility: inconsistent linear constraints (residual " +
                          fmt(inconsistency) + ")");

  auto affine = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return y - q * (q.transpose() * y) + x0;
  };

  RecoveryResult res{SymMatrix::zeros(d), false, 0, 0.0, 0.0, Eigen::VectorXd()};
  Eigen::VectorXd y = x0;
  Eigen::VectorXd xv(dd);
  Eigen::MatrixXd xm(d, d);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d);
  for (int it = 1; it <= max_iter; ++it) {
    res.iterations = it;
    xm = from_hs_coordinates(d, y).matrix();
    es.compute(xm);
    if (es.info() != Eigen::Success) throw NumericalError("solve_feasibility: eigensolver failed");
    const double neg = std::max(0.0, -es.eigenvalues()(0));
    xm = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() *
         es.eigenvectors().transpose();
    hs_coordinates(xm, xv);
    const Eigen::VectorXd proj = affine(xv);
    if (neg < tol && (proj - xv).norm() < tol) {
      const double viol = (a * xv - b).cwiseAbs().maxCoeff();
      if (viol < tol) {
        res.converged = true;
        break;
      }
    }
    y = relaxation == 1.0 ? proj : Eigen::VectorXd(xv + relaxation * (proj - xv));
  }
  res.x_hat = SymMatrix(xm);
  hs_coordinates(res.x_hat.matrix(), xv);
  res.feasibility_residual = (a * xv - b).cwiseAbs().maxCoeff();
  return finish(std::move(res));
}

double recovery_error(const SymMatrix& x_hat, const Eigen::VectorXd& x) {
  const double n2 = x.squaredNorm();
  const double err = (x_hat.matrix() - x * x.transpose()).norm();
  return n2 > 0 ? err / n2 : err;
}

int max_rank(std::span<const SymMatrix> ps) {
  int k = 0;
  for (const auto& p : ps) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.matrix(), Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = es.eigenvalues().cwiseAbs();
    const double top = ev.maxCoeff();
    int r = 0;
    for (int i = 0; i < ev.size(); ++i)
      if (ev(i) > 1e-10 * top) ++r;
    k = std::max(k, r);
  }
  return k;
}

IsometryConstants isometry_constants(std::span<const SymMatrix> ps, const Eigen::VectorXd& x) {
  if (ps.empty()) throw InvalidArgument("isometry_constants: need at least one measurement");
  const TangentAnchor anchor(x);
  const int d = anchor.dim();
  require_dims(ps, d, "isometry_constants");
  const double n = static_cast<double>(ps.size());

  // Orthonormal basis of T_x: u u^T and (u v^T + v u^T)/sqrt 2 for v spanning u-perp.
  const Eigen::VectorXd& u = anchor.unit_x();
  Eigen::HouseholderQR<Eigen::MatrixXd> hh{Eigen::MatrixXd(u)};
  const Eigen::MatrixXd full = hh.householderQ();
  const Eigen::MatrixXd perp = full.rightCols(d - 1);
  const double root2 = std::sqrt(2.0);

  const int dd = hs_dim(d);
  Eigen::MatrixXd tc(d, ps.size());
  Eigen::MatrixXd fc(dd, ps.size());
  for (std::size_t j = 0; j < ps.size(); ++j) {
    const Eigen::VectorXd pu = ps[j].matrix() * u;
    tc(0, j) = u.dot(pu);
    if (d > 1) tc.col(j).tail(d - 1) = root2 * (perp.transpose() * pu);
    hs_coordinates(ps[j].matrix(), fc.col(j));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> et(Eigen::MatrixXd(tc * tc.transpose()) / n,
                                                    Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ef(Eigen::MatrixXd(fc * fc.transpose()) / n,
                                                    Eigen::EigenvaluesOnly);
  return {et.eigenvalues()(0), static_cast<double>(max_rank(ps)), ef.eigenvalues()(dd - 1)};
}

GuaranteeVerdict deterministic_guarantee(double alpha, double beta, double gamma, double delta) {
  GuaranteeVerdict v;
  if (!(alpha > 0)) {
    v.reason = "lower isometry fails (alpha <= 0)";
    v.lhs = std::numeric_limits<double>::infinity();
    return v;
  }
  if (!(beta > 0)) throw InvalidArgument("deterministic_guarantee: beta must be > 0");
  if (gamma < 0 || delta < 0) throw InvalidArgument("deterministic_guarantee: gamma, delta must be >= 0");
  v.lhs = std::sqrt(beta / alpha);
  if (delta >= 1) {
    v.rhs = 0.0;
    v.reason = "delta >= 1";
    return v;
  }
  v.rhs = gamma == 0 ? std::numeric_limits<double>::infinity() : (1 - delta) / gamma;
  v.holds = v.lhs < v.rhs;
  v.reason = v.holds ? "sqrt(beta/alpha) < (1-delta)/gamma" : "sqrt(beta/alpha) >= (1-delta)/gamma";
  return v;
}

SymMatrix r_operator(std::span<const SymMatrix> ps, const MomentCoefficients& coeffs,
                     const SymMatrix& x) {
  if (ps.empty()) throw InvalidArgument("r_operator: need at least one measurement");
  require_dims(ps, x.dim(), "r_operator");
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(x.dim(), x.dim());
  for (const auto& p : ps) acc += hs_inner(x, p) * p.matrix();
  return SymMatrix(acc * (coeffs.a1 / static_cast<double>(ps.size())));
}

double truncation_threshold(double s, int t, int k, int d, double r_rate) {
  return (s + 1.0) * t * k * std::pow(static_cast<double>(d), -r_rate);
}

SymMatrix truncated_r_with_threshold(std::span<const SymMatrix> ps, const MomentCoefficients& coeffs,
                                     const Eigen::VectorXd& unit_x, const Eigen::VectorXd& unit_z,
                                     double threshold, const SymMatrix& x) {
  if (ps.empty()) throw InvalidArgument("truncated_r: need at least one measurement");
  require_dims(ps, x.dim(), "truncated_r");
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(x.dim(), x.dim());
  for (const auto& p : ps) {
    const Eigen::MatrixXd& pm = p.matrix();
    if (unit_x.dot(pm * unit_x) > threshold || unit_z.dot(pm * unit_z) > threshold) continue;
    acc += hs_inner(x, p) * pm;
  }
  return SymMatrix(acc * (coeffs.a1 / static_cast<double>(ps.size())));
}

SymMatrix truncated_r(std::span<const SymMatrix> ps, const MomentCoefficients& coeffs,
                      const TangentAnchor& anchor, const SymMatrix& z, double s, int t,
                      double r_rate, const SymMatrix& x) {
  if (!(r_rate > 0 && r_rate <= 1)) throw InvalidArgument("truncated_r: r_rate must lie in (0, 1]");
  const TangentAnchor unit(anchor.unit_x());
  const auto factors = tangent_decompose(unit, z);
  const double thr = truncation_threshold(s, t, coeffs.k, coeffs.d, r_rate);
  return truncated_r_with_threshold(ps, coeffs, unit.unit_x(), factors.z, thr, x);
}

int golfing_depth(double c0, int d) {
  const double b = std::sqrt(2.0) / c0;
  if (!(b > 0 && b < 1))
    throw InvalidArgument("golfing: B = sqrt(2)/c0 must lie in (0, 1) for the depth log_{1/B} d");
  // exact powers (d = (1/B)^m) must not round up to m + 1
  const double levels = std::log(static_cast<double>(d)) / std::log(1.0 / b);
  return static_cast<int>(std::ceil(levels - 1e-9)) + 2;
}

int default_batch_size(int d, int t, double r_rate, double mult) {
  const double n = mult * 3.0 * t * std::pow(static_cast<double>(d), 2.0 - r_rate) *
                   std::log(static_cast<double>(d));
  return std::max(1, static_cast<int>(std::ceil(n)));
}

Record CertificateReport::to_record() const {
  return {{"gamma_measured", fmt(gamma_measured)},
          {"delta_measured", fmt(delta_measured)},
          {"in_span", in_span ? "1" : "0"},
          {"batches_used", std::to_string(batches_used)},
          {"depth", std::to_string(depth)},
          {"batch_size", std::to_string(batch_size)},
          {"repeats", join(repeats)},
          {"q_norms", join(q_norms)}};
}

CertificateReport golfing_certificate(const Eigen::VectorXd& x, const AtomSource& source,
                                      const GolfingParams& params, Rng& rng) {
  const TangentAnchor anchor(x);
  const int d = anchor.dim();
  const Spectrum& lambda = source.spectrum();
  if (lambda.dim() != d) throw DimensionError("golfing_certificate: dimension mismatch");
  if (params.t < 1) throw InvalidArgument("golfing_certificate: t must be >= 1");
  if (params.max_repeats < 1) throw InvalidArgument("golfing_certificate: max_repeats must be >= 1");
  const int depth = golfing_depth(params.c0, d);
  const double a_bound = 1.0 / params.c0;
  const double b_bound = std::sqrt(2.0) * a_bound;
  const double s = params.s > 0 ? params.s : params.c0;
  const double r_rate = params.r_rate > 0 ? params.r_rate : 1.0 - 2.0 / params.t;
  if (!(r_rate > 0 && r_rate <= 1))
    throw InvalidArgument("golfing_certificate: truncation rate must lie in (0, 1] (t >= 3 for the default)");
  const int batch = params.batch_size > 0 ? params.batch_size
                                          : default_batch_size(d, params.t, r_rate, params.batch_mult);
  const auto coeffs = MomentCoefficients::from_spectrum(lambda);
  const double threshold = truncation_threshold(s, params.t, lambda.rank(), d, r_rate);

  const Eigen::VectorXd& u = anchor.unit_x();
  const TangentAnchor unit(u);
  const SymMatrix target = SymMatrix::outer(u);

  CertificateReport rep;
  rep.depth = depth;
  rep.batch_size = batch;
  SymMatrix y = SymMatrix::zeros(d);
  SymMatrix q = target;
  rep.q_norms.push_back(q.frobenius_norm());
  for (int stage = 1; stage <= depth; ++stage) {
    const double qn = q.frobenius_norm();
    if (qn == 0.0) {
      // Exact certificate already; later stages are no-ops.
      rep.repeats.push_back(0);
      rep.q_norms.push_back(0.0);
      continue;
    }
    const auto factors = tangent_decompose(unit, q);
    int redraws = 0;
    while (true) {
      auto atoms = source.draw(static_cast<std::size_t>(batch), rng);
      ++rep.batches_used;
      const SymMatrix w = s_map(coeffs, truncated_r_with_threshold(atoms, coeffs, u, factors.z,
                                                                   threshold, q));
      const SymMatrix w_t = tangent_project(unit, w);
      const bool perp_ok = operator_norm(w - w_t) <= a_bound * qn;
      const bool tan_ok = (w_t - q).frobenius_norm() <= b_bound * qn;
      if (perp_ok && tan_ok) {
        y = y + w;
        q = target - tangent_project(unit, y);
        for (auto& p : atoms) rep.atoms.push_back(std::move(p));
        break;
      }
      if (++redraws >= params.max_repeats)
        throw GolfingError("golfing_certificate: stage " + std::to_string(stage) + " failed " +
                               std::to_string(redraws) + " batches of " + std::to_string(batch) +
                               " (last: perp " + (perp_ok ? "ok" : "fail") + ", tangent " +
                               (tan_ok ? "ok" : "fail") + ")",
                           stage, redraws);
    }
    rep.repeats.push_back(redraws);
    rep.q_norms.push_back(q.frobenius_norm());
  }
  rep.y = y;
  const auto check = check_certificate(y, u, rep.atoms, 0.0, 0.0);
  rep.gamma_measured = check.gamma_measured;
  rep.delta_measured = check.delta_measured;
  rep.in_span = check.in_span;
  return rep;
}

CertificateCheck check_certificate(const SymMatrix& y, const Eigen::VectorXd& x,
                                   std::span<const SymMatrix> ps, double gamma, double delta) {
  const TangentAnchor anchor(x);
  const int d = anchor.dim();
  if (y.dim() != d) throw DimensionError("check_certificate: dimension mismatch");
  require_dims(ps, d, "check_certificate");
  const SymMatrix yt = tangent_project(anchor, y);
  CertificateCheck out;
  out.gamma_measured = (yt - SymMatrix::outer(x)).frobenius_norm();
  out.delta_measured = operator_norm(y - yt);
  const Eigen::MatrixXd basis = span_basis(ps, d);
  const Eigen::VectorXd yv = hs_coordinates(y);
  const double resid = (yv - basis * (basis.transpose() * yv)).norm();
  out.in_span = resid <= 1e-8 * std::max(1.0, yv.norm());
  out.passes = out.in_span && out.gamma_measured <= gamma && out.delta_measured <= delta;
  return out;
}

}  // namespace grassrec
