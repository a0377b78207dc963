#pragma once

#include "grassrec/cubature.hpp"
#include "grassrec/recover.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace grassrec {

// Flat `key = value` configuration. Lists are comma separated; '#' starts a
// comment. Keys:
//   d_list, k_list, n_list      integer lists
//   n_scale                     absolute | per_d   (per_d multiplies n by d)
//   lambda_profile              projector | v1,v2,...   (explicit values fix d)
//   trials, seed
//   solver_tol, max_iter, success_tol
//   ensemble_source             haar | file | build
//   ensemble_file               path, for ensemble_source = file
//   build_t, build_pool, build_residual   for ensemble_source = build
//   workers                     worker threads (results are ordered anyway)
//   record_timing               false by default so output is byte-stable
struct SweepConfig {
  std::vector<int> d_list;
  std::vector<int> k_list;
  std::vector<int> n_list;
  bool n_per_d = false;
  std::optional<std::vector<double>> lambda_values;  // empty means projector
  int trials = 1;
  std::uint64_t seed = 0;
  double solver_tol = 1e-7;
  int max_iter = 5000;
  double success_tol = 1e-4;
  std::string ensemble_source = "haar";
  std::string ensemble_file;
  int build_t = 3;
  int build_pool = 0;  // 0 means default_pool_size
  double build_residual = 1e-8;
  int workers = 1;
  bool record_timing = false;

  static SweepConfig parse(std::istream& in);
  static SweepConfig load(const std::string& path);
  void validate() const;
};

struct SweepRow {
  int d = 0;
  int k = 0;
  int n = 0;
  int t = 0;  // strength of the measurement ensemble, 0 for Haar
  int trial = 0;
  std::uint64_t seed = 0;
  bool success = false;
  double residual = 0.0;  // ||X_hat - x x^T||_F / ||x||^2
  int iterations = 0;
  double alpha = 0.0;
  double beta_exact = 0.0;
  double wall_ms = 0.0;
};

inline constexpr const char* kSweepHeader =
    "d,k,n,t,trial,seed,success,residual,iterations,alpha,beta_exact,wall_ms";

/// One recovery trial. The trial stream is derive_seed(seed, {d, k, trial}),
/// shared across n: the signal and the first n measurements are the same for
/// every n, so success curves compare nested measurement sets.
SweepRow run_trial(const SweepConfig& cfg, const AtomSource& source, int d, int k, int n, int t,
                   int trial);

/// All trials in (d, k, n, trial) order.
std::vector<SweepRow> run_sweep(const SweepConfig& cfg);

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace grassrec
