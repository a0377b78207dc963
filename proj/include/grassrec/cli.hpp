#pragma once

#include "grassrec/cubature.hpp"
#include "grassrec/error.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>

namespace grassrec::cli {

// Bad flags or flag combinations. Reported as `error: ...` with exit code 2;
// every other failure exits 1.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// "e1", "projector:K" or an explicit comma-separated list. d = 0 infers the
/// dimension from the list; named profiles need d.
Spectrum parse_spectrum(const std::string& text, int d);

struct MomentsOptions {
  int d = 0;
  std::string lambda = "e1";
  int t = 2;
  int n_mc = 100000;
  std::uint64_t seed = 1;
};

struct BuildOptions {
  int d = 0;
  std::string lambda = "e1";
  int t = 2;
  int pool = 0;  // 0 means default_pool_size
  double residual = 1e-8;
  std::string out_path;
  std::uint64_t seed = 1;
};

struct VerifyOptions {
  std::string path;
  int t = 0;  // 0 means the claimed strength in the file
  std::string mode = "auto";  // auto | exact | randomized | tight
  double tol = 1e-8;
  int probes = 200;
  std::uint64_t seed = 1;
};

struct RecoverOptions {
  int d = 0;
  int k = 1;
  int n = 0;
  std::string ensemble = "haar";  // haar or an ensemble file
  std::uint64_t seed = 1;
  double tol = 1e-7;
  int max_iter = 5000;
  double success_tol = 1e-4;
  std::string save_measurements;
};

struct CertifyOptions {
  int d = 0;
  int k = 1;
  double c0 = 10.0;
  double batch_mult = 1.0;
  int batch_size = 0;
  int t = 3;
  int max_repeats = 20;
  std::uint64_t seed = 1;
  double tol = 1e-9;
};

struct SweepOptions {
  std::string config_path;
  std::string out_csv = "-";
};

int cmd_moments(const MomentsOptions& o, std::ostream& out);
int cmd_build(const BuildOptions& o, std::ostream& out);
int cmd_verify(const VerifyOptions& o, std::ostream& out);
int cmd_recover(const RecoverOptions& o, std::ostream& out);
int cmd_certify(const CertifyOptions& o, std::ostream& out);
int cmd_sweep(const SweepOptions& o, std::ostream& out);

/// Runs a command, mapping UsageError to exit 2 and any other exception to
/// exit 1, with a single `error: ...` line on err.
int guarded(const std::function<int()>& fn, std::ostream& err);

}  // namespace grassrec::cli
