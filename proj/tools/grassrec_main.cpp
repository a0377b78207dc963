#include "grassrec/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace grassrec::cli;

int main(int argc, char** argv) {
  CLI::App app{"grassrec: phase retrieval from random projections onto Grassmannian orbits"};
  app.require_subcommand(1);

  MomentsOptions mo;
  auto* moments = app.add_subcommand("moments", "analytic vs Monte Carlo trace moments");
  moments->add_option("--d", mo.d, "dimension");
  moments->add_option("--lambda", mo.lambda, "e1, projector:K or comma-separated values");
  moments->add_option("--t", mo.t, "moment degree");
  moments->add_option("--n-mc", mo.n_mc, "Monte Carlo draws");
  moments->add_option("--seed", mo.seed);

  BuildOptions bo;
  auto* build = app.add_subcommand("build", "construct a finite cubature and write it");
  build->add_option("--d", bo.d);
  build->add_option("--lambda", bo.lambda);
  build->add_option("--t", bo.t, "strength");
  build->add_option("--pool", bo.pool, "Haar pool size (default: three times the required size)");
  build->add_option("--residual", bo.residual, "target verification residual");
  build->add_option("--out", bo.out_path)->required();
  build->add_option("--seed", bo.seed);

  VerifyOptions vo;
  auto* verify = app.add_subcommand("verify", "check the strength of an ensemble file");
  verify->add_option("path", vo.path)->required();
  verify->add_option("--t", vo.t, "strength to check (default: claimed)");
  verify->add_option("--mode", vo.mode, "auto, exact, randomized or tight");
  verify->add_option("--tol", vo.tol);
  verify->add_option("--probes", vo.probes);
  verify->add_option("--seed", vo.seed);

  RecoverOptions ro;
  auto* recover = app.add_subcommand("recover", "one recovery from n random measurements");
  recover->add_option("--d", ro.d);
  recover->add_option("--k", ro.k);
  recover->add_option("--n", ro.n)->required();
  recover->add_option("--ensemble", ro.ensemble, "haar or an ensemble file");
  recover->add_option("--seed", ro.seed);
  recover->add_option("--tol", ro.tol);
  recover->add_option("--max-iter", ro.max_iter);
  recover->add_option("--success-tol", ro.success_tol);
  recover->add_option("--save-measurements", ro.save_measurements);

  CertifyOptions co;
  auto* certify = app.add_subcommand("certify", "golfing certificate diagnostics");
  certify->add_option("--d", co.d)->required();
  certify->add_option("--k", co.k);
  certify->add_option("--c0", co.c0);
  certify->add_option("--batch-mult", co.batch_mult);
  certify->add_option("--batch-size", co.batch_size);
  certify->add_option("--t", co.t);
  certify->add_option("--max-repeats", co.max_repeats);
  certify->add_option("--seed", co.seed);
  certify->add_option("--tol", co.tol);

  SweepOptions so;
  auto* sweep = app.add_subcommand("sweep", "phase-transition sweep to CSV");
  sweep->add_option("config", so.config_path)->required();
  sweep->add_option("--out", so.out_csv, "CSV path, - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  return guarded(
      [&] {
        if (*moments) return cmd_moments(mo, std::cout);
        if (*build) return cmd_build(bo, std::cout);
        if (*verify) return cmd_verify(vo, std::cout);
        if (*recover) return cmd_recover(ro, std::cout);
        if (*certify) return cmd_certify(co, std::cout);
        return cmd_sweep(so, std::cout);
      },
      std::cerr);
}
