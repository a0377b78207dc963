#pragma once

#include "grassrec/cubature.hpp"
#include "grassrec/recover.hpp"

#include <filesystem>
#include <iosfwd>

namespace grassrec {

// Ensemble text format:
//   d k t_claimed n_atoms
//   weight u_11 u_12 ... u_1d u_22 ... u_dd      (one line per atom)
// Numbers are written with 17 significant digits so a round trip is exact.
//
// Measurement text format:
//   d k n trace_value
//   b_j u_11 ... u_dd                              (one line per measurement)
// k is the largest numerical rank among the measurement matrices.

struct EnsembleFile {
  WeightedEnsemble ensemble;
  int claimed_strength = 0;
};

void write_ensemble(std::ostream& out, const WeightedEnsemble& ens, int claimed_strength);
EnsembleFile read_ensemble(std::istream& in);
void save_ensemble(const std::filesystem::path& path, const WeightedEnsemble& ens,
                   int claimed_strength);
EnsembleFile load_ensemble(const std::filesystem::path& path);

void write_measurements(std::ostream& out, const MeasurementSet& m);
MeasurementSet read_measurements(std::istream& in);

/// Spectrum recovered from a serialized atom: eigenvalues sorted, entries
/// within 1e-10 of 0 or 1 snapped to those values.
Spectrum spectrum_from_atom(const SymMatrix& atom, int rank);

}  // namespace grassrec
