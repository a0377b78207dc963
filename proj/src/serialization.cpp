#include "grassrec/serialization.hpp"

#include "grassrec/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace grassrec {

namespace {

void write_row(std::ostream& out, double lead, const SymMatrix& m) {
  out << lead;
  for (double v : m.upper()) out << ' ' << v;
  out << '\n';
}

template <typename T>
T read_value(std::istream& in, const char* what) {
  T v{};
  if (!(in >> v)) throw InvalidArgument(std::string("parse error: expected ") + what);
  return v;
}

// Reads one row: leading scalar then hs_dim(d) entries.
std::pair<double, SymMatrix> read_row(std::istream& in, int d, std::size_t row) {
  const std::string tag = "row " + std::to_string(row + 1);
  const double lead = read_value<double>(in, tag.c_str());
  std::vector<double> upper(hs_dim(d));
  for (auto& u : upper) u = read_value<double>(in, tag.c_str());
  return {lead, SymMatrix::from_upper(d, upper)};
}

void require_end(std::istream& in) {
  std::string extra;
  if (in >> extra) throw InvalidArgument("parse error: trailing content '" + extra + "'");
}

}  // namespace

void write_ensemble(std::ostream& out, const WeightedEnsemble& ens, int claimed_strength) {
  const auto old = out.precision(17);
  out << ens.dim() << ' ' << ens.spectrum().rank() << ' ' << claimed_strength << ' ' << ens.size()
      << '\n';
  for (std::size_t i = 0; i < ens.size(); ++i) write_row(out, ens.weights()[i], ens.atoms()[i]);
  out.precision(old);
}

Spectrum spectrum_from_atom(const SymMatrix& atom, int rank) {
  const auto sd = spectral_decompose(atom);
  std::vector<double> vals(sd.eigenvalues.data(), sd.eigenvalues.data() + sd.eigenvalues.size());
  for (auto& v : vals) {
    if (std::abs(v) <= 1e-10) v = 0.0;
    if (std::abs(v - 1.0) <= 1e-10) v = 1.0;
  }
  const int r = static_cast<int>(std::count_if(vals.begin(), vals.end(), [](double v) { return v > 0; }));
  if (r != rank)
    throw InvalidArgument("ensemble file: atom rank " + std::to_string(r) +
                          " differs from header k = " + std::to_string(rank));
  return Spectrum(std::move(vals));
}

EnsembleFile read_ensemble(std::istream& in) {
  const int d = read_value<int>(in, "d");
  const int k = read_value<int>(in, "k");
  const int t = read_value<int>(in, "t_claimed");
  const long long n = read_value<long long>(in, "n_atoms");
  if (d < 1 || k < 1 || k > d) throw InvalidArgument("ensemble file: need 1 <= k <= d");
  if (t < 0) throw InvalidArgument("ensemble file: t_claimed must be >= 0");
  if (n < 1) throw InvalidArgument("ensemble file: n_atoms must be >= 1");
  std::vector<double> weights;
  std::vector<SymMatrix> atoms;
  weights.reserve(n);
  atoms.reserve(n);
  for (long long i = 0; i < n; ++i) {
    auto [w, a] = read_row(in, d, static_cast<std::size_t>(i));
    weights.push_back(w);
    atoms.push_back(std::move(a));
  }
  require_end(in);
  Spectrum lambda = spectrum_from_atom(atoms.front(), k);
  return {WeightedEnsemble(std::move(lambda), std::move(atoms), std::move(weights)), t};
}

void save_ensemble(const std::filesystem::path& path, const WeightedEnsemble& ens,
                   int claimed_strength) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open '" + path.string() + "' for writing");
  write_ensemble(out, ens, claimed_strength);
  if (!out) throw InvalidArgument("write to '" + path.string() + "' failed");
}

EnsembleFile load_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
  return read_ensemble(in);
}

void write_measurements(std::ostream& out, const MeasurementSet& m) {
  const auto old = out.precision(17);
  out << m.dim() << ' ' << (m.matrices.empty() ? 0 : max_rank(m.matrices)) << ' ' << m.size() << ' ' << m.trace_value << '\n';
  for (std::size_t j = 0; j < m.size(); ++j) write_row(out, m.values[j], m.matrices[j]);
  out.precision(old);
}

MeasurementSet read_measurements(std::istream& in) {
  const int d = read_value<int>(in, "d");
  read_value<int>(in, "k");
  const long long n = read_value<long long>(in, "n");
  MeasurementSet m;
  m.trace_value = read_value<double>(in, "trace_value");
  m.dimension = d;
  if (d < 1 || n < 0) throw InvalidArgument("measurement file: need d >= 1 and n >= 0");
  for (long long j = 0; j < n; ++j) {
    auto [b, p] = read_row(in, d, static_cast<std::size_t>(j));
    m.values.push_back(b);
    m.matrices.push_back(std::move(p));
  }
  require_end(in);
  return m;
}

}  // namespace grassrec
