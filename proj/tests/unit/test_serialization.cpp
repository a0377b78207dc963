#include "helpers.hpp"

#include "grassrec/error.hpp"
#include "grassrec/serialization.hpp"

#include <doctest.h>

#include <sstream>

using namespace grassrec;

TEST_CASE("ensemble round trip is bit stable") {
  Rng rng(51);
  const auto res = construct_cubature(Spectrum::e1(3), 2, 80, 1e-10, rng);
  std::ostringstream a;
  write_ensemble(a, res.ensemble, 2);
  std::istringstream in(a.str());
  const auto back = read_ensemble(in);
  CHECK(back.claimed_strength == 2);
  REQUIRE(back.ensemble.size() == res.ensemble.size());
  for (std::size_t i = 0; i < back.ensemble.size(); ++i) {
    CHECK(back.ensemble.weights()[i] == res.ensemble.weights()[i]);
    CHECK(back.ensemble.atoms()[i].matrix() == res.ensemble.atoms()[i].matrix());
  }
  std::ostringstream b;
  write_ensemble(b, back.ensemble, 2);
  CHECK(a.str() == b.str());
  CHECK(back.ensemble.spectrum().values() == std::vector<double>{1, 0, 0});
}

TEST_CASE("ensemble header format") {
  Rng rng(52);
  const Spectrum lambda = Spectrum::projector(3, 2);
  const WeightedEnsemble ens(lambda, {haar_sample(lambda, rng)}, {1.0});
  std::ostringstream os;
  write_ensemble(os, ens, 1);
  std::istringstream in(os.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "3 2 1 1");
  std::string row;
  std::getline(in, row);
  std::istringstream rs(row);
  int count = 0;
  double v;
  while (rs >> v) ++count;
  CHECK(count == 1 + 6);
}

TEST_CASE("malformed ensemble files") {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return read_ensemble(in);
  };
  CHECK_THROWS_AS(parse(""), InvalidArgument);
  CHECK_THROWS_AS(parse("2 1 1 1\n1.0 1 0"), InvalidArgument);
  CHECK_THROWS_AS(parse("2 1 1 1\n1.0 1 0 0 7"), InvalidArgument);
  CHECK_THROWS_AS(parse("2 3 1 1\n1.0 1 0 0"), InvalidArgument);
  // Rank in the header disagrees with the atom.
  CHECK_THROWS_AS(parse("2 2 1 1\n1.0 1 0 0"), InvalidArgument);
  // Weights must sum to one.
  CHECK_THROWS_AS(parse("2 1 1 2\n0.5 1 0 0\n0.6 0 0 1"), InvalidArgument);
  CHECK_NOTHROW(parse("2 1 1 2\n0.5 1 0 0\n0.5 0 0 1"));
}

TEST_CASE("measurement round trip") {
  Rng rng(53);
  const Eigen::VectorXd x = testutil::random_vector(4, rng);
  std::vector<SymMatrix> ps;
  for (int i = 0; i < 5; ++i) ps.push_back(haar_sample(Spectrum::projector(4, 2), rng));
  const auto m = measure(x, ps);
  std::ostringstream os;
  write_measurements(os, m);
  CHECK(os.str().rfind("4 2 5 ", 0) == 0);
  std::istringstream in(os.str());
  const auto back = read_measurements(in);
  CHECK(back.trace_value == m.trace_value);
  CHECK(back.values == m.values);
  for (std::size_t j = 0; j < m.size(); ++j) CHECK(back.matrices[j].matrix() == m.matrices[j].matrix());

  const auto trace_only = measure(x, std::vector<SymMatrix>{});
  std::ostringstream os2;
  write_measurements(os2, trace_only);
  std::istringstream in2(os2.str());
  CHECK(read_measurements(in2).dim() == 4);
}

TEST_CASE("spectrum recovered from an atom snaps to 0 and 1") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
  m(0, 0) = 1 + 1e-12;
  m(1, 1) = 5e-11;
  const auto s = spectrum_from_atom(SymMatrix(m), 1);
  CHECK(s.values() == std::vector<double>{1, 0, 0});
  CHECK_THROWS_AS(spectrum_from_atom(SymMatrix(m), 2), InvalidArgument);
}
