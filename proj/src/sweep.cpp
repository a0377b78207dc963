#include "grassrec/sweep.hpp"

#include "grassrec/error.hpp"
#include "grassrec/serialization.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace grassrec {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& s) {
  std::istringstream is(s);
  T v{};
  if (!(is >> v) || !(is >> std::ws).eof())
    throw InvalidArgument("config: bad value for " + key + ": '" + s + "'");
  return v;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& s) {
  std::vector<T> out;
  for (const auto& item : split(s)) out.push_back(parse_number<T>(key, item));
  return out;
}

bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw InvalidArgument("config: bad boolean for " + key + ": '" + s + "'");
}

Spectrum cell_spectrum(const SweepConfig& cfg, int d, int k) {
  if (cfg.lambda_values) return Spectrum(*cfg.lambda_values);
  return Spectrum::projector(d, k);
}

struct Cell {
  int d, k, t;
  AtomSource source;
};

Cell make_cell(const SweepConfig& cfg, int d, int k) {
  Spectrum lambda = cell_spectrum(cfg, d, k);
  if (cfg.ensemble_source == "haar") return {d, k, 0, AtomSource::haar(std::move(lambda))};
  if (cfg.ensemble_source == "file") {
    auto file = load_ensemble(cfg.ensemble_file);
    if (file.ensemble.dim() != d || file.ensemble.spectrum().values() != lambda.values())
      throw InvalidArgument("config: ensemble file spectrum does not match cell d=" +
                            std::to_string(d) + " k=" + std::to_string(k));
    return {d, k, file.claimed_strength, AtomSource::from_ensemble(std::move(file.ensemble))};
  }
  Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(k),
                                 0x6275696c64ULL}));
  const int pool = cfg.build_pool > 0 ? cfg.build_pool
                                      : static_cast<int>(default_pool_size(lambda, cfg.build_t));
  auto res = construct_cubature(lambda, cfg.build_t, pool, cfg.build_residual, rng);
  return {d, k, cfg.build_t, AtomSource::from_ensemble(std::move(res.ensemble))};
}

}  // namespace

SweepConfig SweepConfig::parse(std::istream& in) {
  SweepConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "d_list") cfg.d_list = parse_list<int>(key, val);
    else if (key == "k_list") cfg.k_list = parse_list<int>(key, val);
    else if (key == "n_list") cfg.n_list = parse_list<int>(key, val);
    else if (key == "n_scale") {
      if (val != "absolute" && val != "per_d") throw InvalidArgument("config: n_scale must be absolute or per_d");
      cfg.n_per_d = val == "per_d";
    } else if (key == "lambda_profile") {
      if (val == "projector") cfg.lambda_values.reset();
      else cfg.lambda_values = parse_list<double>(key, val);
    } else if (key == "trials") cfg.trials = parse_number<int>(key, val);
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, val);
    else if (key == "solver_tol") cfg.solver_tol = parse_number<double>(key, val);
    else if (key == "max_iter") cfg.max_iter = parse_number<int>(key, val);
    else if (key == "success_tol") cfg.success_tol = parse_number<double>(key, val);
    else if (key == "ensemble_source") cfg.ensemble_source = val;
    else if (key == "ensemble_file") cfg.ensemble_file = val;
    else if (key == "build_t") cfg.build_t = parse_number<int>(key, val);
    else if (key == "build_pool") cfg.build_pool = parse_number<int>(key, val);
    else if (key == "build_residual") cfg.build_residual = parse_number<double>(key, val);
    else if (key == "workers") cfg.workers = parse_number<int>(key, val);
    else if (key == "record_timing") cfg.record_timing = parse_bool(key, val);
    else throw InvalidArgument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

SweepConfig SweepConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config '" + path + "'");
  return parse(in);
}

void SweepConfig::validate() const {
  if (d_list.empty() || n_list.empty()) throw InvalidArgument("config: d_list and n_list must be nonempty");
  if (!lambda_values && k_list.empty()) throw InvalidArgument("config: k_list must be nonempty");
  if (trials < 1) throw InvalidArgument("config: trials must be >= 1");
  for (int n : n_list)
    if (n < 1) throw InvalidArgument("config: n entries must be >= 1");
  for (int d : d_list) {
    if (d < 2) throw InvalidArgument("config: d entries must be >= 2");
    if (lambda_values && static_cast<int>(lambda_values->size()) != d)
      throw InvalidArgument("config: explicit lambda_profile has " +
                            std::to_string(lambda_values->size()) + " values but d = " + std::to_string(d));
    if (!lambda_values)
      for (int k : k_list)
        if (k < 1 || k >= d) throw InvalidArgument("config: need 1 <= k < d");
  }
  if (!(solver_tol > 0) || max_iter < 1 || !(success_tol > 0))
    throw InvalidArgument("config: solver_tol, max_iter and success_tol must be positive");
  if (ensemble_source != "haar" && ensemble_source != "file" && ensemble_source != "build")
    throw InvalidArgument("config: ensemble_source must be haar, file or build");
  if (ensemble_source == "file" && ensemble_file.empty())
    throw InvalidArgument("config: ensemble_source = file needs ensemble_file");
  if (workers < 1) throw InvalidArgument("config: workers must be >= 1");
}

SweepRow run_trial(const SweepConfig& cfg, const AtomSource& source, int d, int k, int n, int t,
                   int trial) {
  const auto start = std::chrono::steady_clock::now();
  SweepRow row{d, k, n, t, trial};
  row.seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(k),
                                    static_cast<std::uint64_t>(trial)});
  Rng rng(row.seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd x(d);
  for (int i = 0; i < d; ++i) x(i) = normal(rng);
  const auto ps = source.draw(static_cast<std::size_t>(n), rng);
  const auto m = measure(x, ps);
  const auto res = solve_feasibility(m, cfg.solver_tol, cfg.max_iter);
  row.residual = recovery_error(res.x_hat, x);
  row.success = row.residual <= cfg.success_tol;
  row.iterations = res.iterations;
  const auto iso = isometry_constants(ps, x);
  row.alpha = iso.alpha;
  row.beta_exact = iso.beta_exact;
  if (cfg.record_timing)
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  struct Task {
    std::size_t cell;
    int n, trial;
  };
  std::vector<Cell> cells;
  std::vector<Task> tasks;
  for (int d : cfg.d_list) {
    const std::vector<int> ks = cfg.lambda_values ? std::vector<int>{cell_spectrum(cfg, d, 0).rank()}
                                                  : cfg.k_list;
    for (int k : ks) {
      cells.push_back(make_cell(cfg, d, k));
      for (int n : cfg.n_list)
        for (int trial = 0; trial < cfg.trials; ++trial)
          tasks.push_back({cells.size() - 1, cfg.n_per_d ? n * d : n, trial});
    }
  }

  std::vector<SweepRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        const Cell& c = cells[tasks[i].cell];
        rows[i] = run_trial(cfg, c.source, c.d, c.k, tasks[i].n, c.t, tasks[i].trial);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = tasks.size();
      }
    }
  };
  const int nthreads = std::min<int>(cfg.workers, static_cast<int>(tasks.size()));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  const auto old = out.precision(10);
  out << kSweepHeader << '\n';
  for (const auto& r : rows)
    out << r.d << ',' << r.k << ',' << r.n << ',' << r.t << ',' << r.trial << ',' << r.seed << ','
        << (r.success ? 1 : 0) << ',' << r.residual << ',' << r.iterations << ',' << r.alpha << ','
        << r.beta_exact << ',' << r.wall_ms << '\n';
  out.precision(old);
}

}  // namespace grassrec
