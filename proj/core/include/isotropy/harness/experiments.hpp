#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "isotropy/harness/config.hpp"
#include "isotropy/harness/table.hpp"
#include "isotropy/random_stream.hpp"
#include "isotropy/samplers.hpp"

namespace isotropy::harness {

/// An experiment could not complete; carries the config point it failed at.
class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  /// Appends a wall_seconds column. Off by default so output stays
  /// byte-identical across runs.
  bool timing = false;
};

struct ExperimentResult {
  Table table;
  /// 0 on success, 1 when the experiment failed as a whole.
  int exit_code = 0;
  std::string message;
};

/// Sampler named by a source string:
///   cube | ball | simplex              exact uniform, isotropic scale
///   hit-and-run:<cube|ball|simplex>    same body through hit-and-run
///   john:<crosspolytope|cubevertices|simplex>
///   hpolytope:<path>                   hit-and-run from the origin
Sampler make_source(const std::string& source, std::size_t n);

/// Body named by a source string (the body forms above).
Body make_body(const std::string& source, std::size_t n);

/// ceil(C0 (R^2 n / eps^2) ln(R^2 n / eps^2)).
std::size_t truncated_sample_size(std::size_t n, double r, double eps, double c0);

/// Stream for one (experiment, config point, seed) triple under the
/// run-level seed.
RandomStream point_stream(const ExperimentConfig& cfg, std::size_t point_index, std::uint64_t seed);

/// Runs fn(0..count-1) on up to `threads` workers; results come back in
/// index order. The first failing index (lowest) is rethrown.
template <class T>
std::vector<T> parallel_map(std::size_t count, std::size_t threads, const std::function<T(std::size_t)>& fn) {
  std::vector<T> results(count);
  std::vector<std::exception_ptr> errors(count);
  auto work = [&](std::size_t worker, std::size_t stride) {
    for (std::size_t i = worker; i < count; i += stride) {
      try {
        results[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, count));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

Table run_sweep(const ExperimentConfig& cfg, RunOptions options = {});
Table run_whiten(const ExperimentConfig& cfg, RunOptions options = {});
Table run_truncated(const ExperimentConfig& cfg, RunOptions options = {});
ExperimentResult run_john(const ExperimentConfig& cfg, RunOptions options = {});
Table run_bernoulli(const ExperimentConfig& cfg, RunOptions options = {});

/// Dispatches on cfg.kind (including the check suite).
ExperimentResult run_experiment(const ExperimentConfig& cfg, RunOptions options = {});

}  // namespace isotropy::harness
