#pragma once

#include <string>
#include <vector>

#include "ssdu/csv.hpp"
#include "ssdu/dataset.hpp"
#include "ssdu/metrics.hpp"
#include "ssdu/training.hpp"

namespace ssdu {

// Desk-scale benchmark defaults. Each seed drives an independent replicate:
// its own phantoms, noise, masks, weight init and epoch shuffles. The data
// regime is deliberately scarce (R=8, six training slices) so the
// saturation of multi-mask training at large K is visible on a CPU budget.
struct BenchmarkConfig {
  int n = 32;
  int ncoils = 4;
  int ntrain = 6;
  int ntest = 8;
  UndersamplingSpec spec{8, 4, 2, 1, 8, 8};
  double sigma = 0.02;
  int epochs = 40;
  double lr = 5e-4;
  int t_unroll = 5;
  int cg_iters = 10;
  double cg_tol = 1e-6;
  int channels = 16;
  int blocks = 3;
  double rho = 0.4;
  int k = 5;
  double cgsense_l2 = 1e-3;
  int cgsense_iters = 30;
  std::vector<uint64_t> seeds = {1, 2, 3};

  UnrollConfig unroll() const;
  TrainConfig train_config(const std::string& method, uint64_t seed) const;
};

// Recognized method names: cgsense, supervised, ssdu, multimask, cyclic,
// multimask-gaussian.
bool method_needs_training(const std::string& method);

PhantomSet benchmark_phantoms(const BenchmarkConfig& bench, uint64_t seed);

struct TrainedModel {
  NetworkParams params;
  UnrollConfig unroll;
};

TrainedModel train_method(const PhantomSet& set, const std::string& method,
                          const BenchmarkConfig& bench, uint64_t seed);

// NMSE/SSIM of a trained model (or cgsense) over the held-out slices.
MetricReport eval_method(const PhantomSet& set, const std::string& method,
                         const BenchmarkConfig& bench, const TrainedModel* model);

MetricReport eval_zero_filled(const PhantomSet& set);

struct SweepConfig {
  enum class Axis { K, Rho };
  Axis axis = Axis::K;
  std::vector<double> values;
  BenchmarkConfig bench;
};

struct SweepRow {
  double value = 0.0;
  uint64_t seed = 0;
  bool ok = false;
  std::string error;
  MetricReport report;
};

// Trains one model per (value, seed) and evaluates on the held-out slices.
// Failures are recorded per row instead of aborting the sweep.
std::vector<SweepRow> run_sweep(const SweepConfig& cfg);

struct CompareRow {
  std::string method;
  uint64_t seed = 0;
  bool ok = false;
  std::string error;
  MetricReport report;
};

std::vector<CompareRow> compare_methods(const BenchmarkConfig& bench,
                                        const std::vector<std::string>& methods);

CsvTable sweep_csv(const SweepConfig& cfg, const std::vector<SweepRow>& rows);
CsvTable compare_csv(const std::vector<CompareRow>& rows);

}  // namespace ssdu
