#pragma once

#include <string>
#include <vector>

#include "ssdu/adam.hpp"
#include "ssdu/dataset.hpp"
#include "ssdu/sampling.hpp"
#include "ssdu/solver.hpp"

namespace ssdu {

enum class TrainMode { Supervised, SSDU, MultiMaskSSDU, CyclicMultiMask };

std::string to_string(TrainMode mode);
TrainMode train_mode_from_string(const std::string& s);

struct TrainConfig {
  int epochs = 30;
  double lr = 5e-4;
  TrainMode mode = TrainMode::MultiMaskSSDU;
  int k = 5;
  double rho = 0.4;
  MaskDistribution dist = MaskDistribution::uniform();
  UnrollConfig unroll;
  uint64_t seed = 1;
  int channels = 16;
  int blocks = 3;
  // ablation: redraw the splits every epoch instead of freezing them
  bool resample_masks_each_epoch = false;
  // exact no-leakage check of the DC input at every step
  bool paranoid_checks = false;

  int effective_k() const;
  void validate() const;
};

struct TrainLogRow {
  int epoch = 0;
  int step = 0;
  double loss = 0.0;
};

struct TrainResult {
  NetworkParams params;
  std::vector<double> epoch_mean_loss;
  std::vector<TrainLogRow> rows;
  int steps_per_epoch = 0;
};

// Divides each sample's k-space (and its reference, when present) by the
// sample's own max |value|; the factor lands in KSpaceSample::scale.
std::vector<TrainingSample> normalize_dataset(std::vector<TrainingSample> samples);
TrainingSample un_normalize(TrainingSample s);

// Generates frozen partitions for samples that lack them; validates k for
// samples that already carry one.
void prepare_partitions(std::vector<TrainingSample>& samples, const TrainConfig& cfg);

// Single entry point; the mode-named wrappers below enforce the
// mode-specific preconditions and share this loop.
TrainResult train(std::vector<TrainingSample> dataset, const TrainConfig& cfg);

TrainResult train_supervised(std::vector<TrainingSample> dataset, TrainConfig cfg);
TrainResult train_ssdu(std::vector<TrainingSample> dataset, TrainConfig cfg);
TrainResult train_multimask(std::vector<TrainingSample> dataset, TrainConfig cfg);

// Loss of a single (sample, j) pair at the given weights, via the same
// graph the trainer builds. Exposed for leakage and equivalence tests.
double pair_loss(const TrainingSample& sample, int j, const NetworkParams& params,
                 const TrainConfig& cfg);

// Inference with the full sampling pattern in the DC units; the output is
// rescaled by the stored normalization factor.
ComplexImage reconstruct_test(const KSpaceSample& y, const CoilSensitivities& coils,
                              const NetworkParams& params, const UnrollConfig& cfg);

}  // namespace ssdu
