#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ssdu/container.hpp"
#include "ssdu/phantom.hpp"
#include "ssdu/resnet.hpp"
#include "ssdu/sampling.hpp"
#include "ssdu/solver.hpp"
#include "ssdu/types.hpp"

namespace ssdu {

// One training/testing unit: acquired k-space plus what the mode needs
// (full reference for supervised training and evaluation, frozen partitions
// for the self-supervised modes).
struct TrainingSample {
  KSpaceSample y;  // masked by Omega, zeros elsewhere
  std::shared_ptr<const CoilSensitivities> coils;
  std::shared_ptr<const KSpaceSample> y_ref;      // optional full k-space
  std::shared_ptr<const PartitionSet> partition;  // optional, frozen splits
};

// Synthetic multi-coil benchmark: shared coils and pattern, per-slice
// phantoms and noisy acquisitions.
struct PhantomSet {
  int n = 0;
  int ncoils = 0;
  UndersamplingSpec spec;
  double sigma = 0.0;
  uint64_t seed = 0;
  SamplingPattern pattern;
  std::shared_ptr<const CoilSensitivities> coils;
  std::vector<ComplexImage> train_images;
  std::vector<ComplexImage> test_images;
  std::vector<KSpaceSample> train_y;     // masked acquisitions
  std::vector<KSpaceSample> test_y;
  std::vector<KSpaceSample> train_yref;  // fully-sampled acquisitions
  std::vector<KSpaceSample> test_yref;
};

PhantomSet generate_phantom_set(int n, int ncoils, int ntrain, int ntest,
                                const UndersamplingSpec& spec, double sigma, uint64_t seed);

void write_phantom_set(const std::string& path, const PhantomSet& set);
PhantomSet read_phantom_set(const std::string& path);

std::vector<TrainingSample> training_samples(const PhantomSet& set, bool with_ref);
std::vector<TrainingSample> test_samples(const PhantomSet& set);

// Trained model plus everything recon needs to replay it.
struct Checkpoint {
  NetworkParams params;
  UnrollConfig unroll;
  std::string mode = "multimask";
  int k = 5;
  double rho = 0.4;
  std::string dist = "uniform";
  uint64_t seed = 0;
  int epochs = 0;
  double lr = 5e-4;
};

void write_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::string& path);

// Partition masks in container form (bit-packed boolean planes).
void add_partitions(DatasetContainer& c, const std::string& prefix, const PartitionSet& parts,
                    int ny, int nz);
PartitionSet get_partitions(const DatasetContainer& c, const std::string& prefix);

}  // namespace ssdu
