#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "ssdu/autodiff.hpp"
#include "ssdu/resnet.hpp"
#include "ssdu/types.hpp"

namespace ssdu {

struct UnrollConfig {
  int t_unroll = 5;
  int cg_iters = 10;
  double cg_tol = 1e-6;
  double mu_init = 0.05;
  bool mu_trainable = true;

  void validate() const;
};

using LinOp = std::function<ComplexImage(const ComplexImage&)>;

struct CgResult {
  ComplexImage x;
  double rel_residual = 0.0;  // ||A x - rhs|| / ||rhs||, recomputed at exit
  int iters = 0;
};

// Conjugate gradients on A x = rhs with A Hermitian positive definite,
// started from zero. Stops at tol * ||rhs|| on the residual or after
// `iters` steps, whichever comes first.
CgResult cg_normal_solve(const LinOp& apply_a, const ComplexImage& rhs, int iters, double tol);

// Data-consistency unit: argmin_x ||y - E x||^2 + mu ||x - z||^2 via CG on
// (E^H E + mu I) x = E^H y + mu z.
ComplexImage dc_unit(const ComplexImage& z, const KSpaceSample& y, const CoilSensitivities& coils,
                     double mu, const UnrollConfig& cfg);

// CG-SENSE baseline: (E^H E + l2_weight I) x = E^H y.
ComplexImage cg_sense(const KSpaceSample& y, const CoilSensitivities& coils, double l2_weight,
                      const UnrollConfig& cfg);

struct UnrollTrace {
  std::vector<ComplexImage> x;  // x^(0..T)
  std::vector<ComplexImage> z;  // z^(0..T-1)
  const ComplexImage& final() const { return x.back(); }
};

// T alternations of regularizer and DC with shared weights; x^(0) is the
// zero-filled reconstruction of y. The pattern carried by y decides what
// the DC units see (the training subset at train time, all measurements at
// test time).
UnrollTrace unrolled_forward(const KSpaceSample& y, const CoilSensitivities& coils,
                             const NetworkParams& params, const UnrollConfig& cfg);

// --- graph (training) path -------------------------------------------------

// Immutable per-(sample, mask) constants shared by every DC unit in a graph.
struct EncodingRefs {
  int ny = 0, nz = 0, ncoils = 0;
  std::vector<std::shared_ptr<const std::vector<cplx>>> maps;
  std::shared_ptr<const std::vector<uint8_t>> mask;
};

EncodingRefs make_encoding_refs(const CoilSensitivities& coils,
                                const std::vector<uint8_t>& mask);

// (E^H E + mu) x as graph nodes; mu_node may be a trainable scalar.
int normal_graph(ad::Graph& g, int x, const EncodingRefs& enc, int mu_node);

// CG solve of (E^H E + mu) x = ehy_const + mu z, unrolled into the graph
// (backprop differentiates through the executed iterations).
int dc_graph(ad::Graph& g, int z, int ehy_const, const EncodingRefs& enc, int mu_node,
             const UnrollConfig& cfg);

// Per-coil E_mask(x): mask .* F(map_c .* x); used to take the network
// output to k-space for the loss.
std::vector<int> encode_graph(ad::Graph& g, int x, const EncodingRefs& enc);

struct UnrolledGraph {
  int x_final = -1;
  int mu_node = -1;
  std::vector<int> x_iters;
};

// Full T-step unrolled forward in the graph. `y` must already be restricted
// to the pattern the DC units may see.
UnrolledGraph build_unrolled_graph(ad::Graph& g, const KSpaceSample& y,
                                   const CoilSensitivities& coils, const NetworkParams& params,
                                   const ResnetNodes& ids, int mu_node, const UnrollConfig& cfg);

}  // namespace ssdu
