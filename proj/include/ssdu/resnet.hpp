#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssdu/autodiff.hpp"
#include "ssdu/types.hpp"

namespace ssdu {

struct ConvLayer {
  int cin = 0;
  int cout = 0;
  std::vector<double> w;  // (cout, cin, 3, 3)
  std::vector<double> b;  // (cout)
};

// Named view of one trainable tensor, shared by the optimizer, the
// checkpoint writer and the gradient checks.
struct ParamRef {
  std::string name;
  std::vector<double>* data;
};

// Shared-weight ResNet regularizer acting on 2-channel (re, im) images:
// input conv (2->C), `blocks` residual blocks (conv-relu-conv plus identity
// skip), output conv (C->2). No normalization layers. The quadratic
// penalty weight mu rides along so a checkpoint is self-contained.
struct NetworkParams {
  int channels = 16;
  int blocks = 3;
  ConvLayer conv_in;
  std::vector<ConvLayer> body;  // 2 layers per block
  ConvLayer conv_out;
  double mu = 0.05;

  // Glorot-uniform weights (limit sqrt(6/(fan_in+fan_out))), zero biases,
  // output conv damped by 0.01 so the untrained network starts near the
  // zero regularizer. Layer L draws from derive_seed(seed, L).
  static NetworkParams init(int channels, int blocks, uint64_t seed, double mu_init = 0.05);

  std::vector<ParamRef> tensor_refs();
  std::vector<std::pair<std::string, const std::vector<double>*>> tensor_views() const;
  size_t total_size() const;
  void validate() const;
};

// Plain (non-graph) forward pass, used at test time.
ComplexImage resnet_regularizer(const ComplexImage& x, const NetworkParams& p);

// Graph-side parameter leaves; create once per graph and reuse across all
// unroll steps so the weights are shared and gradients accumulate.
struct ResnetNodes {
  int win = -1, bin = -1;
  std::vector<int> bw, bb;  // body layers
  int wout = -1, bout = -1;
};

ResnetNodes resnet_params_to_graph(ad::Graph& g, const NetworkParams& p, bool trainable);

// Appends the regularizer subgraph; x_pair is a (2,ny,nz) node.
int resnet_graph(ad::Graph& g, int x_pair, const NetworkParams& p, const ResnetNodes& ids);

}  // namespace ssdu
