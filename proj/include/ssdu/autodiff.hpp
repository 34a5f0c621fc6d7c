#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "ssdu/types.hpp"

namespace ssdu::ad {

// Define-by-run reverse-mode tape over real tensors. Values are computed
// eagerly when an op is added; creation order is the topological order, so
// backward() is a single reverse sweep. Complex images travel through the
// graph as 2-channel real tensors (re, im) of dims {2, ny, nz}, and the
// complex-linear primitives (coil multiply, centred FFT, masking) implement
// the matching real-transposed backward.
struct Node {
  std::vector<int> dims;
  std::vector<double> val;
  std::vector<double> grad;  // empty until touched by backward
  bool needs_grad = false;
  virtual void backward(class Graph& g) {}
  virtual ~Node() = default;
  size_t numel() const { return val.size(); }
};

class Graph {
 public:
  // leaves
  int input(std::vector<int> dims, std::vector<double> val, bool needs_grad);
  int constant(std::vector<int> dims, std::vector<double> val) {
    return input(std::move(dims), std::move(val), false);
  }
  int scalar(double v, bool needs_grad = false) { return input({1}, {v}, needs_grad); }
  int complex_constant(const ComplexImage& img);

  // tensor ops
  int add(int a, int b);
  int scale_const(int x, double c);
  int axpy_const(int a, int b, double c);  // a + c*b
  int scale(int x, int s);                 // tensor * scalar node
  int relu(int x);
  int conv3x3(int x, int w, int b);        // x:(Ci,H,W) w:(Co,Ci,3,3) b:(Co)

  // complex-pair ops on (2,ny,nz) tensors
  int cmul_map(int x, std::shared_ptr<const std::vector<cplx>> map, bool conj_map);
  int mask(int x, std::shared_ptr<const std::vector<uint8_t>> m);
  int fft2c(int x);
  int ifft2c(int x);

  // reductions to scalar
  int dot(int a, int b);      // sum of elementwise products (= Re<a,b> on pairs)
  int cabs_sum(int x);        // sum over pixels of sqrt(re^2 + im^2)

  // scalar ops
  int s_add(int a, int b);
  int s_mul(int a, int b);
  int s_div(int a, int b);
  int s_sqrt(int a);
  int s_exp(int a);
  int s_scale(int a, double c);

  // Exact reverse-mode gradients of a scalar node with respect to every
  // leaf created with needs_grad.
  void backward(int loss);

  const std::vector<double>& value(int id) const { return nodes_[id]->val; }
  double scalar_value(int id) const { return nodes_[id]->val[0]; }
  const std::vector<int>& dims(int id) const { return nodes_[id]->dims; }
  // Gradient of the last backward() w.r.t. node id (zeros if untouched).
  std::vector<double> grad(int id) const;

  // internal accessors used by node backward implementations
  Node& node(int id) { return *nodes_[id]; }
  double* grad_accum(int id);  // nullptr when the node does not need grad

  size_t size() const { return nodes_.size(); }

  // Complex-pair helpers: pack/unpack ComplexImage <-> (2,ny,nz) tensor.
  static std::vector<double> pack(const ComplexImage& img);
  static ComplexImage unpack(const std::vector<double>& planes, int ny, int nz);

 private:
  int push(std::unique_ptr<Node> n, std::initializer_list<int> inputs);
  std::vector<std::unique_ptr<Node>> nodes_;
};

}  // namespace ssdu::ad
