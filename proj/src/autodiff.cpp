#include "ssdu/autodiff.hpp"

#include <cmath>
#include <cstring>

#include "ssdu/errors.hpp"
#include "ssdu/fft.hpp"
#include "ssdu/nn_kernels.hpp"

namespace ssdu::ad {

namespace {

size_t numel_of(const std::vector<int>& dims) {
  size_t n = 1;
  for (int d : dims) n *= size_t(d);
  return n;
}

void check_pair(const std::vector<int>& dims) {
  if (dims.size() != 3 || dims[0] != 2) throw GraphError("op expects a (2,ny,nz) complex pair");
}

struct Leaf final : Node {};

struct Add final : Node {
  int a, b;
  Add(int a_, int b_) : a(a_), b(b_) {}
  void backward(Graph& g) override {
    if (double* ga = g.grad_accum(a))
      for (size_t i = 0; i < grad.size(); ++i) ga[i] += grad[i];
    if (double* gb = g.grad_accum(b))
      for (size_t i = 0; i < grad.size(); ++i) gb[i] += grad[i];
  }
};

struct AxpyConst final : Node {
  int a, b;
  double c;
  AxpyConst(int a_, int b_, double c_) : a(a_), b(b_), c(c_) {}
  void backward(Graph& g) override {
    if (double* ga = g.grad_accum(a))
      for (size_t i = 0; i < grad.size(); ++i) ga[i] += grad[i];
    if (double* gb = g.grad_accum(b))
      for (size_t i = 0; i < grad.size(); ++i) gb[i] += c * grad[i];
  }
};

struct ScaleConst final : Node {
  int a;
  double c;
  ScaleConst(int a_, double c_) : a(a_), c(c_) {}
  void backward(Graph& g) override {
    if (double* ga = g.grad_accum(a))
      for (size_t i = 0; i < grad.size(); ++i) ga[i] += c * grad[i];
  }
};

struct Scale final : Node {  // tensor * scalar node
  int a, s;
  Scale(int a_, int s_) : a(a_), s(s_) {}
  void backward(Graph& g) override {
    const double sv = g.node(s).val[0];
    const std::vector<double>& av = g.node(a).val;
    if (double* ga = g.grad_accum(a))
      for (size_t i = 0; i < grad.size(); ++i) ga[i] += sv * grad[i];
    if (double* gs = g.grad_accum(s)) {
      double acc = 0.0;
      for (size_t i = 0; i < grad.size(); ++i) acc += grad[i] * av[i];
      gs[0] += acc;
    }
  }
};

struct Relu final : Node {
  int a;
  explicit Relu(int a_) : a(a_) {}
  void backward(Graph& g) override {
    const std::vector<double>& av = g.node(a).val;
    if (double* ga = g.grad_accum(a))
      for (size_t i = 0; i < grad.size(); ++i)
        if (av[i] > 0.0) ga[i] += grad[i];
  }
};

struct Conv3x3 final : Node {
  int x, w, b;
  int ci, co, h, wd;
  std::vector<double> xpad;  // kept for the weight-gradient pass
  Conv3x3(int x_, int w_, int b_) : x(x_), w(w_), b(b_) {}
  void backward(Graph& g) override {
    const std::vector<double>& wv = g.node(w).val;
    if (double* gx = g.grad_accum(x)) {
      std::vector<double> gpad(nn::padded_size(co, h, wd));
      nn::conv3x3_backward_input(wv.data(), grad.data(), gx, ci, co, h, wd, gpad.data());
    }
    double* gw = g.grad_accum(w);
    double* gb = g.grad_accum(b);
    if (gw || gb) {
      std::vector<double> gb_tmp;
      if (!gb) {
        gb_tmp.assign(size_t(co), 0.0);
        gb = gb_tmp.data();
      }
      std::vector<double> gw_tmp;
      if (!gw) {
        gw_tmp.assign(size_t(co) * ci * 9, 0.0);
        gw = gw_tmp.data();
      }
      nn::conv3x3_backward_params(xpad.data(), grad.data(), gw, gb, ci, co, h, wd);
    }
  }
};

struct CMulMap final : Node {
  int a;
  std::shared_ptr<const std::vector<cplx>> map;
  bool conj_map;
  CMulMap(int a_, std::shared_ptr<const std::vector<cplx>> m, bool c)
      : a(a_), map(std::move(m)), conj_map(c) {}
  void backward(Graph& g) override {
    // real transpose of multiply-by-m is multiply-by-conj(m)
    if (double* ga = g.grad_accum(a)) {
      const size_t plane = grad.size() / 2;
      const double sgn = conj_map ? 1.0 : -1.0;  // sign of imag part of the backward factor
      const cplx* m = map->data();
      for (size_t i = 0; i < plane; ++i) {
        const double mr = m[i].real();
        const double mi = sgn * m[i].imag();
        const double gr = grad[i];
        const double gi = grad[plane + i];
        ga[i] += gr * mr - gi * mi;
        ga[plane + i] += gr * mi + gi * mr;
      }
    }
  }
};

struct MaskOp final : Node {
  int a;
  std::shared_ptr<const std::vector<uint8_t>> m;
  MaskOp(int a_, std::shared_ptr<const std::vector<uint8_t>> m_) : a(a_), m(std::move(m_)) {}
  void backward(Graph& g) override {
    if (double* ga = g.grad_accum(a)) {
      const size_t plane = grad.size() / 2;
      const uint8_t* mm = m->data();
      for (size_t i = 0; i < plane; ++i) {
        if (!mm[i]) continue;
        ga[i] += grad[i];
        ga[plane + i] += grad[plane + i];
      }
    }
  }
};

struct Fft2c final : Node {
  int a;
  int ny, nz;
  bool inverse;
  Fft2c(int a_, bool inv) : a(a_), inverse(inv) {}
  void backward(Graph& g) override {
    // the transform is unitary, so the real transpose is its inverse
    if (double* ga = g.grad_accum(a)) {
      const size_t plane = size_t(ny) * nz;
      std::vector<cplx> buf(plane);
      for (size_t i = 0; i < plane; ++i) buf[i] = cplx(grad[i], grad[plane + i]);
      if (inverse)
        fft2_centered_inplace(buf.data(), ny, nz);
      else
        ifft2_centered_inplace(buf.data(), ny, nz);
      for (size_t i = 0; i < plane; ++i) {
        ga[i] += buf[i].real();
        ga[plane + i] += buf[i].imag();
      }
    }
  }
};

struct Dot final : Node {
  int a, b;
  Dot(int a_, int b_) : a(a_), b(b_) {}
  void backward(Graph& g) override {
    const double gv = grad[0];
    const std::vector<double>& av = g.node(a).val;
    const std::vector<double>& bv = g.node(b).val;
    if (double* ga = g.grad_accum(a))
      for (size_t i = 0; i < av.size(); ++i) ga[i] += gv * bv[i];
    if (double* gb = g.grad_accum(b))
      for (size_t i = 0; i < av.size(); ++i) gb[i] += gv * av[i];
  }
};

struct CAbsSum final : Node {
  int a;
  explicit CAbsSum(int a_) : a(a_) {}
  void backward(Graph& g) override {
    if (double* ga = g.grad_accum(a)) {
      const double gv = grad[0];
      const std::vector<double>& av = g.node(a).val;
      const size_t plane = av.size() / 2;
      for (size_t i = 0; i < plane; ++i) {
        const double re = av[i];
        const double im = av[plane + i];
        const double mod = std::sqrt(re * re + im * im);
        if (mod > 0.0) {
          ga[i] += gv * re / mod;
          ga[plane + i] += gv * im / mod;
        }
      }
    }
  }
};

struct SAdd final : Node {
  int a, b;
  SAdd(int a_, int b_) : a(a_), b(b_) {}
  void backward(Graph& g) override {
    if (double* ga = g.grad_accum(a)) ga[0] += grad[0];
    if (double* gb = g.grad_accum(b)) gb[0] += grad[0];
  }
};

struct SMul final : Node {
  int a, b;
  SMul(int a_, int b_) : a(a_), b(b_) {}
  void backward(Graph& g) override {
    const double av = g.node(a).val[0];
    const double bv = g.node(b).val[0];
    if (double* ga = g.grad_accum(a)) ga[0] += grad[0] * bv;
    if (double* gb = g.grad_accum(b)) gb[0] += grad[0] * av;
  }
};

struct SDiv final : Node {
  int a, b;
  SDiv(int a_, int b_) : a(a_), b(b_) {}
  void backward(Graph& g) override {
    const double av = g.node(a).val[0];
    const double bv = g.node(b).val[0];
    if (double* ga = g.grad_accum(a)) ga[0] += grad[0] / bv;
    if (double* gb = g.grad_accum(b)) gb[0] -= grad[0] * av / (bv * bv);
  }
};

struct SSqrt final : Node {
  int a;
  explicit SSqrt(int a_) : a(a_) {}
  void backward(Graph& g) override {
    if (double* ga = g.grad_accum(a))
      if (val[0] > 0.0) ga[0] += grad[0] * 0.5 / val[0];
  }
};

struct SExp final : Node {
  int a;
  explicit SExp(int a_) : a(a_) {}
  void backward(Graph& g) override {
    if (double* ga = g.grad_accum(a)) ga[0] += grad[0] * val[0];
  }
};

struct SScale final : Node {
  int a;
  double c;
  SScale(int a_, double c_) : a(a_), c(c_) {}
  void backward(Graph& g) override {
    if (double* ga = g.grad_accum(a)) ga[0] += grad[0] * c;
  }
};

}  // namespace

int Graph::push(std::unique_ptr<Node> n, std::initializer_list<int> inputs) {
  const int id = int(nodes_.size());
  bool needs = false;
  for (int in : inputs) {
    if (in < 0 || in >= id) throw GraphError("op input out of order; graph must stay acyclic");
    needs = needs || nodes_[in]->needs_grad;
  }
  n->needs_grad = needs;
  nodes_.push_back(std::move(n));
  return id;
}

int Graph::input(std::vector<int> dims, std::vector<double> val, bool needs_grad) {
  if (val.size() != numel_of(dims)) throw GraphError("input: value size mismatch");
  auto n = std::make_unique<Leaf>();
  n->dims = std::move(dims);
  n->val = std::move(val);
  const int id = int(nodes_.size());
  n->needs_grad = needs_grad;
  nodes_.push_back(std::move(n));
  return id;
}

int Graph::complex_constant(const ComplexImage& img) {
  return constant({2, img.ny, img.nz}, pack(img));
}

int Graph::add(int a, int b) {
  Node& na = *nodes_[a];
  Node& nb = *nodes_[b];
  if (na.dims != nb.dims) throw GraphError("add: shape mismatch");
  auto n = std::make_unique<Add>(a, b);
  n->dims = na.dims;
  n->val.resize(na.numel());
  for (size_t i = 0; i < na.numel(); ++i) n->val[i] = na.val[i] + nb.val[i];
  return push(std::move(n), {a, b});
}

int Graph::axpy_const(int a, int b, double c) {
  Node& na = *nodes_[a];
  Node& nb = *nodes_[b];
  if (na.dims != nb.dims) throw GraphError("axpy: shape mismatch");
  auto n = std::make_unique<AxpyConst>(a, b, c);
  n->dims = na.dims;
  n->val.resize(na.numel());
  for (size_t i = 0; i < na.numel(); ++i) n->val[i] = na.val[i] + c * nb.val[i];
  return push(std::move(n), {a, b});
}

int Graph::scale_const(int x, double c) {
  Node& nx = *nodes_[x];
  auto n = std::make_unique<ScaleConst>(x, c);
  n->dims = nx.dims;
  n->val.resize(nx.numel());
  for (size_t i = 0; i < nx.numel(); ++i) n->val[i] = c * nx.val[i];
  return push(std::move(n), {x});
}

int Graph::scale(int x, int s) {
  Node& nx = *nodes_[x];
  Node& ns = *nodes_[s];
  if (ns.numel() != 1) throw GraphError("scale: scalar node expected");
  auto n = std::make_unique<Scale>(x, s);
  n->dims = nx.dims;
  n->val.resize(nx.numel());
  const double sv = ns.val[0];
  for (size_t i = 0; i < nx.numel(); ++i) n->val[i] = sv * nx.val[i];
  return push(std::move(n), {x, s});
}

int Graph::relu(int x) {
  Node& nx = *nodes_[x];
  auto n = std::make_unique<Relu>(x);
  n->dims = nx.dims;
  n->val.resize(nx.numel());
  for (size_t i = 0; i < nx.numel(); ++i) n->val[i] = nx.val[i] > 0.0 ? nx.val[i] : 0.0;
  return push(std::move(n), {x});
}

int Graph::conv3x3(int x, int w, int b) {
  Node& nx = *nodes_[x];
  Node& nw = *nodes_[w];
  Node& nb = *nodes_[b];
  if (nx.dims.size() != 3) throw GraphError("conv3x3: input must be (C,H,W)");
  if (nw.dims.size() != 4 || nw.dims[2] != 3 || nw.dims[3] != 3 || nw.dims[1] != nx.dims[0])
    throw GraphError("conv3x3: kernel must be (Co,Ci,3,3) with Ci matching input");
  if (nb.dims.size() != 1 || nb.dims[0] != nw.dims[0])
    throw GraphError("conv3x3: bias must be (Co)");
  auto n = std::make_unique<Conv3x3>(x, w, b);
  n->ci = nx.dims[0];
  n->co = nw.dims[0];
  n->h = nx.dims[1];
  n->wd = nx.dims[2];
  n->dims = {n->co, n->h, n->wd};
  n->val.resize(size_t(n->co) * n->h * n->wd);
  n->xpad.resize(nn::padded_size(n->ci, n->h, n->wd));
  nn::conv3x3_forward(nx.val.data(), nw.val.data(), nb.val.data(), n->val.data(), n->ci, n->co,
                      n->h, n->wd, n->xpad.data());
  return push(std::move(n), {x, w, b});
}

int Graph::cmul_map(int x, std::shared_ptr<const std::vector<cplx>> map, bool conj_map) {
  Node& nx = *nodes_[x];
  check_pair(nx.dims);
  const size_t plane = nx.numel() / 2;
  if (map->size() != plane) throw GraphError("cmul_map: map size mismatch");
  auto n = std::make_unique<CMulMap>(x, map, conj_map);
  n->dims = nx.dims;
  n->val.resize(nx.numel());
  const cplx* m = n->map->data();
  for (size_t i = 0; i < plane; ++i) {
    const double mr = m[i].real();
    const double mi = conj_map ? -m[i].imag() : m[i].imag();
    const double xr = nx.val[i];
    const double xi = nx.val[plane + i];
    n->val[i] = xr * mr - xi * mi;
    n->val[plane + i] = xr * mi + xi * mr;
  }
  return push(std::move(n), {x});
}

int Graph::mask(int x, std::shared_ptr<const std::vector<uint8_t>> m) {
  Node& nx = *nodes_[x];
  check_pair(nx.dims);
  const size_t plane = nx.numel() / 2;
  if (m->size() != plane) throw GraphError("mask: size mismatch");
  auto n = std::make_unique<MaskOp>(x, m);
  n->dims = nx.dims;
  n->val.resize(nx.numel());
  const uint8_t* mm = n->m->data();
  for (size_t i = 0; i < plane; ++i) {
    n->val[i] = mm[i] ? nx.val[i] : 0.0;
    n->val[plane + i] = mm[i] ? nx.val[plane + i] : 0.0;
  }
  return push(std::move(n), {x});
}

int Graph::fft2c(int x) {
  Node& nx = *nodes_[x];
  check_pair(nx.dims);
  auto n = std::make_unique<Fft2c>(x, false);
  n->ny = nx.dims[1];
  n->nz = nx.dims[2];
  n->dims = nx.dims;
  const size_t plane = nx.numel() / 2;
  std::vector<cplx> buf(plane);
  for (size_t i = 0; i < plane; ++i) buf[i] = cplx(nx.val[i], nx.val[plane + i]);
  fft2_centered_inplace(buf.data(), n->ny, n->nz);
  n->val.resize(nx.numel());
  for (size_t i = 0; i < plane; ++i) {
    n->val[i] = buf[i].real();
    n->val[plane + i] = buf[i].imag();
  }
  return push(std::move(n), {x});
}

int Graph::ifft2c(int x) {
  Node& nx = *nodes_[x];
  check_pair(nx.dims);
  auto n = std::make_unique<Fft2c>(x, true);
  n->ny = nx.dims[1];
  n->nz = nx.dims[2];
  n->dims = nx.dims;
  const size_t plane = nx.numel() / 2;
  std::vector<cplx> buf(plane);
  for (size_t i = 0; i < plane; ++i) buf[i] = cplx(nx.val[i], nx.val[plane + i]);
  ifft2_centered_inplace(buf.data(), n->ny, n->nz);
  n->val.resize(nx.numel());
  for (size_t i = 0; i < plane; ++i) {
    n->val[i] = buf[i].real();
    n->val[plane + i] = buf[i].imag();
  }
  return push(std::move(n), {x});
}

int Graph::dot(int a, int b) {
  Node& na = *nodes_[a];
  Node& nb = *nodes_[b];
  if (na.dims != nb.dims) throw GraphError("dot: shape mismatch");
  auto n = std::make_unique<Dot>(a, b);
  n->dims = {1};
  double s = 0.0;
  for (size_t i = 0; i < na.numel(); ++i) s += na.val[i] * nb.val[i];
  n->val = {s};
  return push(std::move(n), {a, b});
}

int Graph::cabs_sum(int x) {
  Node& nx = *nodes_[x];
  check_pair(nx.dims);
  auto n = std::make_unique<CAbsSum>(x);
  n->dims = {1};
  const size_t plane = nx.numel() / 2;
  double s = 0.0;
  for (size_t i = 0; i < plane; ++i)
    s += std::sqrt(nx.val[i] * nx.val[i] + nx.val[plane + i] * nx.val[plane + i]);
  n->val = {s};
  return push(std::move(n), {x});
}

int Graph::s_add(int a, int b) {
  auto n = std::make_unique<SAdd>(a, b);
  n->dims = {1};
  n->val = {nodes_[a]->val[0] + nodes_[b]->val[0]};
  return push(std::move(n), {a, b});
}

int Graph::s_mul(int a, int b) {
  auto n = std::make_unique<SMul>(a, b);
  n->dims = {1};
  n->val = {nodes_[a]->val[0] * nodes_[b]->val[0]};
  return push(std::move(n), {a, b});
}

int Graph::s_div(int a, int b) {
  auto n = std::make_unique<SDiv>(a, b);
  n->dims = {1};
  n->val = {nodes_[a]->val[0] / nodes_[b]->val[0]};
  return push(std::move(n), {a, b});
}

int Graph::s_sqrt(int a) {
  auto n = std::make_unique<SSqrt>(a);
  n->dims = {1};
  n->val = {std::sqrt(nodes_[a]->val[0])};
  return push(std::move(n), {a});
}

int Graph::s_exp(int a) {
  auto n = std::make_unique<SExp>(a);
  n->dims = {1};
  n->val = {std::exp(nodes_[a]->val[0])};
  return push(std::move(n), {a});
}

int Graph::s_scale(int a, double c) {
  auto n = std::make_unique<SScale>(a, c);
  n->dims = {1};
  n->val = {c * nodes_[a]->val[0]};
  return push(std::move(n), {a});
}

double* Graph::grad_accum(int id) {
  Node& n = *nodes_[id];
  if (!n.needs_grad) return nullptr;
  if (n.grad.empty()) n.grad.assign(n.numel(), 0.0);
  return n.grad.data();
}

void Graph::backward(int loss) {
  if (loss < 0 || loss >= int(nodes_.size())) throw GraphError("backward: bad node id");
  Node& ln = *nodes_[loss];
  if (ln.numel() != 1) throw GraphError("backward: loss node must be scalar");
  for (auto& n : nodes_) n->grad.clear();
  if (!ln.needs_grad) return;  // constant loss: all gradients are zero
  ln.grad.assign(1, 1.0);
  for (int i = loss; i >= 0; --i) {
    Node& n = *nodes_[i];
    if (!n.needs_grad || n.grad.empty()) continue;
    n.backward(*this);
  }
}

std::vector<double> Graph::grad(int id) const {
  const Node& n = *nodes_[id];
  if (n.grad.empty()) return std::vector<double>(n.numel(), 0.0);
  return n.grad;
}

std::vector<double> Graph::pack(const ComplexImage& img) {
  const size_t plane = img.numel();
  std::vector<double> out(2 * plane);
  for (size_t i = 0; i < plane; ++i) {
    out[i] = img.data[i].real();
    out[plane + i] = img.data[i].imag();
  }
  return out;
}

ComplexImage Graph::unpack(const std::vector<double>& planes, int ny, int nz) {
  ComplexImage img(ny, nz);
  const size_t plane = img.numel();
  if (planes.size() != 2 * plane) throw GraphError("unpack: size mismatch");
  for (size_t i = 0; i < plane; ++i) img.data[i] = cplx(planes[i], planes[plane + i]);
  return img;
}

}  // namespace ssdu::ad
