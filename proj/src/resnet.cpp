#include "ssdu/resnet.hpp"

#include <cmath>

#include "ssdu/errors.hpp"
#include "ssdu/nn_kernels.hpp"
#include "ssdu/rng.hpp"

namespace ssdu {

namespace {

ConvLayer init_layer(int cin, int cout, uint64_t seed, double out_scale) {
  ConvLayer l;
  l.cin = cin;
  l.cout = cout;
  l.w.resize(size_t(cout) * cin * 9);
  l.b.assign(size_t(cout), 0.0);
  const double fan_in = double(cin) * 9.0;
  const double fan_out = double(cout) * 9.0;
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  CounterRng rng(seed);
  for (double& w : l.w) w = out_scale * limit * (2.0 * rng.uniform() - 1.0);
  return l;
}

}  // namespace

NetworkParams NetworkParams::init(int channels, int blocks, uint64_t seed, double mu_init) {
  if (channels < 1 || blocks < 0) throw ConfigError("NetworkParams: bad channels/blocks");
  if (mu_init <= 0) throw ConfigError("NetworkParams: mu_init must be > 0");
  NetworkParams p;
  p.channels = channels;
  p.blocks = blocks;
  p.mu = mu_init;
  uint64_t layer = 0;
  p.conv_in = init_layer(2, channels, derive_seed(seed, layer++), 1.0);
  p.body.clear();
  for (int b = 0; b < blocks; ++b) {
    p.body.push_back(init_layer(channels, channels, derive_seed(seed, layer++), 1.0));
    p.body.push_back(init_layer(channels, channels, derive_seed(seed, layer++), 1.0));
  }
  p.conv_out = init_layer(channels, 2, derive_seed(seed, layer++), 0.01);
  return p;
}

std::vector<ParamRef> NetworkParams::tensor_refs() {
  std::vector<ParamRef> refs;
  refs.push_back({"conv_in.w", &conv_in.w});
  refs.push_back({"conv_in.b", &conv_in.b});
  for (size_t i = 0; i < body.size(); ++i) {
    const std::string base =
        "block" + std::to_string(i / 2) + ".conv" + std::to_string(i % 2 + 1);
    refs.push_back({base + ".w", &body[i].w});
    refs.push_back({base + ".b", &body[i].b});
  }
  refs.push_back({"conv_out.w", &conv_out.w});
  refs.push_back({"conv_out.b", &conv_out.b});
  return refs;
}

std::vector<std::pair<std::string, const std::vector<double>*>> NetworkParams::tensor_views()
    const {
  auto refs = const_cast<NetworkParams*>(this)->tensor_refs();
  std::vector<std::pair<std::string, const std::vector<double>*>> out;
  out.reserve(refs.size());
  for (auto& r : refs) out.emplace_back(r.name, r.data);
  return out;
}

size_t NetworkParams::total_size() const {
  size_t n = 0;
  for (auto& [name, t] : tensor_views()) n += t->size();
  return n;
}

void NetworkParams::validate() const {
  auto check_layer = [](const ConvLayer& l, int cin, int cout, const char* what) {
    if (l.cin != cin || l.cout != cout || l.w.size() != size_t(cout) * cin * 9 ||
        l.b.size() != size_t(cout))
      throw DimensionError(std::string("NetworkParams: bad shape for ") + what);
    for (double v : l.w)
      if (!std::isfinite(v)) throw DataError("NetworkParams: non-finite weight");
    for (double v : l.b)
      if (!std::isfinite(v)) throw DataError("NetworkParams: non-finite bias");
  };
  check_layer(conv_in, 2, channels, "conv_in");
  if (int(body.size()) != 2 * blocks) throw DimensionError("NetworkParams: body layer count");
  for (auto& l : body) check_layer(l, channels, channels, "body");
  check_layer(conv_out, channels, 2, "conv_out");
  if (!std::isfinite(mu) || mu < 0) throw DataError("NetworkParams: bad mu");
}

ComplexImage resnet_regularizer(const ComplexImage& x, const NetworkParams& p) {
  p.validate();
  const int h = x.ny;
  const int w = x.nz;
  const int c = p.channels;
  const size_t plane = size_t(h) * w;

  std::vector<double> cur = ad::Graph::pack(x);  // (2,h,w)
  std::vector<double> buf(size_t(c) * plane);
  std::vector<double> tmp(size_t(c) * plane);
  std::vector<double> pad(nn::padded_size(std::max(c, 2), h, w));

  nn::conv3x3_forward(cur.data(), p.conv_in.w.data(), p.conv_in.b.data(), buf.data(), 2, c, h, w,
                      pad.data());
  for (int bl = 0; bl < p.blocks; ++bl) {
    const ConvLayer& l1 = p.body[size_t(bl) * 2];
    const ConvLayer& l2 = p.body[size_t(bl) * 2 + 1];
    nn::conv3x3_forward(buf.data(), l1.w.data(), l1.b.data(), tmp.data(), c, c, h, w, pad.data());
    for (double& v : tmp) v = v > 0.0 ? v : 0.0;
    std::vector<double> t2(size_t(c) * plane);
    nn::conv3x3_forward(tmp.data(), l2.w.data(), l2.b.data(), t2.data(), c, c, h, w, pad.data());
    for (size_t i = 0; i < buf.size(); ++i) buf[i] += t2[i];
  }
  std::vector<double> out(2 * plane);
  nn::conv3x3_forward(buf.data(), p.conv_out.w.data(), p.conv_out.b.data(), out.data(), c, 2, h, w,
                      pad.data());
  return ad::Graph::unpack(out, h, w);
}

ResnetNodes resnet_params_to_graph(ad::Graph& g, const NetworkParams& p, bool trainable) {
  ResnetNodes ids;
  auto push_layer = [&](const ConvLayer& l, int& wid, int& bid) {
    wid = g.input({l.cout, l.cin, 3, 3}, l.w, trainable);
    bid = g.input({l.cout}, l.b, trainable);
  };
  push_layer(p.conv_in, ids.win, ids.bin);
  ids.bw.resize(p.body.size());
  ids.bb.resize(p.body.size());
  for (size_t i = 0; i < p.body.size(); ++i) push_layer(p.body[i], ids.bw[i], ids.bb[i]);
  push_layer(p.conv_out, ids.wout, ids.bout);
  return ids;
}

int resnet_graph(ad::Graph& g, int x_pair, const NetworkParams& p, const ResnetNodes& ids) {
  int h = g.conv3x3(x_pair, ids.win, ids.bin);
  for (int bl = 0; bl < p.blocks; ++bl) {
    int t = g.conv3x3(h, ids.bw[size_t(bl) * 2], ids.bb[size_t(bl) * 2]);
    t = g.relu(t);
    t = g.conv3x3(t, ids.bw[size_t(bl) * 2 + 1], ids.bb[size_t(bl) * 2 + 1]);
    h = g.add(h, t);
  }
  return g.conv3x3(h, ids.wout, ids.bout);
}

}  // namespace ssdu
