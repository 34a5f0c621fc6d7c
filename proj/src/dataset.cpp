#include "ssdu/dataset.hpp"

#include <cmath>

#include "ssdu/errors.hpp"
#include "ssdu/rng.hpp"

namespace ssdu {

namespace {

std::string slice_key(const char* split, size_t i) {
  return std::string(split) + "/" + std::to_string(i);
}

KSpaceSample mask_to_pattern(const KSpaceSample& full, const SamplingPattern& pattern) {
  KSpaceSample y(full.ncoils, pattern);
  y.scale = full.scale;
  const size_t plane = size_t(pattern.ny) * pattern.nz;
  for (int c = 0; c < full.ncoils; ++c) {
    const cplx* src = full.coil(c);
    cplx* dst = y.coil(c);
    for (size_t i = 0; i < plane; ++i) dst[i] = pattern.mask[i] ? src[i] : cplx(0, 0);
  }
  return y;
}

void add_kspace(DatasetContainer& c, const std::string& name, const KSpaceSample& y) {
  c.add_c128(name, {uint64_t(y.ncoils), uint64_t(y.ny()), uint64_t(y.nz())}, y.data.data());
}

}  // namespace

PhantomSet generate_phantom_set(int n, int ncoils, int ntrain, int ntest,
                                const UndersamplingSpec& spec, double sigma, uint64_t seed) {
  if (ntrain < 1 || ntest < 0) throw ConfigError("generate_phantom_set: bad split sizes");
  PhantomSet set;
  set.n = n;
  set.ncoils = ncoils;
  set.spec = spec;
  set.sigma = sigma;
  set.seed = seed;
  set.pattern = gen_sheared_pattern(n, n, spec);
  set.coils = std::make_shared<CoilSensitivities>(simulate_coils(n, ncoils));

  SamplingPattern full(n, n, 0, 0);
  for (auto& m : full.mask) m = 1;

  auto gen_split = [&](int count, uint64_t tag, std::vector<ComplexImage>& images,
                       std::vector<KSpaceSample>& ys, std::vector<KSpaceSample>& yrefs) {
    for (int i = 0; i < count; ++i) {
      const uint64_t s = derive_seed(seed, tag, uint64_t(i));
      ComplexImage img = make_phantom(n, s);
      KSpaceSample yref =
          simulate_acquisition(img, *set.coils, full, NoiseSpec{sigma, derive_seed(s, 0xAC)});
      ys.push_back(mask_to_pattern(yref, set.pattern));
      yrefs.push_back(std::move(yref));
      images.push_back(std::move(img));
    }
  };
  gen_split(ntrain, 0x7121, set.train_images, set.train_y, set.train_yref);
  gen_split(ntest, 0x7e57, set.test_images, set.test_y, set.test_yref);
  return set;
}

void write_phantom_set(const std::string& path, const PhantomSet& set) {
  DatasetContainer c;
  c.add_scalar_u64("meta/n", uint64_t(set.n));
  c.add_scalar_u64("meta/ncoils", uint64_t(set.ncoils));
  c.add_scalar_u64("meta/ntrain", set.train_images.size());
  c.add_scalar_u64("meta/ntest", set.test_images.size());
  c.add_scalar_f64("meta/sigma", set.sigma);
  c.add_scalar_u64("meta/seed", set.seed);
  const double spec6[6] = {double(set.spec.r_total), double(set.spec.r_y), double(set.spec.r_z),
                           double(set.spec.shear_step), double(set.spec.acs_h),
                           double(set.spec.acs_w)};
  c.add_f64("meta/spec", {6}, spec6);
  c.add_bool("pattern/mask", {uint64_t(set.n), uint64_t(set.n)}, set.pattern.mask.data());
  c.add_c128("coils", {uint64_t(set.ncoils), uint64_t(set.n), uint64_t(set.n)},
             set.coils->maps.data());

  auto dump_split = [&](const char* split, const std::vector<ComplexImage>& images,
                        const std::vector<KSpaceSample>& ys,
                        const std::vector<KSpaceSample>& yrefs) {
    for (size_t i = 0; i < images.size(); ++i) {
      c.add_c128(slice_key(split, i) + "/image", {uint64_t(set.n), uint64_t(set.n)},
                 images[i].data.data());
      add_kspace(c, slice_key(split, i) + "/y", ys[i]);
      add_kspace(c, slice_key(split, i) + "/yref", yrefs[i]);
    }
  };
  dump_split("train", set.train_images, set.train_y, set.train_yref);
  dump_split("test", set.test_images, set.test_y, set.test_yref);
  write_dataset(path, c);
}

PhantomSet read_phantom_set(const std::string& path) {
  const DatasetContainer c = read_dataset(path);
  PhantomSet set;
  set.n = int(c.get_scalar_u64("meta/n"));
  set.ncoils = int(c.get_scalar_u64("meta/ncoils"));
  const size_t ntrain = c.get_scalar_u64("meta/ntrain");
  const size_t ntest = c.get_scalar_u64("meta/ntest");
  set.sigma = c.get_scalar_f64("meta/sigma");
  set.seed = c.get_scalar_u64("meta/seed");
  const auto spec6 = c.get_f64("meta/spec");
  if (spec6.size() != 6) throw FormatError("dataset: bad meta/spec");
  set.spec.r_total = int(spec6[0]);
  set.spec.r_y = int(spec6[1]);
  set.spec.r_z = int(spec6[2]);
  set.spec.shear_step = int(spec6[3]);
  set.spec.acs_h = int(spec6[4]);
  set.spec.acs_w = int(spec6[5]);

  set.pattern = SamplingPattern(set.n, set.n, set.spec.acs_h, set.spec.acs_w);
  set.pattern.mask = c.get_bool("pattern/mask");
  set.pattern.validate();

  auto coils = std::make_shared<CoilSensitivities>(set.ncoils, set.n, set.n);
  coils->maps = c.get_c128("coils");
  set.coils = coils;

  auto load_split = [&](const char* split, size_t count, std::vector<ComplexImage>& images,
                        std::vector<KSpaceSample>& ys, std::vector<KSpaceSample>& yrefs) {
    SamplingPattern full(set.n, set.n, 0, 0);
    for (auto& m : full.mask) m = 1;
    for (size_t i = 0; i < count; ++i) {
      ComplexImage img(set.n, set.n);
      img.data = c.get_c128(slice_key(split, i) + "/image");
      if (img.data.size() != size_t(set.n) * set.n) throw FormatError("dataset: bad image size");
      KSpaceSample y(set.ncoils, set.pattern);
      y.data = c.get_c128(slice_key(split, i) + "/y");
      KSpaceSample yref(set.ncoils, full);
      yref.data = c.get_c128(slice_key(split, i) + "/yref");
      if (y.data.size() != yref.data.size() ||
          y.data.size() != size_t(set.ncoils) * set.n * set.n)
        throw FormatError("dataset: bad k-space size");
      if (!y.respects_pattern()) throw FormatError("dataset: acquisition leaks off-pattern");
      images.push_back(std::move(img));
      ys.push_back(std::move(y));
      yrefs.push_back(std::move(yref));
    }
  };
  load_split("train", ntrain, set.train_images, set.train_y, set.train_yref);
  load_split("test", ntest, set.test_images, set.test_y, set.test_yref);
  return set;
}

std::vector<TrainingSample> training_samples(const PhantomSet& set, bool with_ref) {
  std::vector<TrainingSample> out;
  out.reserve(set.train_y.size());
  for (size_t i = 0; i < set.train_y.size(); ++i) {
    TrainingSample s;
    s.y = set.train_y[i];
    s.coils = set.coils;
    if (with_ref) s.y_ref = std::make_shared<KSpaceSample>(set.train_yref[i]);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<TrainingSample> test_samples(const PhantomSet& set) {
  std::vector<TrainingSample> out;
  out.reserve(set.test_y.size());
  for (size_t i = 0; i < set.test_y.size(); ++i) {
    TrainingSample s;
    s.y = set.test_y[i];
    s.coils = set.coils;
    s.y_ref = std::make_shared<KSpaceSample>(set.test_yref[i]);
    out.push_back(std::move(s));
  }
  return out;
}

void write_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  ckpt.params.validate();
  ckpt.unroll.validate();
  DatasetContainer c;
  c.add_scalar_u64("ckpt/channels", uint64_t(ckpt.params.channels));
  c.add_scalar_u64("ckpt/blocks", uint64_t(ckpt.params.blocks));
  c.add_scalar_f64("ckpt/mu", ckpt.params.mu);
  c.add_scalar_u64("ckpt/t_unroll", uint64_t(ckpt.unroll.t_unroll));
  c.add_scalar_u64("ckpt/cg_iters", uint64_t(ckpt.unroll.cg_iters));
  c.add_scalar_f64("ckpt/cg_tol", ckpt.unroll.cg_tol);
  c.add_scalar_f64("ckpt/mu_init", ckpt.unroll.mu_init);
  c.add_scalar_u64("ckpt/mu_trainable", ckpt.unroll.mu_trainable ? 1 : 0);
  c.add_scalar_u64("ckpt/k", uint64_t(ckpt.k));
  c.add_scalar_f64("ckpt/rho", ckpt.rho);
  c.add_scalar_u64("ckpt/seed", ckpt.seed);
  c.add_scalar_u64("ckpt/epochs", uint64_t(ckpt.epochs));
  c.add_scalar_f64("ckpt/lr", ckpt.lr);
  c.add_str("ckpt/mode", ckpt.mode);
  c.add_str("ckpt/dist", ckpt.dist);

  for (const auto& [name, tensor] : ckpt.params.tensor_views()) {
    std::vector<uint64_t> dims;
    if (name.ends_with(".w")) {
      const bool in = name == "conv_in.w";
      const bool out = name == "conv_out.w";
      const uint64_t cout = out ? 2 : uint64_t(ckpt.params.channels);
      const uint64_t cin = in ? 2 : uint64_t(ckpt.params.channels);
      dims = {cout, cin, 3, 3};
    } else {
      dims = {tensor->size()};
    }
    c.add_f64("param/" + name, dims, tensor->data());
  }
  write_dataset(path, c);
}

Checkpoint read_checkpoint(const std::string& path) {
  const DatasetContainer c = read_dataset(path);
  Checkpoint ckpt;
  const int channels = int(c.get_scalar_u64("ckpt/channels"));
  const int blocks = int(c.get_scalar_u64("ckpt/blocks"));
  ckpt.params = NetworkParams::init(channels, blocks, 0);
  ckpt.params.mu = c.get_scalar_f64("ckpt/mu");
  ckpt.unroll.t_unroll = int(c.get_scalar_u64("ckpt/t_unroll"));
  ckpt.unroll.cg_iters = int(c.get_scalar_u64("ckpt/cg_iters"));
  ckpt.unroll.cg_tol = c.get_scalar_f64("ckpt/cg_tol");
  ckpt.unroll.mu_init = c.get_scalar_f64("ckpt/mu_init");
  ckpt.unroll.mu_trainable = c.get_scalar_u64("ckpt/mu_trainable") != 0;
  ckpt.k = int(c.get_scalar_u64("ckpt/k"));
  ckpt.rho = c.get_scalar_f64("ckpt/rho");
  ckpt.seed = c.get_scalar_u64("ckpt/seed");
  ckpt.epochs = int(c.get_scalar_u64("ckpt/epochs"));
  ckpt.lr = c.get_scalar_f64("ckpt/lr");
  ckpt.mode = c.get_str("ckpt/mode");
  ckpt.dist = c.get_str("ckpt/dist");

  for (ParamRef& ref : ckpt.params.tensor_refs()) {
    std::vector<double> v = c.get_f64("param/" + ref.name);
    if (v.size() != ref.data->size())
      throw FormatError("checkpoint: tensor '" + ref.name + "' has wrong size");
    *ref.data = std::move(v);
  }
  ckpt.params.validate();
  return ckpt;
}

void add_partitions(DatasetContainer& c, const std::string& prefix, const PartitionSet& parts,
                    int ny, int nz) {
  c.add_scalar_u64(prefix + "/k", uint64_t(parts.k));
  c.add_scalar_f64(prefix + "/rho", parts.rho);
  c.add_scalar_u64(prefix + "/seed", parts.seed);
  for (int j = 0; j < parts.k; ++j) {
    c.add_bool(prefix + "/theta/" + std::to_string(j), {uint64_t(ny), uint64_t(nz)},
               parts.theta[j].data());
    c.add_bool(prefix + "/lambda/" + std::to_string(j), {uint64_t(ny), uint64_t(nz)},
               parts.lambda[j].data());
  }
}

PartitionSet get_partitions(const DatasetContainer& c, const std::string& prefix) {
  PartitionSet parts;
  parts.k = int(c.get_scalar_u64(prefix + "/k"));
  parts.rho = c.get_scalar_f64(prefix + "/rho");
  parts.seed = c.get_scalar_u64(prefix + "/seed");
  for (int j = 0; j < parts.k; ++j) {
    parts.theta.push_back(c.get_bool(prefix + "/theta/" + std::to_string(j)));
    parts.lambda.push_back(c.get_bool(prefix + "/lambda/" + std::to_string(j)));
  }
  return parts;
}

}  // namespace ssdu
