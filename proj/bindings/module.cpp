// Python bindings for the core operations: phantom simulation, sampling
// patterns and SSDU splits, the encoding operator pair, CG-SENSE, the
// unrolled reconstruction and the image metrics.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ssdu/dataset.hpp"
#include "ssdu/encoding.hpp"
#include "ssdu/fft.hpp"
#include "ssdu/metrics.hpp"
#include "ssdu/phantom.hpp"
#include "ssdu/sampling.hpp"
#include "ssdu/solver.hpp"
#include "ssdu/training.hpp"

namespace py = pybind11;
using namespace ssdu;

namespace {

using CArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;
using BArray = py::array_t<bool, py::array::c_style | py::array::forcecast>;

ComplexImage image_from(const CArray& a) {
  if (a.ndim() != 2) throw DimensionError("expected a 2-D complex array");
  ComplexImage img(int(a.shape(0)), int(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), img.data.begin());
  return img;
}

CArray image_to(const ComplexImage& img) {
  CArray out({size_t(img.ny), size_t(img.nz)});
  std::copy(img.data.begin(), img.data.end(), out.mutable_data());
  return out;
}

CoilSensitivities coils_from(const CArray& a) {
  if (a.ndim() != 3) throw DimensionError("expected a (ncoils, ny, nz) complex array");
  CoilSensitivities c(int(a.shape(0)), int(a.shape(1)), int(a.shape(2)));
  std::copy(a.data(), a.data() + a.size(), c.maps.begin());
  return c;
}

CArray coils_to(const CoilSensitivities& c) {
  CArray out({size_t(c.ncoils), size_t(c.ny), size_t(c.nz)});
  std::copy(c.maps.begin(), c.maps.end(), out.mutable_data());
  return out;
}

SamplingPattern pattern_from(const BArray& mask, int acs_h, int acs_w) {
  if (mask.ndim() != 2) throw DimensionError("expected a 2-D boolean mask");
  SamplingPattern pat(int(mask.shape(0)), int(mask.shape(1)), acs_h, acs_w);
  for (py::ssize_t i = 0; i < mask.size(); ++i) pat.mask[size_t(i)] = mask.data()[i] ? 1 : 0;
  return pat;
}

BArray mask_to(const std::vector<uint8_t>& mask, int ny, int nz) {
  BArray out({size_t(ny), size_t(nz)});
  for (size_t i = 0; i < mask.size(); ++i) out.mutable_data()[i] = mask[i] != 0;
  return out;
}

KSpaceSample kspace_from(const CArray& y, const SamplingPattern& pat) {
  if (y.ndim() != 3) throw DimensionError("expected a (ncoils, ny, nz) complex array");
  KSpaceSample out(int(y.shape(0)), pat);
  std::copy(y.data(), y.data() + y.size(), out.data.begin());
  return out;
}

CArray kspace_to(const KSpaceSample& y) {
  CArray out({size_t(y.ncoils), size_t(y.ny()), size_t(y.nz())});
  std::copy(y.data.begin(), y.data.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_ssdu, m) {
  m.doc() = "multi-mask self-supervised MRI reconstruction core";

  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_IOError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("make_phantom", [](int n, uint64_t seed) { return image_to(make_phantom(n, seed)); },
        py::arg("n"), py::arg("seed") = 0);

  m.def("simulate_coils",
        [](int n, int ncoils) { return coils_to(simulate_coils(n, ncoils)); }, py::arg("n"),
        py::arg("ncoils"));

  m.def("fft2c", [](const CArray& x) { return image_to(fft2_centered(image_from(x))); });
  m.def("ifft2c", [](const CArray& x) { return image_to(ifft2_centered(image_from(x))); });

  m.def(
      "gen_sheared_pattern",
      [](int ny, int nz, int r_y, int r_z, int shear, int acs) {
        UndersamplingSpec spec;
        spec.r_y = r_y;
        spec.r_z = r_z;
        spec.r_total = r_y * r_z;
        spec.shear_step = shear;
        spec.acs_h = acs;
        spec.acs_w = acs;
        SamplingPattern pat = gen_sheared_pattern(ny, nz, spec);
        return py::make_tuple(mask_to(pat.mask, ny, nz), pat.acceleration());
      },
      py::arg("ny"), py::arg("nz"), py::arg("r_y"), py::arg("r_z"), py::arg("shear") = 1,
      py::arg("acs") = 8);

  m.def(
      "apply_encoding",
      [](const CArray& x, const CArray& coils, const BArray& mask, int acs) {
        SamplingPattern pat = pattern_from(mask, acs, acs);
        return kspace_to(apply_encoding(image_from(x), coils_from(coils), pat));
      },
      py::arg("x"), py::arg("coils"), py::arg("mask"), py::arg("acs") = 0);

  m.def(
      "apply_adjoint",
      [](const CArray& y, const CArray& coils, const BArray& mask, int acs) {
        SamplingPattern pat = pattern_from(mask, acs, acs);
        return image_to(apply_adjoint(kspace_from(y, pat), coils_from(coils)));
      },
      py::arg("y"), py::arg("coils"), py::arg("mask"), py::arg("acs") = 0);

  m.def(
      "simulate_acquisition",
      [](const CArray& x, const CArray& coils, const BArray& mask, int acs, double sigma,
         uint64_t seed) {
        SamplingPattern pat = pattern_from(mask, acs, acs);
        return kspace_to(
            simulate_acquisition(image_from(x), coils_from(coils), pat, NoiseSpec{sigma, seed}));
      },
      py::arg("x"), py::arg("coils"), py::arg("mask"), py::arg("acs") = 0,
      py::arg("sigma") = 0.0, py::arg("seed") = 0);

  m.def(
      "split_ssdu",
      [](const BArray& mask, int acs, double rho, const std::string& dist, double sigma_frac,
         uint64_t seed) {
        SamplingPattern pat = pattern_from(mask, acs, acs);
        MaskDistribution d = dist == "gaussian" ? MaskDistribution::gaussian(sigma_frac)
                                                : MaskDistribution::uniform();
        std::vector<uint8_t> theta, lambda;
        split_ssdu(pat, rho, d, seed, theta, lambda);
        return py::make_tuple(mask_to(theta, pat.ny, pat.nz), mask_to(lambda, pat.ny, pat.nz));
      },
      py::arg("mask"), py::arg("acs"), py::arg("rho"), py::arg("dist") = "uniform",
      py::arg("sigma_frac") = 0.25, py::arg("seed") = 0);

  m.def(
      "gen_multi_mask",
      [](const BArray& mask, int acs, int k, double rho, const std::string& dist,
         uint64_t seed) {
        SamplingPattern pat = pattern_from(mask, acs, acs);
        MaskDistribution d =
            dist == "gaussian" ? MaskDistribution::gaussian() : MaskDistribution::uniform();
        PartitionSet parts = gen_multi_mask(pat, k, rho, d, seed);
        py::list thetas, lambdas;
        for (int j = 0; j < k; ++j) {
          thetas.append(mask_to(parts.theta[size_t(j)], pat.ny, pat.nz));
          lambdas.append(mask_to(parts.lambda[size_t(j)], pat.ny, pat.nz));
        }
        return py::make_tuple(thetas, lambdas);
      },
      py::arg("mask"), py::arg("acs"), py::arg("k"), py::arg("rho"),
      py::arg("dist") = "uniform", py::arg("seed") = 0);

  m.def(
      "gen_cyclic_multi_mask",
      [](const BArray& mask, int acs, int k, uint64_t seed) {
        SamplingPattern pat = pattern_from(mask, acs, acs);
        PartitionSet parts = gen_cyclic_multi_mask(pat, k, seed);
        py::list thetas, lambdas;
        for (int j = 0; j < k; ++j) {
          thetas.append(mask_to(parts.theta[size_t(j)], pat.ny, pat.nz));
          lambdas.append(mask_to(parts.lambda[size_t(j)], pat.ny, pat.nz));
        }
        return py::make_tuple(thetas, lambdas);
      },
      py::arg("mask"), py::arg("acs"), py::arg("k"), py::arg("seed") = 0);

  m.def(
      "cg_sense",
      [](const CArray& y, const CArray& coils, const BArray& mask, int acs, double l2_weight,
         int iters, double tol) {
        SamplingPattern pat = pattern_from(mask, acs, acs);
        UnrollConfig cfg;
        cfg.cg_iters = iters;
        cfg.cg_tol = tol;
        return image_to(cg_sense(kspace_from(y, pat), coils_from(coils), l2_weight, cfg));
      },
      py::arg("y"), py::arg("coils"), py::arg("mask"), py::arg("acs") = 0,
      py::arg("l2_weight") = 0.0, py::arg("iters") = 50, py::arg("tol") = 1e-8);

  m.def(
      "reconstruct",
      [](const CArray& y, const CArray& coils, const BArray& mask, int acs,
         const std::string& ckpt_path) {
        Checkpoint ckpt = read_checkpoint(ckpt_path);
        SamplingPattern pat = pattern_from(mask, acs, acs);
        KSpaceSample ys = kspace_from(y, pat);
        double m = 0;
        for (const cplx& v : ys.data) m = std::max(m, std::abs(v));
        if (m == 0) throw DataError("reconstruct: empty k-space");
        for (cplx& v : ys.data) v /= m;
        ys.scale = m;
        return image_to(reconstruct_test(ys, coils_from(coils), ckpt.params, ckpt.unroll));
      },
      py::arg("y"), py::arg("coils"), py::arg("mask"), py::arg("acs"), py::arg("ckpt_path"));

  m.def("nmse", [](const CArray& ref, const CArray& rec) {
    return nmse(image_from(ref), image_from(rec));
  });
  m.def("ssim", [](const CArray& ref, const CArray& rec) {
    return ssim(image_from(ref), image_from(rec));
  });

  m.attr("__version__") = "0.1.0";
}
