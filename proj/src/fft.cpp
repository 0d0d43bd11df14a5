#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace kms::detail {

namespace {

struct PlanPair {
  fftw_plan forward;
  fftw_plan inverse;
};

// FFTW's planner is not thread-safe; execution through the new-array
// interface is. Plans live for the whole process.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

PlanPair plans_for(const std::array<int, 3>& n) {
  static std::map<std::array<int, 3>, PlanPair> cache;
  std::lock_guard lock(planner_mutex());
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  const std::size_t real = static_cast<std::size_t>(n[0]) * n[1] * n[2];
  const std::size_t half = static_cast<std::size_t>(n[0]) * n[1] * (n[2] / 2 + 1);
  double* r = fftw_alloc_real(real);
  fftw_complex* c = fftw_alloc_complex(half);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p{fftw_plan_dft_r2c_3d(n[0], n[1], n[2], r, c, flags),
             fftw_plan_dft_c2r_3d(n[0], n[1], n[2], c, r, flags)};
  fftw_free(r);
  fftw_free(c);
  cache.emplace(n, p);
  return p;
}

}  // namespace

RealFft3::RealFft3(std::array<int, 3> dims) : n_(dims) {
  const PlanPair p = plans_for(n_);
  forward_plan_ = p.forward;
  inverse_plan_ = p.inverse;
}

void RealFft3::forward(const double* in, Complex* out) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void RealFft3::inverse(Complex* in, double* out) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), reinterpret_cast<fftw_complex*>(in),
                       out);
}

std::array<std::vector<double>, 3> spectral_partials(std::span<const double> values,
                                                     const GridGeometry& g) {
  RealFft3 fft(g.dims());
  std::vector<Complex> hat(fft.half_size());
  fft.forward(values.data(), hat.data());
  const double norm = 1.0 / static_cast<double>(fft.real_size());

  std::array<std::vector<double>, 3> out;
  std::vector<Complex> work(fft.half_size());
  for (int axis = 0; axis < 3; ++axis) {
    for_each_mode(g.dims(), [&](int ix, int iy, int iz, std::size_t idx) {
      const double k = derivative_wavenumber(g, ix, iy, iz)[axis];
      work[idx] = Complex(0.0, k * norm) * hat[idx];
    });
    out[axis].resize(fft.real_size());
    fft.inverse(work.data(), out[axis].data());
  }
  return out;
}

}  // namespace kms::detail
