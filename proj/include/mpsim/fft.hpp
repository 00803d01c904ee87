#pragma once

#include "mpsim/grid.hpp"

namespace mpsim {

/// Owns a forward/inverse pair of 3D complex FFTW plans for one grid.
///
/// forward() computes the unnormalized sum f_k = sum_x f(x) e^{-2 pi i m.j/n};
/// inverse() includes the 1/N factor, so inverse(forward(f)) = f.  Plans are
/// built with FFTW_ESTIMATE so the same transform is used on every run.
class FftPlan {
 public:
  explicit FftPlan(const Grid& grid);
  ~FftPlan();

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  FftPlan(FftPlan&& other) noexcept;
  FftPlan& operator=(FftPlan&& other) noexcept;

  void forward(ComplexField& data) const;
  void inverse(ComplexField& data) const;
  std::size_t size() const noexcept { return size_; }

 private:
  void release() noexcept;

  std::size_t size_ = 0;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

/// Caps FFTW's internal thread count for plans created afterwards.  Reads
/// MPSIM_THREADS when called with n <= 0.  Returns the count in effect.
int configure_fft_threads(int n = 0);

}  // namespace mpsim
