#include "mpsim/fft.hpp"

#include <fftw3.h>

#include <cstdlib>
#include <mutex>
#include <string>

#include "mpsim/error.hpp"

namespace mpsim {

namespace {

// FFTW's planner is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

int configure_fft_threads(int n) {
  std::lock_guard lock(planner_mutex());
  static bool initialised = false;
  if (!initialised) {
    fftw_init_threads();
    initialised = true;
  }
  if (n <= 0) {
    n = 1;
    if (const char* env = std::getenv("MPSIM_THREADS")) {
      const int v = std::atoi(env);
      if (v > 0) n = v;
    }
  }
  fftw_plan_with_nthreads(n);
  return n;
}

FftPlan::FftPlan(const Grid& grid) : size_(grid.size()) {
  ComplexField scratch(size_);
  auto* data = reinterpret_cast<fftw_complex*>(scratch.data());
  const int n = grid.n();
  std::lock_guard lock(planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftw_plan_dft_3d(n, n, n, data, data, FFTW_FORWARD, flags);
  inverse_plan_ = fftw_plan_dft_3d(n, n, n, data, data, FFTW_BACKWARD, flags);
  if (!forward_plan_ || !inverse_plan_) {
    release();
    throw Error(ErrorClass::config, "fft: could not create plans for n = " + std::to_string(n));
  }
}

FftPlan::~FftPlan() { release(); }

FftPlan::FftPlan(FftPlan&& other) noexcept
    : size_(other.size_), forward_plan_(other.forward_plan_), inverse_plan_(other.inverse_plan_) {
  other.forward_plan_ = nullptr;
  other.inverse_plan_ = nullptr;
}

FftPlan& FftPlan::operator=(FftPlan&& other) noexcept {
  if (this != &other) {
    release();
    size_ = other.size_;
    forward_plan_ = other.forward_plan_;
    inverse_plan_ = other.inverse_plan_;
    other.forward_plan_ = nullptr;
    other.inverse_plan_ = nullptr;
  }
  return *this;
}

void FftPlan::release() noexcept {
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  forward_plan_ = nullptr;
  inverse_plan_ = nullptr;
}

void FftPlan::forward(ComplexField& data) const {
  if (data.size() != size_)
    throw Error(ErrorClass::config, "fft: field size " + std::to_string(data.size()) +
                                        " does not match grid size " + std::to_string(size_));
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), p, p);
}

void FftPlan::inverse(ComplexField& data) const {
  if (data.size() != size_)
    throw Error(ErrorClass::config, "fft: field size " + std::to_string(data.size()) +
                                        " does not match grid size " + std::to_string(size_));
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(inverse_plan_), p, p);
  const double scale = 1.0 / static_cast<double>(size_);
  for (cplx& v : data) v *= scale;
}

}  // namespace mpsim
