#include "pintoc/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>
#include <vector>

namespace pintoc {
namespace {

// FFTW's planner is not thread-safe; executions via the new-array interface
// are, provided the plan was created with FFTW_UNALIGNED.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

Dft::Dft(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("Dft: length must be >= 1");
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(n));
  auto* p = reinterpret_cast<fftw_complex*>(buf.data());
  std::lock_guard<std::mutex> lock(planner_mutex());
  fwd_ = fftw_plan_dft_1d(n, p, p, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  bwd_ = fftw_plan_dft_1d(n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
}

Dft::~Dft() {
  if (fwd_ || bwd_) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    if (bwd_) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
  }
}

Dft::Dft(Dft&& other) noexcept : n_(other.n_), fwd_(other.fwd_), bwd_(other.bwd_) {
  other.fwd_ = nullptr;
  other.bwd_ = nullptr;
}

void Dft::forward(std::complex<double>* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(fwd_), p, p);
}

void Dft::backward(std::complex<double>* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(bwd_), p, p);
}

Dst2D::Dst2D(int m) : m_(m) {
  if (m < 1) throw std::invalid_argument("Dst2D: grid size must be >= 1");
  std::vector<double> buf(static_cast<std::size_t>(m) * m);
  std::lock_guard<std::mutex> lock(planner_mutex());
  plan_ = fftw_plan_r2r_2d(m, m, buf.data(), buf.data(), FFTW_RODFT00, FFTW_RODFT00,
                           FFTW_ESTIMATE | FFTW_UNALIGNED);
}

Dst2D::~Dst2D() {
  if (plan_) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  }
}

Dst2D::Dst2D(Dst2D&& other) noexcept : m_(other.m_), plan_(other.plan_) {
  other.plan_ = nullptr;
}

void Dst2D::transform(double* data) const {
  fftw_execute_r2r(static_cast<fftw_plan>(plan_), data, data);
}

Dst1DBatch::Dst1DBatch(int m) : m_(m) {
  if (m < 1) throw std::invalid_argument("Dst1DBatch: grid size must be >= 1");
  std::vector<double> buf(static_cast<std::size_t>(m) * m);
  const int n[1] = {m};
  const fftw_r2r_kind kind[1] = {FFTW_RODFT00};
  std::lock_guard<std::mutex> lock(planner_mutex());
  plan_ = fftw_plan_many_r2r(1, n, m, buf.data(), nullptr, 1, m, buf.data(),
                             nullptr, 1, m, kind,
                             FFTW_MEASURE | FFTW_UNALIGNED);
}

Dst1DBatch::~Dst1DBatch() {
  if (plan_) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  }
}

Dst1DBatch::Dst1DBatch(Dst1DBatch&& other) noexcept
    : m_(other.m_), plan_(other.plan_) {
  other.plan_ = nullptr;
}

void Dst1DBatch::transform(double* data) const {
  fftw_execute_r2r(static_cast<fftw_plan>(plan_), data, data);
}

}  // namespace pintoc
