#pragma once

#include <complex>

namespace pintoc {

/// Complex DFT of fixed length n, unnormalized.
/// forward() uses the kernel e^{-2*pi*i*jk/n}, backward() its conjugate;
/// backward(forward(x)) == n*x.
///
/// Plan creation is serialized internally; execution on caller buffers is
/// safe from multiple threads.
class Dft {
public:
  explicit Dft(int n);
  ~Dft();
  Dft(const Dft&) = delete;
  Dft& operator=(const Dft&) = delete;
  Dft(Dft&& other) noexcept;

  int size() const { return n_; }
  void forward(std::complex<double>* data) const;
  void backward(std::complex<double>* data) const;

private:
  int n_ = 0;
  void* fwd_ = nullptr;
  void* bwd_ = nullptr;
};

/// 2-D discrete sine transform (DST-I) on an m x m grid of interior points,
/// row index = second coordinate, column index (fastest) = first coordinate.
/// The transform matrix S satisfies S*S = 4*(m+1)^2 * I; divide by
/// normalization() to invert a double application.
class Dst2D {
public:
  explicit Dst2D(int m);
  ~Dst2D();
  Dst2D(const Dst2D&) = delete;
  Dst2D& operator=(const Dst2D&) = delete;
  Dst2D(Dst2D&& other) noexcept;

  int size() const { return m_; }
  double normalization() const { return 4.0 * (m_ + 1.0) * (m_ + 1.0); }
  void transform(double* data) const;  // in-place, length m*m

private:
  int m_ = 0;
  void* plan_ = nullptr;
};

/// Batched 1-D DST-I along the fastest dimension of an m x m block:
/// m independent unnormalized transforms of length m.  Applying the batch
/// twice multiplies the data by normalization() = 2(m+1).
class Dst1DBatch {
public:
  explicit Dst1DBatch(int m);
  ~Dst1DBatch();
  Dst1DBatch(const Dst1DBatch&) = delete;
  Dst1DBatch& operator=(const Dst1DBatch&) = delete;
  Dst1DBatch(Dst1DBatch&& other) noexcept;

  int size() const { return m_; }
  double normalization() const { return 2.0 * (m_ + 1.0); }
  void transform(double* data) const;  // in-place, length m*m

private:
  int m_ = 0;
  void* plan_ = nullptr;
};

}  // namespace pintoc
