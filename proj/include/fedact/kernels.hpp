#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Dense double-precision primitives used by the training workload. Each
// backend implements the same table; the scalar one is the reference the
// vectorized variants are tested against.

namespace fedact::kernels {

enum class Backend { kScalar, kAvx2, kNeon };

using DotFn = double (*)(const double* a, const double* b, std::size_t n);
// y += a * x
using AxpyFn = void (*)(double a, const double* x, double* y, std::size_t n);
// y += t * (x - y)
using LerpFn = void (*)(double t, const double* x, double* y, std::size_t n);

struct KernelTable {
  Backend backend;
  const char* name;
  DotFn dot;
  AxpyFn axpy;
  LerpFn lerp;
};

bool backend_available(Backend backend) noexcept;
const KernelTable& table(Backend backend);

/// Backend in use. On first call it is picked from FEDACT_SIMD
/// (scalar|avx2|neon|auto), falling back to the best one the CPU supports.
const KernelTable& active() noexcept;
void use_backend(Backend backend);
Backend best_backend() noexcept;
Backend parse_backend(std::string_view name);

double dot(std::span<const double> a, std::span<const double> b);
void axpy(double a, std::span<const double> x, std::span<double> y);
void lerp(double t, std::span<const double> x, std::span<double> y);

}  // namespace fedact::kernels
