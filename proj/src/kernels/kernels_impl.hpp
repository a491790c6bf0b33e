#pragma once

// Raw per-backend entry points. Only the dispatcher includes this; the
// vectorized translation units include nothing from the standard library so
// no inline function gets compiled with wider ISA flags.

#include <cstddef>

namespace fedact::kernels::scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void lerp(double t, const double* x, double* y, std::size_t n);
}  // namespace fedact::kernels::scalar

#if defined(FEDACT_HAVE_AVX2)
namespace fedact::kernels::avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void lerp(double t, const double* x, double* y, std::size_t n);
}  // namespace fedact::kernels::avx2
#endif

#if defined(FEDACT_HAVE_NEON)
namespace fedact::kernels::neon {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void lerp(double t, const double* x, double* y, std::size_t n);
}  // namespace fedact::kernels::neon
#endif
