#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "fedact/kernels.hpp"
#include "kernels_impl.hpp"

namespace fedact::kernels {
namespace {

constexpr KernelTable kScalarTable{Backend::kScalar, "scalar", &scalar::dot, &scalar::axpy,
                                   &scalar::lerp};
#if defined(FEDACT_HAVE_AVX2)
constexpr KernelTable kAvx2Table{Backend::kAvx2, "avx2", &avx2::dot, &avx2::axpy, &avx2::lerp};
#endif
#if defined(FEDACT_HAVE_NEON)
constexpr KernelTable kNeonTable{Backend::kNeon, "neon", &neon::dot, &neon::axpy, &neon::lerp};
#endif

const KernelTable* initial_table() noexcept {
  Backend choice = best_backend();
  if (const char* env = std::getenv("FEDACT_SIMD")) {
    try {
      const std::string value(env);
      if (value != "auto") {
        const Backend requested = parse_backend(value);
        if (backend_available(requested)) choice = requested;
      }
    } catch (const std::invalid_argument&) {
      // Unrecognized values keep the automatic choice.
    }
  }
  return &table(choice);
}

std::atomic<const KernelTable*>& current() noexcept {
  static std::atomic<const KernelTable*> ptr{initial_table()};
  return ptr;
}

}  // namespace

bool backend_available(Backend backend) noexcept {
  switch (backend) {
    case Backend::kScalar:
      return true;
    case Backend::kAvx2:
#if defined(FEDACT_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::kNeon:
#if defined(FEDACT_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Backend backend) {
  if (!backend_available(backend)) {
    throw std::invalid_argument("SIMD backend not available on this CPU");
  }
  switch (backend) {
#if defined(FEDACT_HAVE_AVX2)
    case Backend::kAvx2:
      return kAvx2Table;
#endif
#if defined(FEDACT_HAVE_NEON)
    case Backend::kNeon:
      return kNeonTable;
#endif
    default:
      return kScalarTable;
  }
}

Backend best_backend() noexcept {
  if (backend_available(Backend::kAvx2)) return Backend::kAvx2;
  if (backend_available(Backend::kNeon)) return Backend::kNeon;
  return Backend::kScalar;
}

Backend parse_backend(std::string_view name) {
  if (name == "scalar") return Backend::kScalar;
  if (name == "avx2") return Backend::kAvx2;
  if (name == "neon") return Backend::kNeon;
  if (name == "auto") return best_backend();
  throw std::invalid_argument("unknown SIMD backend: " + std::string(name));
}

const KernelTable& active() noexcept { return *current().load(std::memory_order_acquire); }

void use_backend(Backend backend) {
  current().store(&table(backend), std::memory_order_release);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("kernels::dot: length mismatch");
  return active().dot(a.data(), b.data(), a.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("kernels::axpy: length mismatch");
  active().axpy(a, x.data(), y.data(), x.size());
}

void lerp(double t, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("kernels::lerp: length mismatch");
  active().lerp(t, x.data(), y.data(), x.size());
}

}  // namespace fedact::kernels
