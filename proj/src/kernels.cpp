#include "quadrec/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace quadrec::kernels {

namespace {

struct Vtable {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum_sq)(const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scal)(double, double*, std::size_t);
  void (*syr)(double, const double*, std::size_t, double*);
};

constexpr Vtable kScalar{scalar::dot, scalar::sum_sq, scalar::axpy, scalar::scal, scalar::syr};

#if defined(QUADREC_HAVE_AVX2)
constexpr Vtable kAvx2{avx2::dot, avx2::sum_sq, avx2::axpy, avx2::scal, avx2::syr};

bool cpu_has_avx2() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

std::atomic<Isa> g_isa{Isa::scalar};
std::atomic<bool> g_resolved{false};

Isa resolve() {
  Isa isa = Isa::scalar;
#if defined(QUADREC_HAVE_AVX2)
  if (cpu_has_avx2()) isa = Isa::avx2;
#endif
  if (const char* env = std::getenv("QUADREC_ISA")) {
    if (std::strcmp(env, "scalar") == 0) {
      isa = Isa::scalar;
    } else if (std::strcmp(env, "avx2") == 0 && isa_available(Isa::avx2)) {
      isa = Isa::avx2;
    }
  }
  return isa;
}

const Vtable& active_table() {
  if (!g_resolved.load(std::memory_order_acquire)) {
    g_isa.store(resolve(), std::memory_order_relaxed);
    g_resolved.store(true, std::memory_order_release);
  }
#if defined(QUADREC_HAVE_AVX2)
  return g_isa.load(std::memory_order_relaxed) == Isa::avx2 ? kAvx2 : kScalar;
#else
  return kScalar;
#endif
}

}  // namespace

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) {
  if (isa == Isa::scalar) return true;
#if defined(QUADREC_HAVE_AVX2)
  return cpu_has_avx2();
#else
  return false;
#endif
}

Isa active_isa() {
  active_table();
  return g_isa.load(std::memory_order_relaxed);
}

void force_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument(std::string("kernel ISA not available: ") + isa_name(isa));
  }
  g_isa.store(isa, std::memory_order_relaxed);
  g_resolved.store(true, std::memory_order_release);
}

double dot(const double* x, const double* y, std::size_t n) { return active_table().dot(x, y, n); }
double sum_sq(const double* x, std::size_t n) { return active_table().sum_sq(x, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) { active_table().axpy(alpha, x, y, n); }
void scal(double alpha, double* x, std::size_t n) { active_table().scal(alpha, x, n); }
void syr(double alpha, const double* x, std::size_t n, double* a) { active_table().syr(alpha, x, n, a); }

}  // namespace quadrec::kernels
