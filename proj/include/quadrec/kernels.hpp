// Runtime-dispatched dense kernels: the per-sample inner loops of the whole
// library (dots against sensing vectors, gradient accumulation, rank-1
// symmetric updates) funnel through these. A scalar reference path always
// exists; an AVX2+FMA path is selected at startup when the CPU supports it.
// The two are equivalence-tested in tests/test_kernels.cpp.
#pragma once

#include <cstddef>

namespace quadrec::kernels {

enum class Isa { scalar, avx2 };

const char* isa_name(Isa isa);
bool isa_available(Isa isa);

// Currently active instruction set. Resolved once on first kernel call:
// AVX2 when available unless the QUADREC_ISA environment variable
// ("scalar" | "avx2") or force_isa() says otherwise.
Isa active_isa();

// Overrides the dispatch. Throws std::invalid_argument if `isa` is not
// available on this machine/build.
void force_isa(Isa isa);

// x.y
double dot(const double* x, const double* y, std::size_t n);

// sum of squares of x
double sum_sq(const double* x, std::size_t n);

// y += alpha * x   (elementwise fma; bitwise identical across paths)
void axpy(double alpha, const double* x, double* y, std::size_t n);

// x *= alpha
void scal(double alpha, double* x, std::size_t n);

// Column-major n-by-n A += alpha * x x^T (full matrix, both triangles)
void syr(double alpha, const double* x, std::size_t n, double* a);

// Reference implementations, callable directly (used by equivalence tests).
namespace scalar {
double dot(const double* x, const double* y, std::size_t n);
double sum_sq(const double* x, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scal(double alpha, double* x, std::size_t n);
void syr(double alpha, const double* x, std::size_t n, double* a);
}  // namespace scalar

#if defined(QUADREC_HAVE_AVX2)
namespace avx2 {
double dot(const double* x, const double* y, std::size_t n);
double sum_sq(const double* x, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scal(double alpha, double* x, std::size_t n);
void syr(double alpha, const double* x, std::size_t n, double* a);
}  // namespace avx2
#endif

}  // namespace quadrec::kernels
