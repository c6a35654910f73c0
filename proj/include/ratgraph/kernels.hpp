#pragma once

// Data-parallel inner loops used across the library. Each kernel has a scalar
// reference implementation and, on x86-64, an AVX2/FMA variant. The variant is
// picked once at startup from CPUID; RATGRAPH_SIMD=scalar forces the reference
// path. Variants agree to rounding (see tests/kernels_test.cpp), not bitwise:
// FMA contraction and lane-wise partial sums reorder the arithmetic.

#include <cstddef>
#include <span>
#include <string_view>

namespace ratgraph::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view to_string(Isa isa);

struct KernelTable {
  Isa isa;
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // (x, y) <- (c x - s y, s x + c y), a Givens rotation of two rows.
  void (*rotate)(double* x, double* y, double c, double s, std::size_t n);
  // w[i] -= f * e[i] + g * d[i]
  void (*rank2_update)(double* w, double f, const double* e, double g,
                       const double* d, std::size_t n);
  // out[j] = sum_k coeffs[k] * t[j]^k, Horner per lane.
  void (*horner)(const double* coeffs, std::size_t ncoeffs, const double* t,
                 double* out, std::size_t n);
  // sums[k] = sum_j w[j] * t[j]^k for k in [0, nsums).
  void (*power_sums)(const double* w, const double* t, std::size_t n,
                     double* sums, std::size_t nsums);
  // sum_i (a[i] - b[i])^2
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
};

const KernelTable& scalar_table();

// nullptr when the variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

// Table used by the span helpers below.
const KernelTable& active();

// Overrides the dispatch choice process-wide. Selecting an ISA the CPU cannot
// run falls back to scalar and returns false.
bool select(Isa isa);

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), x.size());
}

inline void rotate(std::span<double> x, std::span<double> y, double c, double s) {
  active().rotate(x.data(), y.data(), c, s, x.size());
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  return active().squared_distance(a.data(), b.data(), a.size());
}

inline void horner(std::span<const double> coeffs, std::span<const double> t,
                   std::span<double> out) {
  active().horner(coeffs.data(), coeffs.size(), t.data(), out.data(), t.size());
}

inline void power_sums(std::span<const double> w, std::span<const double> t,
                       std::span<double> sums) {
  active().power_sums(w.data(), t.data(), w.size(), sums.data(), sums.size());
}

}  // namespace ratgraph::kernels
