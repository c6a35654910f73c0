#include <cstddef>

#include "tables.hpp"

namespace ratgraph::kernels::detail {
namespace {

double dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void rotate(double* x, double* y, double c, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

void rank2_update(double* w, double f, const double* e, double g,
                  const double* d, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) w[i] -= f * e[i] + g * d[i];
}

void horner(const double* coeffs, std::size_t ncoeffs, const double* t,
            double* out, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t k = ncoeffs; k-- > 0;) acc = acc * t[j] + coeffs[k];
    out[j] = acc;
  }
}

void power_sums(const double* w, const double* t, std::size_t n, double* sums,
                std::size_t nsums) {
  for (std::size_t k = 0; k < nsums; ++k) sums[k] = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double p = w[j];
    for (std::size_t k = 0; k < nsums; ++k) {
      sums[k] += p;
      p *= t[j];
    }
  }
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::kScalar, dot,    axpy,       rotate,
                                 rank2_update, horner, power_sums, squared_distance};
  return table;
}

}  // namespace ratgraph::kernels::detail
