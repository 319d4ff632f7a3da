#pragma once

#include <cstddef>
#include <string>
#include <vector>

// Dense double-precision inner loops used by the linear-algebra layer.
// Every operation has a scalar reference implementation and may have
// vectorized variants; the active variant is chosen once at startup from
// CPU features (override with CPCA_KERNELS=scalar|avx2 or kern::force()).
// Variants must agree with the scalar reference to round-off; the unit
// suite checks this on random inputs.

namespace cpca::kern {

struct Ops {
  const char* name;
  // sum_i x[i]*y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y[i] += a*x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // x[i] *= a
  void (*scal)(double a, double* x, std::size_t n);
  // sum_i x[i]^2
  double (*sumsq)(const double* x, std::size_t n);
  // sum_i x[i]
  double (*sum)(const double* x, std::size_t n);
  // Givens rotation of a column pair: (x, y) <- (c*x - s*y, s*x + c*y)
  void (*rot)(double* x, double* y, double c, double s, std::size_t n);
  // y[i] -= x[i]
  void (*sub)(double* y, const double* x, std::size_t n);
};

const Ops& scalar_ops();

// Selected at first use; honors the CPCA_KERNELS environment variable.
const Ops& active();

// Force a variant by name ("scalar", "avx2"); throws if unknown or
// unsupported on this machine.
void force(const std::string& name);

std::vector<std::string> available();

}  // namespace cpca::kern
