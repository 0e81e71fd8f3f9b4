#pragma once

#include <cstddef>

namespace bsid::kernels::detail {

double dot_scalar(const double* a, const double* b, std::size_t n);
double sum_squares_scalar(const double* a, std::size_t n);
double sum_squared_diff_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);

#if defined(BSID_HAVE_AVX2_KERNELS)
double dot_avx2(const double* a, const double* b, std::size_t n);
double sum_squares_avx2(const double* a, std::size_t n);
double sum_squared_diff_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
#endif

#if defined(BSID_HAVE_NEON_KERNELS)
double dot_neon(const double* a, const double* b, std::size_t n);
double sum_squares_neon(const double* a, std::size_t n);
double sum_squared_diff_neon(const double* a, const double* b, std::size_t n);
void axpy_neon(double alpha, const double* x, double* y, std::size_t n);
#endif

}  // namespace bsid::kernels::detail
