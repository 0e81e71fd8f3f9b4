#pragma once

// Data-parallel inner loops used by the Gibbs sampler and the metrics.
//
// Every kernel has a portable scalar reference implementation. Vector
// variants (AVX2+FMA on x86-64, NEON on aarch64) are compiled into separate
// translation units and picked once at runtime from the CPU feature set.
// Setting BSID_KERNELS=scalar in the environment forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "bsid/types.hpp"

namespace bsid::kernels {

enum class Isa { scalar, avx2, neon };

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum_squares)(const double* a, std::size_t n);
  double (*sum_squared_diff)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

std::string_view isa_name(Isa isa);

// Table for a given ISA, or nullptr when it is not compiled in or the CPU
// lacks the required features.
const KernelTable* table_for(Isa isa);

// All ISAs usable on this machine, scalar first.
std::vector<Isa> available_isas();

// The table chosen at startup.
const KernelTable& active();

double dot(std::span<const double> a, std::span<const double> b);
double sum_squares(std::span<const double> a);
double sum_squared_diff(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

// A * B^T where rows of A and B are long (time axis). Uses the active table.
Matrix cross_rows(const Matrix& a, const Matrix& b);
Matrix cross_rows(const Matrix& a, const Matrix& b, const KernelTable& table);

// A * A^T, symmetric.
Matrix gram_rows(const Matrix& a);
Matrix gram_rows(const Matrix& a, const KernelTable& table);

}  // namespace bsid::kernels
