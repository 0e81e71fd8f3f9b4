#include <cstdlib>
#include <string>

#include "bsid/kernels.hpp"
#include "kernels_impl.hpp"

namespace bsid::kernels {

namespace {

constexpr KernelTable kScalar{Isa::scalar, detail::dot_scalar, detail::sum_squares_scalar,
                              detail::sum_squared_diff_scalar, detail::axpy_scalar};

#if defined(BSID_HAVE_AVX2_KERNELS)
constexpr KernelTable kAvx2{Isa::avx2, detail::dot_avx2, detail::sum_squares_avx2,
                            detail::sum_squared_diff_avx2, detail::axpy_avx2};
#endif

#if defined(BSID_HAVE_NEON_KERNELS)
constexpr KernelTable kNeon{Isa::neon, detail::dot_neon, detail::sum_squares_neon,
                            detail::sum_squared_diff_neon, detail::axpy_neon};
#endif

const KernelTable& select_active() {
  if (const char* env = std::getenv("BSID_KERNELS"); env != nullptr && std::string(env) == "scalar") {
    return kScalar;
  }
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (const KernelTable* t = table_for(isa)) return *t;
  }
  return kScalar;
}

void check_same_length(std::size_t a, std::size_t b) {
  if (a != b) throw ConfigError("kernel operands differ in length");
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return &kScalar;
    case Isa::avx2:
#if defined(BSID_HAVE_AVX2_KERNELS)
      if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &kAvx2;
#endif
      return nullptr;
    case Isa::neon:
#if defined(BSID_HAVE_NEON_KERNELS)
      return &kNeon;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
    if (table_for(isa) != nullptr) out.push_back(isa);
  }
  return out;
}

const KernelTable& active() {
  static const KernelTable& table = select_active();
  return table;
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_same_length(a.size(), b.size());
  return active().dot(a.data(), b.data(), a.size());
}

double sum_squares(std::span<const double> a) { return active().sum_squares(a.data(), a.size()); }

double sum_squared_diff(std::span<const double> a, std::span<const double> b) {
  check_same_length(a.size(), b.size());
  return active().sum_squared_diff(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_same_length(x.size(), y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

Matrix cross_rows(const Matrix& a, const Matrix& b) { return cross_rows(a, b, active()); }

Matrix cross_rows(const Matrix& a, const Matrix& b, const KernelTable& table) {
  if (a.cols() != b.cols()) throw ConfigError("cross_rows: column counts differ");
  const RowMajorMatrix ar = a;
  const RowMajorMatrix br = b;
  const auto n = static_cast<std::size_t>(a.cols());
  Matrix out(a.rows(), b.rows());
  for (Index r = 0; r < a.rows(); ++r) {
    for (Index c = 0; c < b.rows(); ++c) {
      out(r, c) = table.dot(ar.row(r).data(), br.row(c).data(), n);
    }
  }
  return out;
}

Matrix gram_rows(const Matrix& a) { return gram_rows(a, active()); }

Matrix gram_rows(const Matrix& a, const KernelTable& table) {
  const RowMajorMatrix ar = a;
  const auto n = static_cast<std::size_t>(a.cols());
  Matrix out(a.rows(), a.rows());
  for (Index r = 0; r < a.rows(); ++r) {
    out(r, r) = table.sum_squares(ar.row(r).data(), n);
    for (Index c = 0; c < r; ++c) {
      out(r, c) = table.dot(ar.row(r).data(), ar.row(c).data(), n);
      out(c, r) = out(r, c);
    }
  }
  return out;
}

}  // namespace bsid::kernels
