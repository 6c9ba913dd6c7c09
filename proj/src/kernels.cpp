#include "deconet/kernels.hpp"

#include <vector>

#include "deconet/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace deconet::kernels {

namespace {

constexpr std::size_t kParallelWork = 1u << 15;

void check_nn(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul: inner dimensions differ");
}
void check_tn(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows()) throw DimensionError("matmul_tn: row counts differ");
}
void check_nt(const Mat& a, const Mat& b) {
  if (a.cols() != b.cols()) throw DimensionError("matmul_nt: column counts differ");
}
void check_out(const Mat& c, std::size_t r, std::size_t k) {
  if (c.rows() != r || c.cols() != k) throw DimensionError("accumulator has the wrong shape");
}

// Row i of A*B, written to out (length b.cols()).
inline void row_nn(const Mat& a, const Mat& b, std::size_t i, double* out) {
  const std::size_t nc = b.cols();
  for (std::size_t j = 0; j < nc; ++j) out[j] = 0.0;
  const double* ar = a.row_ptr(i);
  for (std::size_t k = 0; k < a.cols(); ++k) {
    const double aik = ar[k];
    if (aik == 0.0) continue;
    const double* br = b.row_ptr(k);
    for (std::size_t j = 0; j < nc; ++j) out[j] += aik * br[j];
  }
}

// Row k of A^T*B.
inline void row_tn(const Mat& a, const Mat& b, std::size_t k, double* out) {
  const std::size_t nc = b.cols();
  for (std::size_t j = 0; j < nc; ++j) out[j] = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double aik = a(i, k);
    if (aik == 0.0) continue;
    const double* br = b.row_ptr(i);
    for (std::size_t j = 0; j < nc; ++j) out[j] += aik * br[j];
  }
}

// Row i of A*B^T.
inline void row_nt(const Mat& a, const Mat& b, std::size_t i, double* out) {
  const double* ar = a.row_ptr(i);
  const std::size_t inner = a.cols();
  for (std::size_t k = 0; k < b.rows(); ++k) {
    const double* br = b.row_ptr(k);
    double acc = 0.0;
    for (std::size_t j = 0; j < inner; ++j) acc += ar[j] * br[j];
    out[k] = acc;
  }
}

template <class RowFn>
void fill_rows(Mat& c, std::size_t work, bool parallel, RowFn fn) {
  const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(c.rows());
  if (parallel && work >= kParallelWork) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) fn(static_cast<std::size_t>(i), c.row_ptr(i));
  } else {
    for (std::ptrdiff_t i = 0; i < rows; ++i) fn(static_cast<std::size_t>(i), c.row_ptr(i));
  }
}

template <class RowFn>
void accumulate_rows(Mat& c, double alpha, std::size_t work, bool parallel, RowFn fn) {
  const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(c.rows());
  const std::size_t nc = c.cols();
  auto body = [&](std::size_t i, std::vector<double>& tmp) {
    fn(i, tmp.data());
    double* cr = c.row_ptr(i);
    for (std::size_t j = 0; j < nc; ++j) cr[j] += alpha * tmp[j];
  };
  if (parallel && work >= kParallelWork) {
#pragma omp parallel
    {
      std::vector<double> tmp(nc);
#pragma omp for schedule(static)
      for (std::ptrdiff_t i = 0; i < rows; ++i) body(static_cast<std::size_t>(i), tmp);
    }
  } else {
    std::vector<double> tmp(nc);
    for (std::ptrdiff_t i = 0; i < rows; ++i) body(static_cast<std::size_t>(i), tmp);
  }
}

Mat do_nn(const Mat& a, const Mat& b, bool par) {
  check_nn(a, b);
  Mat c(a.rows(), b.cols());
  fill_rows(c, a.rows() * a.cols() * b.cols(), par,
            [&](std::size_t i, double* out) { row_nn(a, b, i, out); });
  return c;
}
Mat do_tn(const Mat& a, const Mat& b, bool par) {
  check_tn(a, b);
  Mat c(a.cols(), b.cols());
  fill_rows(c, a.rows() * a.cols() * b.cols(), par,
            [&](std::size_t k, double* out) { row_tn(a, b, k, out); });
  return c;
}
Mat do_nt(const Mat& a, const Mat& b, bool par) {
  check_nt(a, b);
  Mat c(a.rows(), b.rows());
  fill_rows(c, a.rows() * a.cols() * b.rows(), par,
            [&](std::size_t i, double* out) { row_nt(a, b, i, out); });
  return c;
}
void do_add_nn(Mat& c, double alpha, const Mat& a, const Mat& b, bool par) {
  check_nn(a, b);
  check_out(c, a.rows(), b.cols());
  accumulate_rows(c, alpha, a.rows() * a.cols() * b.cols(), par,
                  [&](std::size_t i, double* out) { row_nn(a, b, i, out); });
}
void do_add_tn(Mat& c, double alpha, const Mat& a, const Mat& b, bool par) {
  check_tn(a, b);
  check_out(c, a.cols(), b.cols());
  accumulate_rows(c, alpha, a.rows() * a.cols() * b.cols(), par,
                  [&](std::size_t k, double* out) { row_tn(a, b, k, out); });
}
void do_add_nt(Mat& c, double alpha, const Mat& a, const Mat& b, bool par) {
  check_nt(a, b);
  check_out(c, a.rows(), b.rows());
  accumulate_rows(c, alpha, a.rows() * a.cols() * b.rows(), par,
                  [&](std::size_t i, double* out) { row_nt(a, b, i, out); });
}

}  // namespace

Mat matmul(const Mat& a, const Mat& b) { return do_nn(a, b, true); }
Mat matmul_tn(const Mat& a, const Mat& b) { return do_tn(a, b, true); }
Mat matmul_nt(const Mat& a, const Mat& b) { return do_nt(a, b, true); }
void add_matmul(Mat& c, double alpha, const Mat& a, const Mat& b) { do_add_nn(c, alpha, a, b, true); }
void add_matmul_tn(Mat& c, double alpha, const Mat& a, const Mat& b) { do_add_tn(c, alpha, a, b, true); }
void add_matmul_nt(Mat& c, double alpha, const Mat& a, const Mat& b) { do_add_nt(c, alpha, a, b, true); }

namespace serial {
Mat matmul(const Mat& a, const Mat& b) { return do_nn(a, b, false); }
Mat matmul_tn(const Mat& a, const Mat& b) { return do_tn(a, b, false); }
Mat matmul_nt(const Mat& a, const Mat& b) { return do_nt(a, b, false); }
void add_matmul(Mat& c, double alpha, const Mat& a, const Mat& b) { do_add_nn(c, alpha, a, b, false); }
void add_matmul_tn(Mat& c, double alpha, const Mat& a, const Mat& b) { do_add_tn(c, alpha, a, b, false); }
void add_matmul_nt(Mat& c, double alpha, const Mat& a, const Mat& b) { do_add_nt(c, alpha, a, b, false); }
}  // namespace serial

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace deconet::kernels
