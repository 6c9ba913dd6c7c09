#pragma once

#include "deconet/matrix.hpp"

// Matrix products used by the solver and the network.
//
// The functions in `kernels` split output rows across OpenMP threads; the
// ones in `kernels::serial` run the same per-element loops on one thread.
// Every output entry is accumulated in the same order in both, so results
// are bitwise identical.

namespace deconet::kernels {

/// C = A * B
Mat matmul(const Mat& a, const Mat& b);
/// C = A^T * B
Mat matmul_tn(const Mat& a, const Mat& b);
/// C = A * B^T
Mat matmul_nt(const Mat& a, const Mat& b);
/// C += alpha * A * B
void add_matmul(Mat& c, double alpha, const Mat& a, const Mat& b);
/// C += alpha * A^T * B
void add_matmul_tn(Mat& c, double alpha, const Mat& a, const Mat& b);
/// C += alpha * A * B^T
void add_matmul_nt(Mat& c, double alpha, const Mat& a, const Mat& b);

namespace serial {
Mat matmul(const Mat& a, const Mat& b);
Mat matmul_tn(const Mat& a, const Mat& b);
Mat matmul_nt(const Mat& a, const Mat& b);
void add_matmul(Mat& c, double alpha, const Mat& a, const Mat& b);
void add_matmul_tn(Mat& c, double alpha, const Mat& a, const Mat& b);
void add_matmul_nt(Mat& c, double alpha, const Mat& a, const Mat& b);
}  // namespace serial

/// Number of threads the parallel kernels will use.
int thread_count();

}  // namespace deconet::kernels
