#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace deconet {

/// Dense row-major matrix of doubles.
///
/// A default-constructed Mat is empty (0x0) and only serves as a placeholder;
/// every sized constructor requires rows >= 1 and cols >= 1.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0);
  Mat(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Mat identity(std::size_t n);
  static Mat diagonal(std::span<const double> d);
  static Mat from_rows(std::initializer_list<std::initializer_list<double>> rows);
  /// Column vector from values.
  static Mat column(std::span<const double> v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  double* row_ptr(std::size_t r) noexcept { return data_.data() + r * cols_; }
  const double* row_ptr(std::size_t r) const noexcept { return data_.data() + r * cols_; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  std::vector<double> col(std::size_t c) const;
  void set_col(std::size_t c, std::span<const double> v);
  Mat transpose() const;
  /// Columns [first, first+count).
  Mat col_block(std::size_t first, std::size_t count) const;
  /// Columns picked by index, in the given order.
  Mat gather_cols(std::span<const std::size_t> idx) const;

  Mat& operator+=(const Mat& o);
  Mat& operator-=(const Mat& o);
  Mat& operator*=(double s);

  bool same_shape(const Mat& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }
  friend bool operator==(const Mat& a, const Mat& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator*(double s, Mat a);

/// Throws DimensionError with `what` unless a and b have equal shape.
void require_same_shape(const Mat& a, const Mat& b, const char* what);

/// True when every entry is finite.
bool all_finite(const Mat& m) noexcept;

/// Vertical stack [a; b].
Mat vstack(const Mat& a, const Mat& b);

}  // namespace deconet
