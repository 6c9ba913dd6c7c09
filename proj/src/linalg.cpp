#include "deconet/linalg.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "deconet/io.hpp"
#include "deconet/rng.hpp"

namespace deconet {

namespace {

// y = M^T M v  (tall)  or  y = M M^T v  (wide); v has the smaller dimension.
void gram_apply(const Mat& m, bool tall, const std::vector<double>& v, std::vector<double>& tmp,
                std::vector<double>& y) {
  const std::size_t r = m.rows();
  const std::size_t c = m.cols();
  if (tall) {
    tmp.assign(r, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
      const double* row = m.row_ptr(i);
      double acc = 0.0;
      for (std::size_t j = 0; j < c; ++j) acc += row[j] * v[j];
      tmp[i] = acc;
    }
    y.assign(c, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
      const double* row = m.row_ptr(i);
      const double t = tmp[i];
      for (std::size_t j = 0; j < c; ++j) y[j] += row[j] * t;
    }
  } else {
    tmp.assign(c, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
      const double* row = m.row_ptr(i);
      const double vi = v[i];
      for (std::size_t j = 0; j < c; ++j) tmp[j] += row[j] * vi;
    }
    y.assign(r, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
      const double* row = m.row_ptr(i);
      double acc = 0.0;
      for (std::size_t j = 0; j < c; ++j) acc += row[j] * tmp[j];
      y[i] = acc;
    }
  }
}

void normalize(std::vector<double>& v) {
  const double nv = norm2(v);
  for (double& x : v) x /= nv;
}

inline std::uint64_t bswap64(std::uint64_t x) { return __builtin_bswap64(x); }
inline std::uint32_t bswap32(std::uint32_t x) { return __builtin_bswap32(x); }

template <class T>
void put_le(unsigned char* out, T v) {
  if constexpr (std::endian::native == std::endian::big) {
    if constexpr (sizeof(T) == 8) v = bswap64(v);
    if constexpr (sizeof(T) == 4) v = bswap32(v);
  }
  std::memcpy(out, &v, sizeof(T));
}

template <class T>
T get_le(const unsigned char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    if constexpr (sizeof(T) == 8) v = bswap64(v);
    if constexpr (sizeof(T) == 4) v = bswap32(v);
  }
  return v;
}

constexpr std::size_t kHeader = 4 + 4 + 8 + 8;

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(std::span<const double> v) noexcept { return std::sqrt(dot(v, v)); }

double frobenius_norm(const Mat& m) noexcept { return norm2(m.data()); }

std::vector<double> col_norms(const Mat& m) {
  std::vector<double> sq(m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double* row = m.row_ptr(r);
    for (std::size_t c = 0; c < m.cols(); ++c) sq[c] += row[c] * row[c];
  }
  for (double& v : sq) v = std::sqrt(v);
  return sq;
}

SpectralEstimate spectral_norm(const Mat& m, const SpectralOptions& opts) {
  if (!(opts.tol > 0.0)) throw InvalidArgument("spectral_norm: tol must be positive");
  if (opts.max_iter < 1) throw InvalidArgument("spectral_norm: max_iter must be at least 1");
  if (m.empty()) throw DimensionError("spectral_norm: empty matrix");
  if (frobenius_norm(m) == 0.0) return {0.0, 0, 0.0};

  const bool tall = m.rows() >= m.cols();
  const std::size_t d = tall ? m.cols() : m.rows();
  Rng rng(sub_seed(opts.seed, "power-iteration"));
  std::vector<double> v(d), w, tmp;
  for (double& x : v) x = rng.normal();
  normalize(v);

  SpectralEstimate best{0.0, 0, std::numeric_limits<double>::infinity()};
  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    gram_apply(m, tall, v, tmp, w);
    const double lambda = dot(v, w);
    const double wn = norm2(w);
    if (wn == 0.0 || lambda <= 0.0) {
      // Start vector landed in the null space; draw a fresh one.
      for (double& x : v) x = rng.normal();
      normalize(v);
      continue;
    }
    double rs = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double e = w[i] - lambda * v[i];
      rs += e * e;
    }
    const double residual = std::sqrt(rs) / lambda;
    best = {std::sqrt(lambda), it, residual};
    if (residual <= opts.tol) return best;
    for (std::size_t i = 0; i < d; ++i) v[i] = w[i] / wn;
  }
  throw ConvergenceError("spectral_norm: no convergence after " + std::to_string(opts.max_iter) +
                             " iterations (residual " + std::to_string(best.residual) + ")",
                         best);
}

SpectralEstimate spectral_norm_best(const Mat& m, const SpectralOptions& opts) {
  try {
    return spectral_norm(m, opts);
  } catch (const ConvergenceError& e) {
    return e.best;
  }
}

Mat gaussian_measurement(std::size_t m, std::size_t n, std::uint64_t seed) {
  if (m < 1 || m >= n) {
    throw DimensionError("gaussian_measurement needs 1 <= m < n, got m=" + std::to_string(m) +
                         " n=" + std::to_string(n));
  }
  Rng rng(seed);
  Mat a(m, n);
  const double s = 1.0 / std::sqrt(static_cast<double>(m));
  for (double& x : a.data()) x = rng.normal() * s;
  return a;
}

Mat project_spectral_ball(const Mat& w, double cap, const SpectralOptions& opts) {
  if (!(cap > 0.0)) throw InvalidArgument("project_spectral_ball: cap must be positive");
  const SpectralEstimate est = spectral_norm(w, opts);
  if (est.value <= cap * (1.0 + opts.tol)) return w;
  Mat out = w;
  out *= cap / est.value;
  return out;
}

std::vector<unsigned char> encode_dmat(const Mat& m) {
  if (m.empty()) throw DimensionError("encode_dmat: empty matrix");
  std::vector<unsigned char> out(kHeader + m.size() * 8);
  unsigned char* p = out.data();
  std::memcpy(p, "DMAT", 4);
  put_le<std::uint32_t>(p + 4, 1);
  put_le<std::uint64_t>(p + 8, m.rows());
  put_le<std::uint64_t>(p + 16, m.cols());
  p += kHeader;
  for (double v : m.data()) {
    put_le<std::uint64_t>(p, std::bit_cast<std::uint64_t>(v));
    p += 8;
  }
  return out;
}

Mat decode_dmat(std::span<const unsigned char> bytes) {
  if (bytes.size() < kHeader) throw FormatError("DMAT: truncated header");
  if (std::memcmp(bytes.data(), "DMAT", 4) != 0) throw FormatError("DMAT: bad magic");
  const auto version = get_le<std::uint32_t>(bytes.data() + 4);
  if (version != 1) throw FormatError("DMAT: unsupported version " + std::to_string(version));
  const auto rows = get_le<std::uint64_t>(bytes.data() + 8);
  const auto cols = get_le<std::uint64_t>(bytes.data() + 16);
  if (rows == 0 || cols == 0) throw FormatError("DMAT: zero dimension");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / 8;
  if (rows > limit / cols) throw FormatError("DMAT: dimension overflow");
  const std::uint64_t count = rows * cols;
  const std::uint64_t payload = bytes.size() - kHeader;
  if (payload < count * 8) {
    throw FormatError("DMAT: truncated payload, header says " + std::to_string(count) +
                      " values, found " + std::to_string(payload / 8));
  }
  if (payload != count * 8) throw FormatError("DMAT: trailing bytes after payload");
  std::vector<double> data(count);
  const unsigned char* p = bytes.data() + kHeader;
  for (std::uint64_t i = 0; i < count; ++i)
    data[i] = std::bit_cast<double>(get_le<std::uint64_t>(p + 8 * i));
  return Mat(rows, cols, std::move(data));
}

void write_dmat(const std::filesystem::path& path, const Mat& m) {
  atomic_write(path, encode_dmat(m));
}

Mat read_dmat(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  try {
    return decode_dmat(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace deconet
