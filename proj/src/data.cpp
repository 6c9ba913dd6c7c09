#include "deconet/data.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "deconet/error.hpp"
#include "deconet/io.hpp"
#include "deconet/kernels.hpp"
#include "deconet/linalg.hpp"

namespace deconet {

namespace {

std::uint32_t be32(const unsigned char* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) |
         std::uint32_t{p[3]};
}

// Validates the header and returns the dimension list.
std::vector<std::uint32_t> idx_header(std::span<const unsigned char> b, std::uint32_t magic) {
  if (b.size() < 4) throw FormatError("IDX: truncated header");
  const std::uint32_t got = be32(b.data());
  if (got != magic) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "IDX: magic 0x%08x, expected 0x%08x", got, magic);
    throw FormatError(buf);
  }
  const std::size_t ndim = magic & 0xff;
  if (b.size() < 4 + 4 * ndim) throw FormatError("IDX: truncated header");
  std::vector<std::uint32_t> dims(ndim);
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < ndim; ++i) {
    dims[i] = be32(b.data() + 4 + 4 * i);
    if (dims[i] == 0) throw FormatError("IDX: zero dimension");
    if (dims[i] > (std::uint64_t{1} << 40) / total) throw FormatError("IDX: dimension overflow");
    total *= dims[i];
  }
  if (b.size() - (4 + 4 * ndim) < total) throw FormatError("IDX: truncated payload");
  return dims;
}

}  // namespace

Mat gen_synthetic(std::size_t n, std::size_t s, std::uint64_t seed) {
  Rng rng(seed);
  Mat X(n, s);
  for (double& v : X.data()) v = rng.normal();
  return X;
}

Measurement measure(const Mat& X, const Mat& A, double noise_std, std::uint64_t seed) {
  if (A.cols() != X.rows()) throw DimensionError("measure: A columns must equal signal length");
  if (noise_std < 0.0) throw InvalidArgument("noise_std must be nonnegative");
  Measurement out;
  out.Y = kernels::matmul(A, X);
  if (noise_std > 0.0) {
    Rng rng(seed);
    for (double& v : out.Y.data()) v += noise_std * rng.normal();
  }
  Mat R = out.Y - kernels::matmul(A, X);
  out.per_sample = col_norms(R);
  out.eps = std::accumulate(out.per_sample.begin(), out.per_sample.end(), 0.0) /
            static_cast<double>(out.per_sample.size());
  return out;
}

Mat decode_idx_images(std::span<const unsigned char> bytes, bool downsample) {
  const auto dims = idx_header(bytes, 0x00000803);
  const std::size_t count = dims[0];
  const std::size_t rows = dims[1];
  const std::size_t cols = dims[2];
  const unsigned char* px = bytes.data() + 16;
  if (downsample && (rows % 2 || cols % 2)) {
    throw DimensionError("IDX: 2x2 downsampling needs even image sides");
  }
  const std::size_t orows = downsample ? rows / 2 : rows;
  const std::size_t ocols = downsample ? cols / 2 : cols;
  Mat out(orows * ocols, count);
  for (std::size_t img = 0; img < count; ++img) {
    const unsigned char* p = px + img * rows * cols;
    for (std::size_t r = 0; r < orows; ++r) {
      for (std::size_t c = 0; c < ocols; ++c) {
        double v = 0.0;
        if (downsample) {
          v = (p[(2 * r) * cols + 2 * c] + p[(2 * r) * cols + 2 * c + 1] +
               p[(2 * r + 1) * cols + 2 * c] + p[(2 * r + 1) * cols + 2 * c + 1]) /
              (4.0 * 255.0);
        } else {
          v = p[r * cols + c] / 255.0;
        }
        out(r * ocols + c, img) = v;
      }
    }
  }
  return out;
}

Mat load_idx_images(const std::filesystem::path& path, bool downsample) {
  try {
    return decode_idx_images(read_bytes(path), downsample);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> decode_idx_labels(std::span<const unsigned char> bytes) {
  const auto dims = idx_header(bytes, 0x00000801);
  const unsigned char* p = bytes.data() + 8;
  return std::vector<std::uint8_t>(p, p + dims[0]);
}

std::vector<std::uint8_t> load_idx_labels(const std::filesystem::path& path) {
  try {
    return decode_idx_labels(read_bytes(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<std::vector<std::size_t>> make_batches(std::size_t count, std::size_t batch, Rng& rng) {
  if (count == 0) throw InvalidArgument("cannot batch an empty split");
  if (batch < 1) throw InvalidArgument("batch size must be at least 1");
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < count; i += batch) {
    const std::size_t end = std::min(count, i + batch);
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                     order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

namespace {
std::size_t train_count(std::size_t s, double train_frac) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) throw InvalidArgument("train_frac must lie in (0, 1)");
  const auto k = static_cast<std::size_t>(std::floor(train_frac * static_cast<double>(s)));
  if (k == 0 || k == s) throw InvalidArgument("split leaves an empty train or test set");
  return k;
}
}  // namespace

BatchPlan split_and_batch(std::size_t s, double train_frac, std::size_t batch, std::uint64_t seed) {
  const std::size_t k = train_count(s, train_frac);
  BatchPlan plan;
  plan.train.resize(k);
  std::iota(plan.train.begin(), plan.train.end(), std::size_t{0});
  plan.test.resize(s - k);
  std::iota(plan.test.begin(), plan.test.end(), k);
  Rng rng(seed);
  plan.batches = make_batches(k, batch, rng);
  return plan;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, double train_frac) {
  const std::size_t s = ds.count();
  const std::size_t k = train_count(s, train_frac);
  Dataset tr = ds;
  Dataset te = ds;
  tr.X = ds.X.col_block(0, k);
  tr.Y = ds.Y.col_block(0, k);
  te.X = ds.X.col_block(k, s - k);
  te.Y = ds.Y.col_block(k, s - k);
  if (!ds.eps_per_sample.empty()) {
    tr.eps_per_sample.assign(ds.eps_per_sample.begin(), ds.eps_per_sample.begin() + k);
    te.eps_per_sample.assign(ds.eps_per_sample.begin() + k, ds.eps_per_sample.end());
  }
  return {std::move(tr), std::move(te)};
}

std::pair<double, double> estimate_bounds_constants(const Mat& X, const Mat& Y) {
  if (X.empty() || Y.empty()) throw InvalidArgument("estimate_bounds_constants: empty dataset");
  double b_in = 0.0;
  double b_out = 0.0;
  for (double v : col_norms(Y)) b_in = std::max(b_in, v);
  for (double v : col_norms(X)) b_out = std::max(b_out, v);
  return {b_in, b_out};
}

void save_dataset(const std::filesystem::path& dir, const Dataset& ds) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_dmat(dir / "X.dmat", ds.X);
  write_dmat(dir / "Y.dmat", ds.Y);
  nlohmann::json j;
  j["eps"] = ds.eps;
  j["noise_std"] = ds.noise_std;
  j["seed"] = ds.seed;
  j["A_path"] = ds.A_path;
  j["B_in"] = ds.B_in;
  j["B_out"] = ds.B_out;
  j["n"] = ds.X.rows();
  j["m"] = ds.Y.rows();
  j["s"] = ds.X.cols();
  j["eps_per_sample"] = ds.eps_per_sample;
  if (!ds.config_hash.empty()) j["config_hash"] = ds.config_hash;
  atomic_write(dir / "meta.json", j.dump(2) + "\n");
}

Dataset load_dataset(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("dataset directory not found: " + dir.string());
  Dataset ds;
  ds.X = read_dmat(dir / "X.dmat");
  ds.Y = read_dmat(dir / "Y.dmat");
  try {
    const auto j = nlohmann::json::parse(read_text(dir / "meta.json"));
    ds.eps = j.at("eps").get<double>();
    ds.noise_std = j.at("noise_std").get<double>();
    ds.seed = j.at("seed").get<std::uint64_t>();
    ds.A_path = j.value("A_path", std::string());
    ds.B_in = j.at("B_in").get<double>();
    ds.B_out = j.at("B_out").get<double>();
    ds.eps_per_sample = j.value("eps_per_sample", std::vector<double>{});
    ds.config_hash = j.value("config_hash", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError((dir / "meta.json").string() + ": " + e.what());
  }
  if (ds.X.cols() != ds.Y.cols()) throw FormatError("dataset X and Y sample counts differ");
  return ds;
}

}  // namespace deconet
