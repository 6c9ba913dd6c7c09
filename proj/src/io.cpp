#include "deconet/io.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <system_error>

#include "deconet/error.hpp"

#include <unistd.h>

namespace deconet {

namespace fs = std::filesystem;

void atomic_write(const fs::path& path, std::span<const unsigned char> bytes) {
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

void atomic_write(const fs::path& path, std::string_view text) {
  atomic_write(path, std::span<const unsigned char>(
                         reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

std::vector<unsigned char> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {});
}

std::string read_text(const fs::path& path) {
  auto b = read_bytes(path);
  return std::string(b.begin(), b.end());
}

std::uint64_t fnv1a(std::span<const unsigned char> bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a(std::string_view text) noexcept {
  return fnv1a(std::span<const unsigned char>(reinterpret_cast<const unsigned char*>(text.data()),
                                              text.size()));
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace deconet
