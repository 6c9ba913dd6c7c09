#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace deconet {

/// Write `bytes` to a sibling temp file, then rename it over `path`.
void atomic_write(const std::filesystem::path& path, std::span<const unsigned char> bytes);
void atomic_write(const std::filesystem::path& path, std::string_view text);

std::vector<unsigned char> read_bytes(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::span<const unsigned char> bytes) noexcept;
std::uint64_t fnv1a(std::string_view text) noexcept;
std::string hex64(std::uint64_t v);

/// printf-style "%.17g", the round-trip format used for every CSV number.
std::string fmt_real(double v);

}  // namespace deconet
