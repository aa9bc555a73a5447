#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace trustrec {

/// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

/// FNV-1a 64-bit of the file bytes, as 16 lowercase hex digits.
std::string file_checksum(const std::filesystem::path& path);

/// Fixed 4-decimal rendering; exact binary ties round half to even.
std::string format_fixed4(double v);

}  // namespace trustrec
