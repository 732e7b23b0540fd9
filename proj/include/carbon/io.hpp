#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace carbon {

// Writes through a sibling temp file and renames it into place, so readers
// never observe a partial file. Throws Error(kIoFailure) naming the path.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Throws Error(kIoFailure) naming the path.
std::string read_file(const std::filesystem::path& path);

}  // namespace carbon
