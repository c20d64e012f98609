#pragma once

#include <filesystem>
#include <string>

namespace ofdmdet {

// Whole-file read; throws std::runtime_error with the path on failure.
std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames over the target, so readers
// never observe a partially written file.  Creates parent directories.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace ofdmdet
