#pragma once

#include <string>

namespace mvplc {

// Reads a whole file; throws std::runtime_error on I/O failure.
std::string read_text_file(const std::string& path);

// Writes via a sibling temporary file and rename, so readers never observe a
// partially written file. Throws std::runtime_error on I/O failure.
void write_text_file_atomic(const std::string& path, const std::string& content);

}  // namespace mvplc
