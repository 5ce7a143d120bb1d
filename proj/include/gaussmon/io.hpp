#pragma once

#include <string>

namespace gaussmon {

/// Locale-independent decimal form with 17 significant digits (lossless for
/// doubles). All CSV output goes through this.
std::string format_double(double v);

/// Writes `text` to `path` as-is (binary mode, so line endings stay LF).
void write_text_file(const std::string& path, const std::string& text);

std::string read_text_file(const std::string& path);

}  // namespace gaussmon
