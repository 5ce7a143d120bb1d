#include "gaussmon/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "gaussmon/errors.hpp"

namespace gaussmon {

std::string format_double(double v) {
  char buf[40];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw InvalidArgumentError("cannot open for writing: " + path);
  }
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!os) {
    throw NumericalError("short write: " + path);
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw InvalidArgumentError("cannot open for reading: " + path);
  }
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace gaussmon
