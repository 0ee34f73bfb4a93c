#pragma once

#include <string>
#include <string_view>

namespace meetmate {

/// Throws Error(kIo) when the file cannot be read.
std::string read_text_file(const std::string& path);

/// Writes `<path>.tmp`, flushes it to disk and renames it over `path`, so
/// readers observe either the old or the new content.
void write_file_atomic(const std::string& path, std::string_view data);

}  // namespace meetmate
