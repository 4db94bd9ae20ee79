#pragma once

#include <filesystem>
#include <string_view>

namespace regrid {

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

} // namespace regrid
