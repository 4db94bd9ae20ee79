#include "regrid/atomic_file.hpp"

#include "regrid/error.hpp"

#include <fstream>

#include <fmt/format.h>

namespace regrid {

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::Internal, fmt::format("cannot open {} for writing", tmp.string()));
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw Error(ErrorKind::Internal, fmt::format("write to {} failed", tmp.string()));
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error(ErrorKind::Internal, fmt::format("rename {} -> {}: {}", tmp.string(), path.string(), ec.message()));
    }
}

} // namespace regrid
