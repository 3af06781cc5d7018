#include "imphedge/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <unistd.h>

namespace imphedge {

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void ensure_directory(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec)
        throw std::runtime_error("cannot create directory " + path + ": " +
                                 ec.message());
}

void atomic_write_file(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    if (target.has_parent_path()) ensure_directory(target.parent_path().string());
    const std::filesystem::path tmp =
        target.parent_path() /
        (target.filename().string() + ".tmp." +
         std::to_string(static_cast<unsigned long>(::getpid())));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
}

void write_csv(const std::string& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::string body;
    body.reserve(rows.size() * 24 * (header.empty() ? 1 : header.size()));
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) body += ',';
        body += header[i];
    }
    body += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) body += ',';
            body += format_full(row[i]);
        }
        body += '\n';
    }
    atomic_write_file(path, body);
}

} // namespace imphedge
