#include "curvegas/io.hpp"

#include "curvegas/errors.hpp"

#include <cstdio>
#include <fstream>
#include <system_error>

namespace curvegas::io {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c) out += ',';
        out += header[c];
    }
    out += '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size()) {
            throw ConfigError("csv row width " + std::to_string(row.size()) +
                        " does not match header width " +
                        std::to_string(header.size()));
        }
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_double(row[c]);
        }
        out += '\n';
    }
    return out;
}

void atomic_write_text(const std::filesystem::path& path, std::string_view text) {
    namespace fs = std::filesystem;
    const fs::path dir = path.parent_path();
    std::error_code ec;
    if (!dir.empty()) {
        fs::create_directories(dir, ec);
        if (ec) {
            throw Error("cannot create directory " + dir.string() + ": " +
                        ec.message());
        }
    }
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot open " + tmp.string() + " for writing");
        f.write(text.data(), static_cast<std::streamsize>(text.size()));
        f.flush();
        if (!f) throw Error("short write to " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        throw Error("cannot rename " + tmp.string() + " to " + path.string() +
                    ": " + ec.message());
    }
}

void atomic_write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    atomic_write_text(path, j.dump(2) + "\n");
}

} // namespace curvegas::io
