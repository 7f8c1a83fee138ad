#include "shapsrc/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace shapsrc {

std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string hash_file_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open file for hashing: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string bytes = buf.str();
    return hash_hex(fnv1a64(bytes.data(), bytes.size()));
}

std::string format_double(double v) {
    char buf[64];
    // Shortest representation that round-trips exactly.
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write file: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InvalidInput("failed writing file: " + path);
}

void ensure_dir(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw InvalidInput("cannot create directory " + path + ": " + ec.message());
}

std::string values_csv(const std::vector<std::string>& targets,
                       const std::vector<std::string>& sources,
                       const std::vector<std::vector<double>>& values) {
    std::string out = "target,source,value\n";
    for (std::size_t t = 0; t < targets.size(); ++t)
        for (std::size_t j = 0; j < sources.size(); ++j) {
            out += targets[t];
            out += ',';
            out += sources[j];
            out += ',';
            out += format_double(values[t][j]);
            out += '\n';
        }
    return out;
}

std::string trace_csv(const std::vector<std::string>& targets,
                      const std::vector<std::string>& sources,
                      const std::vector<std::vector<std::vector<double>>>& trace) {
    std::string out = "epoch,target,source,value\n";
    for (std::size_t e = 0; e < trace.size(); ++e)
        for (std::size_t t = 0; t < targets.size(); ++t)
            for (std::size_t j = 0; j < sources.size(); ++j) {
                out += std::to_string(e + 1);
                out += ',';
                out += targets[t];
                out += ',';
                out += sources[j];
                out += ',';
                out += format_double(trace[e][t][j]);
                out += '\n';
            }
    return out;
}

}  // namespace shapsrc
