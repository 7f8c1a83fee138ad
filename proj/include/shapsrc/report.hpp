#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shapsrc/types.hpp"

namespace shapsrc {

// FNV-1a over raw bytes; hex form is embedded in run reports so reruns are
// checkable against their inputs.
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::string hash_hex(std::uint64_t h);
std::string hash_file_hex(const std::string& path);

// Shortest-exact decimal form of a double ("%.17g" trimmed), so reports are
// byte-stable and parse back to the same bits.
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);
void ensure_dir(const std::string& path);

// Long-format values CSV: header target,source,value.
std::string values_csv(const std::vector<std::string>& targets,
                       const std::vector<std::string>& sources,
                       const std::vector<std::vector<double>>& values);

// Long-format per-epoch trace CSV: header epoch,target,source,value.
std::string trace_csv(const std::vector<std::string>& targets,
                      const std::vector<std::string>& sources,
                      const std::vector<std::vector<std::vector<double>>>& trace);

}  // namespace shapsrc
