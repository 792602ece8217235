#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cutoff {

// shortest decimal that round-trips the exact double
std::string format_full(double v);

// comma separators, header row, LF endings
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

uint64_t fnv1a64(const std::string& s);

// JSON run manifest; `outputs` lists files produced alongside it
std::string make_manifest(const std::string& command, const std::string& config_json,
                          uint64_t seed, const std::vector<std::string>& outputs);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace cutoff
