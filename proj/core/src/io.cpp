#include "cutoff/io.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <sstream>

#include "cutoff/errors.hpp"
#include "json.hpp"

namespace cutoff {

std::string format_full(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_full(row[i]);
    }
    out << '\n';
  }
}

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string make_manifest(const std::string& command, const std::string& config_json,
                          uint64_t seed, const std::vector<std::string>& outputs) {
  nlohmann::json j;
  j["command"] = command;
  j["config"] = nlohmann::json::parse(config_json);
  std::ostringstream digest;
  digest << std::hex << fnv1a64(config_json);
  j["config_digest"] = digest.str();
  j["library_version"] = "0.1.0";
  j["seed"] = seed;
  j["timestamp_unix"] =
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count();
  j["outputs"] = outputs;
  return j.dump(2);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace cutoff
