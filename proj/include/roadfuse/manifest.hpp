#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace roadfuse {

std::string_view version() noexcept;

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string file_digest(const std::filesystem::path& path);

/// Everything needed to replay one command. Serialized as `key = value`
/// lines in a fixed order; `argv` entries are tab-separated.
struct RunManifest {
  std::string command;
  std::string tool_version;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<std::pair<std::string, std::string>> inputs;  ///< path -> sha256
  std::vector<std::pair<std::string, std::string>> outputs;  ///< file name -> sha256
  std::vector<std::string> argv;

  std::string to_text() const;
  static RunManifest parse(std::string_view text);  ///< throws ParseError
};

}  // namespace roadfuse
