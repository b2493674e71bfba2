#include "roadfuse/manifest.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "roadfuse/errors.hpp"
#include "roadfuse/ingest.hpp"

#ifndef ROADFUSE_VERSION
#define ROADFUSE_VERSION "0.0.0"
#endif

namespace roadfuse {

namespace {

std::vector<std::string> split_tabs(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find('\t', start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

}  // namespace

std::string_view version() noexcept { return ROADFUSE_VERSION; }

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::string out;
  char hex[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(hex, sizeof hex, "%02x", digest[i]);
    out += hex;
  }
  return out;
}

std::string file_digest(const std::filesystem::path& path) { return sha256_hex(read_text_file(path)); }

std::string RunManifest::to_text() const {
  std::string out;
  out += "command = " + command + "\n";
  out += "tool_version = " + tool_version + "\n";
  out += "seed = " + std::to_string(seed) + "\n";
  for (const auto& [k, v] : parameters) out += "param." + k + " = " + v + "\n";
  for (const auto& [k, v] : inputs) out += "input." + k + " = " + v + "\n";
  for (const auto& [k, v] : outputs) out += "output." + k + " = " + v + "\n";
  out += "argv = ";
  for (std::size_t i = 0; i < argv.size(); ++i) out += (i ? "\t" : "") + argv[i];
  out += "\n";
  return out;
}

RunManifest RunManifest::parse(std::string_view text) {
  RunManifest m;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) throw ParseError("expected key = value", "line " + std::to_string(line_no));
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 3);
    if (key == "command") m.command = value;
    else if (key == "tool_version") m.tool_version = value;
    else if (key == "seed") m.seed = std::stoull(value);
    else if (key.starts_with("param.")) m.parameters.emplace_back(key.substr(6), value);
    else if (key.starts_with("input.")) m.inputs.emplace_back(key.substr(6), value);
    else if (key.starts_with("output.")) m.outputs.emplace_back(key.substr(7), value);
    else if (key == "argv") m.argv = value.empty() ? std::vector<std::string>{} : split_tabs(value);
    else throw ParseError("unknown key '" + key + "'", "line " + std::to_string(line_no));
  }
  if (m.command.empty()) throw ParseError("manifest has no command");
  return m;
}

}  // namespace roadfuse
