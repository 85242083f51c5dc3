#ifndef MEGALIGN_PROVENANCE_HPP
#define MEGALIGN_PROVENANCE_HPP

// Provenance records: SHA-256 of the canonical config and of every input file. No timestamps,
// host names or thread counts, so equal configs give byte-identical records.

#include "megalign/config.hpp"

#include <openssl/evp.h>

namespace megalign {

inline constexpr int kFormatVersion = 1;

inline std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static const char *hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

inline std::string read_bytes(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in)
    throw DataError("cannot read " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Hash of a file, or of a directory's regular files (sorted relative names and contents).
inline std::string hash_input(const fs::path &p) {
  if (fs::is_directory(p)) {
    std::vector<fs::path> files;
    for (const auto &e : fs::recursive_directory_iterator(p))
      if (e.is_regular_file())
        files.push_back(fs::relative(e.path(), p));
    std::sort(files.begin(), files.end());
    std::string acc;
    for (const auto &f : files)
      acc += f.generic_string() + '\0' + sha256_hex(read_bytes(p / f)) + '\n';
    return sha256_hex(acc);
  }
  return sha256_hex(read_bytes(p));
}

inline std::string config_hash(const RunConfig &c) { return sha256_hex(canonical_config(c)); }

class Provenance {
public:
  Provenance() = default;
  Provenance(const RunConfig &c, std::string command) : command_(std::move(command)), hash_(megalign::config_hash(c)) {}

  /// Records an input under its config field name.
  Provenance &input(const std::string &field, const fs::path &p) {
    inputs_[field] = hash_input(p);
    return *this;
  }
  Provenance &seed(const std::string &name, std::uint64_t v) {
    seeds_[name] = v;
    return *this;
  }

  const std::string &config_hash() const { return hash_; }

  json to_json() const {
    return {{"format_version", kFormatVersion},
            {"command", command_},
            {"config_hash", hash_},
            {"seeds", seeds_},
            {"inputs", inputs_}};
  }

  /// Comment line for text artifacts (CSV, SVG).
  std::string stamp(const std::string &comment_open = "# ", const std::string &comment_close = "") const {
    return comment_open + "megalign format " + std::to_string(kFormatVersion) + " config_hash " + hash_ +
           comment_close + "\n";
  }

private:
  std::string command_;
  std::string hash_;
  std::map<std::string, std::uint64_t> seeds_;
  std::map<std::string, std::string> inputs_;
};

} // namespace megalign

#endif // MEGALIGN_PROVENANCE_HPP
