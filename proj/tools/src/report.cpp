#include "report.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "flexifuzz/errors.hpp"
#include "flexifuzz/version.hpp"

namespace flexifuzz::cli {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open file for digest: " + path);

  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in.good()) {
    in.read(buf, sizeof(buf));
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);

  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string csv_meta_block(std::uint64_t seed,
                           const std::vector<InputDigest>& inputs) {
  std::ostringstream out;
  out << "# tool: flexifuzz " << kVersion << "\n";
  out << "# seed: " << seed << "\n";
  for (const InputDigest& d : inputs)
    out << "# input: " << d.path << " sha256:" << d.sha256 << "\n";
  return out.str();
}

std::string metric_cell(const std::optional<double>& value) {
  return value ? format_double(*value) : std::string{};
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write output file: " + path);
  out << content;
}

}  // namespace flexifuzz::cli
