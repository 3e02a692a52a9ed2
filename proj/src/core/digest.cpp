// Copyright 2026 The evcharge Authors
// SPDX-License-Identifier: Apache-2.0

#include "digest.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace evcharge {

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int k = 0; k < len; ++k) {
    out.push_back(kHex[md[k] >> 4]);
    out.push_back(kHex[md[k] & 0xf]);
  }
  return out;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file for hashing: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return sha256_hex(buffer.str());
}

DigestBuilder& DigestBuilder::add(double v) {
  char raw[sizeof v];
  std::memcpy(raw, &v, sizeof v);
  bytes_.append(raw, sizeof v);
  return *this;
}

DigestBuilder& DigestBuilder::add(long long v) {
  char raw[sizeof v];
  std::memcpy(raw, &v, sizeof v);
  bytes_.append(raw, sizeof v);
  return *this;
}

DigestBuilder& DigestBuilder::add(std::string_view s) {
  add(static_cast<long long>(s.size()));
  bytes_.append(s);
  return *this;
}

}  // namespace evcharge
