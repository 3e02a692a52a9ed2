// Copyright 2026 The evcharge Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVCHARGE_CORE_DIGEST_HPP_
#define EVCHARGE_CORE_DIGEST_HPP_

#include <cstddef>
#include <string>
#include <string_view>

namespace evcharge {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::string& path);

// Accumulates typed values into a byte string for hashing.
class DigestBuilder {
 public:
  DigestBuilder& add(double v);
  DigestBuilder& add(long long v);
  DigestBuilder& add(std::string_view s);
  std::string hex() const { return sha256_hex(bytes_); }

 private:
  std::string bytes_;
};

}  // namespace evcharge

#endif  // EVCHARGE_CORE_DIGEST_HPP_
