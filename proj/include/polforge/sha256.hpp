#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace polforge {

using Digest = std::array<std::uint8_t, 32>;

/// One-shot SHA-256.
Digest sha256(std::span<const std::uint8_t> data);

/// Streaming SHA-256 (used by the record chain).
class Sha256 {
 public:
  Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;
  ~Sha256();

  void update(std::span<const std::uint8_t> data);
  Digest finish();

 private:
  void* ctx_;
};

std::string to_hex(const Digest& d);
Digest digest_from_hex(const std::string& hex);

}  // namespace polforge
