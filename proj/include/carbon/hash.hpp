#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace carbon {

// SHA-256 digest value.
struct Hash256 {
  std::array<std::uint8_t, 32> bytes{};

  static Hash256 zero() { return {}; }
  // Accepts exactly 64 lowercase hex characters; throws Error(kParse) otherwise.
  static Hash256 from_hex(std::string_view hex);

  std::string to_hex() const;
  bool is_zero() const;

  auto operator<=>(const Hash256&) const = default;
};

// SHA-256 (FIPS 180-4) via OpenSSL.
Hash256 digest(std::string_view payload);

// HMAC-SHA-256, used for emulated endorsement tags.
Hash256 hmac(std::string_view key, std::string_view message);

}  // namespace carbon
