#include "carbon/hash.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include "carbon/errors.hpp"

namespace carbon {
namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

Hash256 Hash256::from_hex(std::string_view hex) {
  if (hex.size() != 64) throw Error(Errc::kParse, "digest must be 64 hex characters");
  Hash256 h;
  for (std::size_t i = 0; i < 32; ++i) {
    const int hi = hex_value(hex[2 * i]);
    const int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw Error(Errc::kParse, "digest must be lowercase hex");
    h.bytes[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return h;
}

std::string Hash256::to_hex() const {
  std::string out(64, '0');
  for (std::size_t i = 0; i < 32; ++i) {
    out[2 * i] = kHexDigits[bytes[i] >> 4];
    out[2 * i + 1] = kHexDigits[bytes[i] & 0x0f];
  }
  return out;
}

bool Hash256::is_zero() const {
  for (auto b : bytes) {
    if (b != 0) return false;
  }
  return true;
}

Hash256 digest(std::string_view payload) {
  Hash256 h;
  unsigned int len = 0;
  if (EVP_Digest(payload.data(), payload.size(), h.bytes.data(), &len, EVP_sha256(), nullptr) != 1 || len != 32) {
    throw Error(Errc::kInvalidArgument, "SHA-256 computation failed");
  }
  return h;
}

Hash256 hmac(std::string_view key, std::string_view message) {
  Hash256 h;
  unsigned int len = 0;
  if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
           reinterpret_cast<const unsigned char*>(message.data()), message.size(), h.bytes.data(),
           &len) == nullptr ||
      len != 32) {
    throw Error(Errc::kInvalidArgument, "HMAC-SHA-256 computation failed");
  }
  return h;
}

}  // namespace carbon
