#include "neardup/sha256.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace neardup {

Sha256 sha256(std::string_view data) {
  Sha256 out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(),
                 nullptr) != 1 ||
      len != out.size()) {
    throw std::runtime_error("sha256: digest computation failed");
  }
  return out;
}

std::string to_hex(const Sha256& digest) {
  static const char* hexdig = "0123456789abcdef";
  std::string s;
  s.reserve(64);
  for (uint8_t b : digest) {
    s.push_back(hexdig[b >> 4]);
    s.push_back(hexdig[b & 0x0f]);
  }
  return s;
}

}  // namespace neardup
