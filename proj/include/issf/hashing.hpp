#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace issf {

// Hex-encoded SHA-256 of the given bytes.
std::string sha256_hex(std::string_view bytes);

// FNV-1a, 64-bit. Used for posture digests and table keys, not security.
class Fnv64 {
 public:
  void update(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001b3ULL;
    }
  }

  void update_u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      state_ ^= static_cast<unsigned char>(v >> (i * 8));
      state_ *= 0x100000001b3ULL;
    }
  }

  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::uint64_t fnv1a64(const void* data, std::size_t n) {
  Fnv64 h;
  h.update(data, n);
  return h.digest();
}

inline std::uint64_t fnv1a64(std::string_view s) { return fnv1a64(s.data(), s.size()); }

}  // namespace issf
