#ifndef CROSSFIRE_HASH_H_
#define CROSSFIRE_HASH_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace crossfire {

inline constexpr uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr uint64_t kFnvPrime = 0x100000001b3ULL;

// 64-bit FNV-1a. `seed` allows chaining over several buffers.
constexpr uint64_t Fnv1a64(std::string_view bytes,
                           uint64_t seed = kFnvOffsetBasis) {
  uint64_t h = seed;
  for (const char c : bytes) {
    h ^= static_cast<uint8_t>(c);
    h *= kFnvPrime;
  }
  return h;
}

// Lower-case, zero-padded 16-digit hex.
std::string HashToHex(uint64_t h);
// Inverse of HashToHex; returns false on anything but exactly 16 hex digits.
bool HexToHash(std::string_view text, uint64_t* out);

}  // namespace crossfire

#endif  // CROSSFIRE_HASH_H_
