#include "crossfire/hash.h"

#include <cstdio>

namespace crossfire {

std::string HashToHex(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf, 16);
}

bool HexToHash(std::string_view text, uint64_t* out) {
  if (text.size() != 16) return false;
  uint64_t h = 0;
  for (const char c : text) {
    uint64_t digit;
    if (c >= '0' && c <= '9') {
      digit = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      digit = c - 'a' + 10;
    } else {
      return false;
    }
    h = (h << 4) | digit;
  }
  *out = h;
  return true;
}

}  // namespace crossfire
