#pragma once

#include <string>
#include <string_view>

namespace styloc {

// SHA-256 hex digest of the given bytes. Used as the content id of code
// samples: identical code bytes always map to the same id.
std::string sha256_hex(std::string_view bytes);

}  // namespace styloc
