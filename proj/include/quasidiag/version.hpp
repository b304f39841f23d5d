#pragma once

namespace quasidiag {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace quasidiag
