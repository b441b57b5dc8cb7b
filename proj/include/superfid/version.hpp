#pragma once

namespace superfid {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace superfid
