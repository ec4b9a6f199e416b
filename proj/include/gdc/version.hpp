#pragma once

namespace gdc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gdc
