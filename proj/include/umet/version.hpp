#pragma once

namespace umet {

inline constexpr const char* version = "0.1.0";

}  // namespace umet
