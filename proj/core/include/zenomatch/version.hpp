#pragma once

namespace zenomatch {

inline constexpr const char* version = "1.0.0";

}  // namespace zenomatch
