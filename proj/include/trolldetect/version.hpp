#pragma once

namespace trolldetect {

inline constexpr const char* kToolVersion = "trolldetect 1.0.0";

}  // namespace trolldetect
