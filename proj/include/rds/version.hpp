#pragma once

namespace rds {

inline constexpr int kApiVersion = 1;
inline constexpr const char* kVersionString = "0.1.0";

}  // namespace rds
