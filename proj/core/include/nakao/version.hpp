#pragma once

namespace nakao {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nakao
