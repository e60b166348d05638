#pragma once

namespace flexifuzz {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace flexifuzz
