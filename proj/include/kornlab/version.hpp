#pragma once

#define KORNLAB_VERSION "0.1.0"

namespace kornlab {

inline constexpr const char* kVersion = KORNLAB_VERSION;

}  // namespace kornlab
