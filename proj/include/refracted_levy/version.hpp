#pragma once

#ifndef REFRACTED_LEVY_VERSION
#define REFRACTED_LEVY_VERSION "0.1.0"
#endif

namespace refracted_levy {

inline constexpr const char* kVersion = REFRACTED_LEVY_VERSION;

}  // namespace refracted_levy
