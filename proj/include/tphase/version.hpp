#pragma once

namespace tphase {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace tphase
