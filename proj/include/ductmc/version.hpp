#pragma once

namespace ductmc {

inline constexpr const char* kVersion = "0.1.0";

}
