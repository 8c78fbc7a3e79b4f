#pragma once

namespace qkdrt {
inline constexpr const char* version_string = "0.1.0";
}
