#pragma once

namespace driqa {
inline constexpr const char* kVersion = "0.1.0";
}
