#pragma once

namespace terracini {
inline constexpr const char* kVersion = "0.1.0";
}
