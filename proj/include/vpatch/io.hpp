#pragma once

#include <string>

namespace vpatch {

inline constexpr int kSchemaVersion = 1;

// 17 significant digits, shortest round-trip safe form
std::string fmt_num(double v);

} // namespace vpatch
