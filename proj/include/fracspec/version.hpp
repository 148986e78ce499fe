#pragma once

namespace fracspec {
inline constexpr const char* version = "0.1.0";
// Bumped whenever a CSV header changes.
inline constexpr int csv_schema = 1;
}  // namespace fracspec
