#pragma once

namespace rtcycle {

inline constexpr const char* kVersion = "1.0.0";

// Bumped whenever the dataset column layout or model file layout changes.
inline constexpr int kDatasetLayoutVersion = 1;
inline constexpr int kModelFormatVersion = 1;

} // namespace rtcycle
