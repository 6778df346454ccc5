#pragma once

namespace curvegas {

inline constexpr const char* kVersion = "0.1.0";

// Version of the on-disk artifact layout (CSV headers, JSON report fields).
// Bump when a field is renamed or removed; readers check it before parsing.
inline constexpr int kSchemaVersion = 1;

} // namespace curvegas
