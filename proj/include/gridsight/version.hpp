#pragma once

namespace gridsight {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kReportSchema = "gridsight/1";

} // namespace gridsight
