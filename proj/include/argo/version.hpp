#pragma once

namespace argo {

inline constexpr const char* kVersion = "0.1.0";

// Schema tag written into fitted-model JSON files; bump on breaking changes.
inline constexpr int kModelFileVersion = 1;

}  // namespace argo
