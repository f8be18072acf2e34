#pragma once

namespace popsync {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace popsync
