#pragma once

#include <string>

namespace holomed {

// 16 lowercase hex digits from a per-thread random engine.
std::string random_id();

}  // namespace holomed
