#include "holomed/ids.hpp"

#include <cstdint>
#include <random>

#include <fmt/format.h>

namespace holomed {

std::string random_id() {
  thread_local std::mt19937_64 engine{std::random_device{}()};
  return fmt::format("{:016x}", static_cast<std::uint64_t>(engine()));
}

}  // namespace holomed
