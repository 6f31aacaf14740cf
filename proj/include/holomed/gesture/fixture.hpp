#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "holomed/gesture/depth.hpp"

namespace holomed::gesture {

// Text depth sequence:
//   DSEQ1 <width> <height> <frame_count>
//   T <timestamp_ms>
//   <height lines of width space-separated millimeter values>
//   ...
// Parse failures throw Error{Parse} whose where() is "line N".
std::vector<DepthFrame> read_depth_sequence(std::istream& in);
std::vector<DepthFrame> read_depth_sequence(const std::filesystem::path& path);

void write_depth_sequence(std::ostream& out, const std::vector<DepthFrame>& frames);
void write_depth_sequence(const std::filesystem::path& path, const std::vector<DepthFrame>& frames);

}  // namespace holomed::gesture
