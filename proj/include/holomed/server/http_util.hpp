#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace holomed::server {

struct Target {
  std::string path;
  std::vector<std::string> segments;  // path split on '/', empty segments dropped
  std::map<std::string, std::string> query;
};

// Splits and percent-decodes a request target. Throws Error{InvalidInput}
// on a bad escape.
Target parse_target(std::string_view target);

std::string percent_decode(std::string_view text);

// Regular file under root named by the decoded URL path; nullopt when it is
// missing or would escape root.
std::optional<std::filesystem::path> resolve_under(const std::filesystem::path& root, std::string_view url_path);

std::string_view mime_type(const std::filesystem::path& file);

}  // namespace holomed::server
