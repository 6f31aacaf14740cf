#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "holomed/session/binding.hpp"
#include "holomed/session/lesson.hpp"

namespace holomed::store {

using Json = nlohmann::json;

enum class Collection {
  Students,
  Teachers,
  Lessons,
  Questions,
  GestureBindings,
  HologramOptions,
  Sessions,
  LatencySamples,
};

inline constexpr Collection kAllCollections[] = {
    Collection::Students,        Collection::Teachers, Collection::Lessons,
    Collection::Questions,       Collection::GestureBindings,
    Collection::HologramOptions, Collection::Sessions, Collection::LatencySamples,
};

// Directory and URL name, e.g. "gesture_bindings".
std::string_view to_string(Collection c);
// Throws Error{Validation} for names outside the closed set.
Collection collection_from_string(std::string_view name);

// Sorted keys, no whitespace, UTF-8 passed through unescaped.
std::string canonical(const Json& value);

// Throws Error{Validation} with the offending field path in where().
void validate_body(Collection c, const Json& body);

// Top-level fields a body may carry; list() filters are limited to these.
const std::vector<std::string>& known_fields(Collection c);

struct HologramOptions {
  double size_scale = 1.0;
  double intensity = 1.0;
  double angle_deg = 45.0;
  int rotation_period_ms = 1600;

  friend bool operator==(const HologramOptions&, const HologramOptions&) = default;
};

HologramOptions hologram_options_from_json(const Json& body);
Json to_json(const HologramOptions& options);

session::GestureBinding binding_from_json(const Json& body);
Json to_json(const session::GestureBinding& binding);

session::Stage stage_from_json(const Json& j);
Json to_json(const session::Stage& stage);
// Question documents carry their id outside the body.
session::Question question_from_json(std::string id, const Json& body);

}  // namespace holomed::store
