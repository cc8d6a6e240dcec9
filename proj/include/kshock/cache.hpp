#pragma once

#include "kshock/common.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace kshock {

// Directory from KINETIC_SHOCK_CACHE, or empty when caching is disabled.
std::string cache_dir();

// Binary blob (rows, cols, column-major doubles) plus a JSON sidecar. A load
// succeeds only when the sidecar metadata equals `meta`.
void save_matrix(const std::string& key, const Mat& m, const nlohmann::json& meta);
std::optional<Mat> load_matrix(const std::string& key, const nlohmann::json& meta);

}  // namespace kshock
