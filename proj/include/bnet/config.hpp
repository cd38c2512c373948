/*
 * Copyright 2026 The BNET Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Experiment configuration: an INI file of [section] key = value entries.
// Every hyperparameter is a key; "auto" picks the per-environment default.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bnet/trainer.hpp"

namespace bnet {

class Config {
public:
    /// All keys at their defaults.
    Config();

    static Config parse(std::string_view ini);
    static Config load(const std::string& path);

    /// Keys are "section.key". Unknown keys throw ConfigError naming the key.
    void set(const std::string& key, const std::string& value);
    std::string get(const std::string& key) const;
    /// Applies "section.key=value".
    void apply_override(std::string_view assignment);

    /// Canonical INI text: sections and keys in a fixed order.
    std::string serialize() const;
    /// Git-style blob hash (SHA-1 of "blob <size>\0" + serialize()).
    std::string hash() const;

    /// Typed configuration; "auto" entries take the environment's defaults.
    /// Bad values throw ConfigError naming the key.
    TrainerConfig resolve() const;

    static const std::vector<std::string>& keys();

private:
    std::map<std::string, std::string> values_;
};

/// SHA-1 of the git blob object for `content`, as lowercase hex.
std::string git_blob_sha1(std::string_view content);

/// Directory for run artifacts: $BNET_OUTPUT_ROOT, or "runs".
std::string output_root();
inline constexpr const char* kOutputRootVariable = "BNET_OUTPUT_ROOT";

struct ManifestPaths {
    std::string trace;
    std::string selection;
    std::string checkpoint;
    std::string trajectories;  // empty when not logged
};

/// JSON manifest: configuration snapshot, hash, seed, environment, variant
/// and artifact paths.
std::string manifest_json(const Config& config, const ManifestPaths& paths);

} // namespace bnet
