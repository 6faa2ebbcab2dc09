// Copyright 2026 The jumpscope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef JUMPSCOPE_MANIFEST_HPP
#define JUMPSCOPE_MANIFEST_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "jumpscope/model.hpp"

namespace jumpscope {

inline constexpr int kManifestVersion = 1;
inline constexpr std::string_view kToolVersion = "1.0.0";

struct FileRecord {
    std::string name;
    uint64_t bytes = 0;
    std::string fnv1a64;
    bool operator==(const FileRecord &) const = default;
};

FileRecord record_bytes(std::string name, std::string_view content);
/// Reads `path` and records it under `name`; throws IoError.
FileRecord record_file(const std::filesystem::path &path, std::string name);

/// Everything needed to rerun a command and check its outputs.
struct RunManifest {
    std::string command;
    std::vector<std::string> argv;  // arguments after the program name
    RawConfig config;               // effective config, defaults included
    std::vector<uint64_t> seeds;
    std::vector<FileRecord> inputs;   // name is the path as given
    std::vector<FileRecord> outputs;  // name is relative to the output directory
    size_t threads = 1;
    double wall_clock_s = 0;
};

std::string manifest_to_json(const RunManifest &manifest);
/// Throws IoError on malformed JSON or a newer manifest version.
RunManifest parse_manifest(std::string_view text);

}  // namespace jumpscope

#endif  // JUMPSCOPE_MANIFEST_HPP
