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


#include "jumpscope/manifest.hpp"

#include <json.hpp>

#include "jumpscope/io.hpp"

namespace jumpscope {

namespace {

nlohmann::ordered_json files_to_json(const std::vector<FileRecord> &files) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const FileRecord &f : files) {
        arr.push_back({{"name", f.name}, {"bytes", f.bytes}, {"fnv1a64", f.fnv1a64}});
    }
    return arr;
}

std::vector<FileRecord> files_from_json(const nlohmann::json &arr) {
    std::vector<FileRecord> files;
    for (const auto &f : arr) {
        files.push_back({f.at("name").get<std::string>(), f.at("bytes").get<uint64_t>(),
                         f.at("fnv1a64").get<std::string>()});
    }
    return files;
}

}  // namespace

FileRecord record_bytes(std::string name, std::string_view content) {
    return {std::move(name), content.size(), fnv1a_hex(content)};
}

FileRecord record_file(const std::filesystem::path &path, std::string name) {
    return record_bytes(std::move(name), read_file(path));
}

std::string manifest_to_json(const RunManifest &m) {
    nlohmann::ordered_json j;
    j["tool"] = "jumpscope";
    j["tool_version"] = kToolVersion;
    j["manifest_version"] = kManifestVersion;
    j["formats"] = {{"trace_binary", kTraceFormatVersion}, {"trace_csv", kCsvFormatVersion}};
    j["command"] = m.command;
    j["argv"] = m.argv;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    for (const auto &[key, value] : m.config) {
        config[key] = value;
    }
    j["config"] = config;
    j["seeds"] = m.seeds;
    j["inputs"] = files_to_json(m.inputs);
    j["outputs"] = files_to_json(m.outputs);
    j["threads"] = m.threads;
    j["wall_clock_s"] = m.wall_clock_s;
    return j.dump(2) + "\n";
}

RunManifest parse_manifest(std::string_view text) {
    try {
        nlohmann::json j = nlohmann::json::parse(text);
        if (j.at("manifest_version").get<int>() > kManifestVersion) {
            throw IoError("manifest version is newer than this tool");
        }
        RunManifest m;
        m.command = j.at("command").get<std::string>();
        m.argv = j.at("argv").get<std::vector<std::string>>();
        for (const auto &[key, value] : j.at("config").items()) {
            m.config[key] = value.get<std::string>();
        }
        m.seeds = j.at("seeds").get<std::vector<uint64_t>>();
        m.inputs = files_from_json(j.at("inputs"));
        m.outputs = files_from_json(j.at("outputs"));
        m.threads = j.value("threads", size_t{1});
        m.wall_clock_s = j.value("wall_clock_s", 0.0);
        return m;
    } catch (const nlohmann::json::exception &e) {
        throw IoError(std::string("malformed manifest: ") + e.what());
    }
}

}  // namespace jumpscope
