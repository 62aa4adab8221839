// SPDX-License-Identifier: Apache-2.0
#pragma once

// File formats:
//   dataset  JSON lines, one item per line:
//            {"id", "audio": {"path"} | {"synthetic": {"present": [..]}}, "question", "gold"}
//   sidecar  <stem>.meta.json next to the dataset:
//            {"name", "positive_class", "objects"?: [..]}
//   report   CSV alpha,prefix,acc,precision,recall,f1,yes_rate,unparseable_rate
//            plus a Markdown table for humans

#include <filesystem>
#include <ostream>

#include <json.hpp>

#include "aad/harness.hpp"

namespace aad {

[[nodiscard]] std::filesystem::path sidecar_path(const std::filesystem::path& dataset_path);

[[nodiscard]] nlohmann::json item_to_json(const EvalItem& item);
/// Throws InputError on schema violations.
[[nodiscard]] EvalItem item_from_json(const nlohmann::json& line);

/// Reads the JSON-lines file and its sidecar. A missing sidecar yields
/// name = file stem, positive_class = no and no object universe.
[[nodiscard]] Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

/// RIFF/WAVE, 16-bit PCM or 32-bit float, channels averaged to mono.
[[nodiscard]] AudioClip load_wav(const std::filesystem::path& path);
/// Mono 32-bit float.
void save_wav(const AudioClip& clip, const std::filesystem::path& path);

inline constexpr const char* kReportCsvHeader =
    "alpha,prefix,acc,precision,recall,f1,yes_rate,unparseable_rate";

void write_csv(const SweepReport& report, std::ostream& out);
void write_markdown(const SweepReport& report, std::ostream& out);

}  // namespace aad
