// SPDX-License-Identifier: Apache-2.0
#include "aad/io.hpp"

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace aad {

using nlohmann::json;

std::filesystem::path sidecar_path(const std::filesystem::path& dataset_path) {
  auto sidecar = dataset_path;
  sidecar.replace_extension(".meta.json");
  return sidecar;
}

json item_to_json(const EvalItem& item) {
  json audio;
  if (const auto* synthetic = std::get_if<SyntheticAudio>(&item.audio)) {
    audio = {{"synthetic", {{"present", std::vector<std::string>(synthetic->present.begin(),
                                                                 synthetic->present.end())}}}};
  } else {
    audio = {{"path", std::get<AudioPath>(item.audio).path.generic_string()}};
  }
  return json{{"id", item.id},
              {"audio", std::move(audio)},
              {"question", item.question},
              {"gold", std::string(to_string(item.gold))}};
}

EvalItem item_from_json(const json& line) {
  try {
    EvalItem item;
    item.id = line.at("id").get<std::string>();
    item.question = line.at("question").get<std::string>();
    item.gold = label_from_string(line.at("gold").get<std::string>());
    const json& audio = line.at("audio");
    if (audio.contains("path")) {
      item.audio = AudioPath{audio.at("path").get<std::string>()};
    } else if (audio.contains("synthetic")) {
      const auto present = audio.at("synthetic").at("present").get<std::vector<std::string>>();
      item.audio = SyntheticAudio{ObjectSet(present.begin(), present.end())};
    } else {
      throw InputError("audio must carry \"path\" or \"synthetic\"");
    }
    if (item.question.empty()) {
      throw InputError("question must not be empty");
    }
    return item;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed dataset item: ") + e.what());
  }
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open dataset " + path.string());
  }
  Dataset dataset;
  dataset.name = path.stem().string();
  dataset.base_dir = path.parent_path();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    try {
      dataset.items.push_back(item_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const InputError& e) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }

  const auto meta_path = sidecar_path(path);
  if (std::filesystem::exists(meta_path)) {
    std::ifstream meta_in(meta_path);
    try {
      const json meta = json::parse(meta_in);
      dataset.name = meta.value("name", dataset.name);
      dataset.positive_class = label_from_string(meta.value("positive_class", std::string("no")));
      dataset.objects = meta.value("objects", std::vector<std::string>{});
    } catch (const json::exception& e) {
      throw InputError(meta_path.string() + ": " + e.what());
    }
  }
  return dataset;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InputError("cannot write dataset " + path.string());
  }
  for (const auto& item : dataset.items) {
    out << item_to_json(item).dump() << '\n';
  }
  json meta{{"name", dataset.name}, {"positive_class", std::string(to_string(dataset.positive_class))}};
  if (!dataset.objects.empty()) {
    meta["objects"] = dataset.objects;
  }
  std::ofstream meta_out(sidecar_path(path), std::ios::binary);
  meta_out << meta.dump(2) << '\n';
  if (!out || !meta_out) {
    throw InputError("failed writing dataset " + path.string());
  }
}

// --- WAV -------------------------------------------------------------------

namespace {

static_assert(std::endian::native == std::endian::little, "WAV I/O assumes little-endian");

template <typename T>
T read_le(const std::string& bytes, std::size_t offset) {
  if (offset + sizeof(T) > bytes.size()) {
    throw InputError("truncated WAV file");
  }
  T value;
  std::memcpy(&value, bytes.data() + offset, sizeof(T));
  return value;
}

template <typename T>
void write_le(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

}  // namespace

AudioClip load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open audio " + path.string());
  }
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 || bytes.compare(8, 4, "WAVE") != 0) {
    throw InputError(path.string() + " is not a RIFF/WAVE file");
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t data_offset = 0, data_size = 0;
  for (std::size_t pos = 12; pos + 8 <= bytes.size();) {
    const std::string id = bytes.substr(pos, 4);
    const auto size = read_le<std::uint32_t>(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (id == "fmt ") {
      format = read_le<std::uint16_t>(bytes, body);
      channels = read_le<std::uint16_t>(bytes, body + 2);
      rate = read_le<std::uint32_t>(bytes, body + 4);
      bits = read_le<std::uint16_t>(bytes, body + 14);
      if (format == 0xFFFE && size >= 26) {  // WAVE_FORMAT_EXTENSIBLE
        format = read_le<std::uint16_t>(bytes, body + 24);
      }
    } else if (id == "data") {
      data_offset = body;
      data_size = std::min<std::size_t>(size, bytes.size() - body);
    }
    pos = body + size + (size & 1u);
  }
  if (data_offset == 0 || channels == 0 || rate == 0) {
    throw InputError(path.string() + ": missing fmt or data chunk");
  }
  const bool pcm16 = format == 1 && bits == 16;
  const bool float32 = format == 3 && bits == 32;
  if (!pcm16 && !float32) {
    throw InputError(path.string() + ": only 16-bit PCM and 32-bit float WAV are supported");
  }

  const std::size_t frame_bytes = channels * (bits / 8u);
  const auto frames = static_cast<Eigen::Index>(data_size / frame_bytes);
  AudioClip clip{Eigen::VectorXd::Zero(frames), static_cast<int>(rate)};
  for (Eigen::Index f = 0; f < frames; ++f) {
    double sum = 0.0;
    for (std::size_t ch = 0; ch < channels; ++ch) {
      const std::size_t at = data_offset + static_cast<std::size_t>(f) * frame_bytes + ch * (bits / 8u);
      sum += pcm16 ? read_le<std::int16_t>(bytes, at) / 32768.0
                   : static_cast<double>(read_le<float>(bytes, at));
    }
    clip.samples[f] = sum / channels;
  }
  validate(clip);
  return clip;
}

void save_wav(const AudioClip& clip, const std::filesystem::path& path) {
  validate(clip);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InputError("cannot write audio " + path.string());
  }
  const auto data_bytes = static_cast<std::uint32_t>(clip.samples.size() * 4);
  out.write("RIFF", 4);
  write_le<std::uint32_t>(out, 36 + data_bytes);
  out.write("WAVEfmt ", 8);
  write_le<std::uint32_t>(out, 16);
  write_le<std::uint16_t>(out, 3);  // IEEE float
  write_le<std::uint16_t>(out, 1);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(clip.sample_rate));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(clip.sample_rate) * 4);
  write_le<std::uint16_t>(out, 4);
  write_le<std::uint16_t>(out, 32);
  out.write("data", 4);
  write_le<std::uint32_t>(out, data_bytes);
  for (const double s : clip.samples) {
    write_le<float>(out, static_cast<float>(s));
  }
}

// --- Reports ---------------------------------------------------------------

namespace {

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) {
    return text;
  }
  std::string quoted = "\"";
  for (const char c : text) {
    quoted += c;
    if (c == '"') quoted += '"';
  }
  return quoted + '"';
}

std::string fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

std::string shortest(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", value);
  return buf;
}

}  // namespace

void write_csv(const SweepReport& report, std::ostream& out) {
  out << kReportCsvHeader << '\n';
  for (const auto& row : report.rows) {
    out << shortest(row.alpha) << ',' << csv_field(row.prefix);
    if (row.report) {
      const auto& r = *row.report;
      for (const double v : {r.accuracy, r.precision, r.recall, r.f1, r.yes_rate, r.unparseable_rate}) {
        out << ',' << fixed(v, 6);
      }
    } else {
      out << ",,,,,,";
    }
    out << '\n';
  }
}

void write_markdown(const SweepReport& report, std::ostream& out) {
  out << "Dataset: " << report.dataset_name << " (positive class: "
      << to_string(report.positive_class) << ")\n\n";
  out << "| alpha | Prefix | Acc | F1 | Precision | Recall | Yes (%) | Unparseable (%) |\n";
  out << "|---:|---|---:|---:|---:|---:|---:|---:|\n";
  for (const auto& row : report.rows) {
    std::string prefix = row.prefix.empty() ? "(none)" : row.prefix;
    for (std::size_t pos = 0; (pos = prefix.find('|', pos)) != std::string::npos; pos += 2) {
      prefix.replace(pos, 1, "\\|");
    }
    out << "| " << shortest(row.alpha) << " | " << prefix << " | ";
    if (row.report) {
      const auto& r = *row.report;
      out << fixed(r.accuracy, 3) << " | " << fixed(r.f1, 3) << " | " << fixed(r.precision, 3)
          << " | " << fixed(r.recall, 3) << " | " << fixed(100.0 * r.yes_rate, 1) << " | "
          << fixed(100.0 * r.unparseable_rate, 1) << " |\n";
    } else {
      out << "error: " << row.error << " | | | | | |\n";
    }
  }
  out << "\nRandom-guess reference on a balanced set: Acc 0.500 / F1 0.500\n";
}

}  // namespace aad
