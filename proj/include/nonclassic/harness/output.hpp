#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "nonclassic/harness/commands.hpp"
#include "nonclassic/harness/config.hpp"

namespace nonclassic::harness {

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

/// `#`-prefixed metadata: command, timestamp, and the resolved config.
inline std::string metadata_header(const std::string& command, const RunConfig& config, const CommandOutput& output,
                                   const std::string& timestamp) {
  std::ostringstream h;
  h << "# nonclassic " << command << "\n";
  h << "# generated: " << timestamp << "\n";
  h << "# exit_code: " << output.exit_code << "\n";
  std::istringstream dump(resolved_json(config, output.specs).dump(2));
  for (std::string line; std::getline(dump, line);) h << "# " << line << "\n";
  for (const auto& w : output.warnings) h << "# warning: " << w << "\n";
  return h.str();
}

/// Strips `#` comment lines; what remains must be identical across runs of one config.
inline std::string csv_body(const std::string& text) {
  std::istringstream in(text);
  std::string out;
  for (std::string line; std::getline(in, line);)
    if (line.empty() || line[0] != '#') out += line + "\n";
  return out;
}

struct WrittenFiles {
  std::filesystem::path csv;
  std::filesystem::path summary;
  std::filesystem::path plot_script;
};

inline WrittenFiles write_outputs(const std::string& command, const RunConfig& config, const CommandOutput& output,
                                  const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::string header = metadata_header(command, config, output, utc_timestamp());
  WrittenFiles files;
  auto write = [&](const std::filesystem::path& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << header << body;
  };
  files.csv = out_dir / (config.outputs.csv.empty() ? command + ".csv" : config.outputs.csv);
  files.summary = out_dir / (config.outputs.summary.empty() ? command + "_summary.txt" : config.outputs.summary);
  if (!output.csv.empty()) write(files.csv, output.csv);
  write(files.summary, output.summary);
  if (!config.outputs.plot_script.empty() && !output.plot_script.empty()) {
    files.plot_script = out_dir / config.outputs.plot_script;
    write(files.plot_script, output.plot_script);
  }
  return files;
}

} // namespace nonclassic::harness
