#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace discospec::cli {

/// 17 significant digits with a '.' decimal point, independent of the locale.
std::string fmt(double v);
std::string fmt(long v);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  /// LF line endings, no trailing whitespace.
  std::string str() const { return body_; }
  void write(const std::filesystem::path& path) const;

 private:
  std::size_t columns_;
  std::string body_;
};

std::string sha256_file(const std::filesystem::path& path);

/// Collects what one run read and wrote, then writes manifest.json next to the outputs.
class Manifest {
 public:
  Manifest(std::string subcommand, nlohmann::json params);
  void input(const std::string& path);
  void output(const std::filesystem::path& path);
  void write(const std::filesystem::path& dir) const;

 private:
  std::string subcommand_;
  nlohmann::json params_;
  nlohmann::json inputs_ = nlohmann::json::array();
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
  std::chrono::system_clock::time_point started_ = std::chrono::system_clock::now();
};

}  // namespace discospec::cli
