#include "output.hpp"

#include <charconv>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "discospec/errors.hpp"

#ifndef DISCOSPEC_VERSION
#define DISCOSPEC_VERSION "0.0.0"
#endif

namespace discospec::cli {

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

std::string fmt(long v) { return std::to_string(v); }

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row(header); }

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::logic_error("csv row width mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) body_ += ',';
    body_ += cells[i];
  }
  body_ += '\n';
}

void CsvWriter::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ContractError("cannot write " + path.string());
  out << body_;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContractError("cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return hex.str();
}

Manifest::Manifest(std::string subcommand, nlohmann::json params)
    : subcommand_(std::move(subcommand)), params_(std::move(params)) {}

void Manifest::input(const std::string& path) { inputs_.push_back({{"path", path}, {"sha256", sha256_file(path)}}); }

void Manifest::output(const std::filesystem::path& path) { outputs_.push_back(path.filename().string()); }

void Manifest::write(const std::filesystem::path& dir) const {
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  const std::time_t t = std::chrono::system_clock::to_time_t(started_);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ts;
  ts << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  nlohmann::json m = {{"subcommand", subcommand_}, {"inputs", inputs_},      {"parameters", params_},
                      {"version", DISCOSPEC_VERSION}, {"started", ts.str()}, {"wall_time_s", wall},
                      {"outputs", outputs_}};
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw ContractError("cannot write manifest in " + dir.string());
  out << m.dump(2) << '\n';
}

}  // namespace discospec::cli
