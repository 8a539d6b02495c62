#include "becprobe/cli/emit.hpp"

#include <array>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <openssl/evp.h>

namespace becprobe::cli {

std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, 17);
  if (res.ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return {buf.data(), res.ptr};
}

std::string timeseries_csv(const std::vector<std::pair<double, double>>& series, const std::string& header) {
  std::string out = header + "\n";
  for (const auto& [t, v] : series) {
    out += format_double(t);
    out += ',';
    out += format_double(v);
    out += '\n';
  }
  return out;
}

std::string table_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw std::logic_error("table_csv: row width differs from header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string husimi_csv(const HusimiGrid& grid) {
  std::string out = "re,im,q\n";
  for (std::size_t i = 0; i < grid.im_axis.size(); ++i)
    for (std::size_t j = 0; j < grid.re_axis.size(); ++j) {
      out += format_double(grid.re_axis[j]);
      out += ',';
      out += format_double(grid.im_axis[i]);
      out += ',';
      out += format_double(grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      out += '\n';
    }
  return out;
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256: digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xf];
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "': " + std::strerror(errno));
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  f.close();
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "': " + std::strerror(errno));
}

void emit_timeseries(const std::vector<std::pair<double, double>>& series, const std::filesystem::path& path) {
  write_file(path, timeseries_csv(series));
}

void emit_husimi(const HusimiGrid& grid, const std::filesystem::path& path) { write_file(path, husimi_csv(grid)); }

}  // namespace becprobe::cli
