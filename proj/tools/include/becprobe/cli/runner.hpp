#pragma once

#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "becprobe/cli/config.hpp"

namespace becprobe::cli {

// A physics or I/O failure inside one product.
class ProductError : public std::runtime_error {
 public:
  ProductError(const std::string& context, const std::string& what)
      : std::runtime_error(context + ": " + what) {}
};

struct OutputFile {
  std::string name;  // relative to the config's output directory
  std::string content;
};

struct ProductResult {
  std::string id;
  std::string type;
  std::string parameter_hash;
  std::vector<OutputFile> files;
  std::vector<std::string> warnings;
  std::string summary;  // human-readable lines for stdout
};

// Computes one product entirely in memory.
ProductResult run_product(const ProductSpec& spec);

struct RunOptions {
  std::filesystem::path out_dir = "out";
  int threads = 1;
};

struct RunSummary {
  std::filesystem::path directory;
  std::vector<std::string> files;  // manifest.json last
};

// Products run concurrently; files are written in config order, then manifest.json.
RunSummary run_config(const Config& cfg, const RunOptions& options, std::ostream& log);

}  // namespace becprobe::cli
