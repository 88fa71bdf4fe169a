#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"

#include "halfres/types.hpp"

namespace halfres::harness {

/// Insertion-ordered JSON so reruns produce byte-identical files.
using Json = nlohmann::ordered_json;

Json to_json(cplx z);
/// NaN and infinities become null.
Json number_or_null(double v);

/// Shortest text that round-trips the double.
std::string format_double(double v);

/// One CSV field with RFC 4180 quoting.
std::string csv_field(const std::string& s);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> row);
  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Subset of JSON Schema: type, required, properties, items, enum, minimum.
/// Returns one message per violation, prefixed by the JSON pointer.
std::vector<std::string> schema_errors(const Json& value, const Json& schema);

/// Serialized writer for one experiment directory. Every JSON file is checked against its
/// schema before it is written; finish() writes manifest.json.
class OutputDir {
 public:
  OutputDir(std::filesystem::path dir, std::string command);

  void write_json(const std::string& name, const Json& value, const Json& schema);
  void write_csv(const std::string& name, const CsvTable& table);
  void finish(const Json& summary);
  const std::filesystem::path& path() const { return dir_; }

 private:
  void write_file(const std::string& name, const std::string& kind, const std::string& text);

  std::filesystem::path dir_;
  std::string command_;
  std::mutex mutex_;
  Json files_ = Json::array();
};

/// Schema of manifest.json.
const Json& manifest_schema();

}  // namespace halfres::harness
