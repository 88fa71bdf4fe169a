#include "halfres/harness/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "halfres/errors.hpp"

namespace halfres::harness {

Json to_json(cplx z) {
  Json j;
  j["re"] = number_or_null(z.real());
  j["im"] = number_or_null(z.imag());
  return j;
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw Error("csv: row width does not match the header");
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::ostringstream os;
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_field(cells[i]);
    os << "\r\n";
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return os.str();
}

namespace {

bool type_matches(const Json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "integer") return v.is_number_integer();
  if (type == "number") return v.is_number();
  if (type == "null") return v.is_null();
  return false;
}

void check(const Json& v, const Json& schema, const std::string& ptr, std::vector<std::string>& errs) {
  if (const auto t = schema.find("type"); t != schema.end()) {
    bool ok = false;
    if (t->is_array()) {
      for (const auto& alt : *t) ok = ok || type_matches(v, alt.get<std::string>());
    } else {
      ok = type_matches(v, t->get<std::string>());
    }
    if (!ok) {
      errs.push_back(ptr + ": expected " + t->dump() + ", got " + v.type_name());
      return;
    }
  }
  if (const auto e = schema.find("enum"); e != schema.end()) {
    bool ok = false;
    for (const auto& alt : *e) ok = ok || alt == v;
    if (!ok) errs.push_back(ptr + ": value " + v.dump() + " not in " + e->dump());
  }
  if (const auto m = schema.find("minimum"); m != schema.end() && v.is_number() && v.get<double>() < m->get<double>())
    errs.push_back(ptr + ": below minimum " + m->dump());
  if (v.is_object()) {
    if (const auto req = schema.find("required"); req != schema.end())
      for (const auto& key : *req)
        if (!v.contains(key.get<std::string>())) errs.push_back(ptr + ": missing key '" + key.get<std::string>() + "'");
    if (const auto props = schema.find("properties"); props != schema.end())
      for (const auto& [key, sub] : props->items())
        if (v.contains(key)) check(v.at(key), sub, ptr + "/" + key, errs);
  }
  if (v.is_array())
    if (const auto items = schema.find("items"); items != schema.end())
      for (std::size_t i = 0; i < v.size(); ++i) check(v[i], *items, ptr + "/" + std::to_string(i), errs);
}

}  // namespace

std::vector<std::string> schema_errors(const Json& value, const Json& schema) {
  std::vector<std::string> errs;
  check(value, schema, "", errs);
  return errs;
}

OutputDir::OutputDir(std::filesystem::path dir, std::string command)
    : dir_(std::move(dir)), command_(std::move(command)) {
  std::filesystem::create_directories(dir_);
}

void OutputDir::write_file(const std::string& name, const std::string& kind, const std::string& text) {
  std::lock_guard lock(mutex_);
  std::ofstream out(dir_ / name, std::ios::binary);
  if (!out) throw Error("cannot open " + (dir_ / name).string() + " for writing");
  out << text;
  out.close();
  if (!out) throw Error("write failed: " + (dir_ / name).string());
  Json entry;
  entry["name"] = name;
  entry["kind"] = kind;
  entry["bytes"] = text.size();
  files_.push_back(entry);
}

void OutputDir::write_json(const std::string& name, const Json& value, const Json& schema) {
  const auto errs = schema_errors(value, schema);
  if (!errs.empty()) {
    std::string msg = name + " fails its schema:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw Error(msg);
  }
  write_file(name, "json", value.dump(2) + "\n");
}

void OutputDir::write_csv(const std::string& name, const CsvTable& table) { write_file(name, "csv", table.str()); }

void OutputDir::finish(const Json& summary) {
  Json manifest;
  manifest["command"] = command_;
  {
    std::lock_guard lock(mutex_);
    manifest["files"] = files_;
  }
  manifest["summary"] = summary;
  const auto errs = schema_errors(manifest, manifest_schema());
  if (!errs.empty()) throw Error("manifest fails its schema: " + errs.front());
  std::ofstream out(dir_ / "manifest.json", std::ios::binary);
  out << manifest.dump(2) << "\n";
  if (!out) throw Error("write failed: manifest.json");
}

const Json& manifest_schema() {
  static const Json schema = Json::parse(R"({
    "type": "object",
    "required": ["command", "files", "summary"],
    "properties": {
      "command": {"type": "string"},
      "files": {"type": "array", "items": {
        "type": "object", "required": ["name", "kind", "bytes"],
        "properties": {"name": {"type": "string"}, "kind": {"enum": ["json", "csv"]},
                       "bytes": {"type": "integer", "minimum": 0}}}},
      "summary": {"type": "object"}
    }
  })");
  return schema;
}

}  // namespace halfres::harness
