#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kornlab/rng.hpp"
#include "kornlab/version.hpp"

namespace kornlab::report {

using json = nlohmann::json;

// Fixed scientific float rendering: %.12e with the exponent sign and
// padding stripped, so 1.0 reads "1.000000000000e0" and 1.5e-5 reads
// "1.500000000000e-5".  Reports refuse non-finite values outright; any
// NaN or infinity upstream is a bug, not a result.
inline std::string canonical_float(double x) {
  if (!std::isfinite(x))
    throw std::runtime_error("report: non-finite value cannot be serialized");
  if (x == 0.0) x = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  std::string s = buf;
  std::size_t e = s.find('e');
  std::string mant = s.substr(0, e);
  std::string exp = s.substr(e + 1);
  bool neg = exp[0] == '-';
  std::size_t i = (exp[0] == '+' || exp[0] == '-') ? 1 : 0;
  while (i + 1 < exp.size() && exp[i] == '0') ++i;
  return mant + "e" + (neg ? "-" : "") + exp.substr(i);
}

namespace detail {

inline void escape_string(std::string& out, std::string_view s) {
  out += '"';
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", unsigned(c));
          out += buf;
        } else {
          out += char(c);
        }
    }
  }
  out += '"';
}

inline void emit(std::string& out, const json& v) {
  switch (v.type()) {
    case json::value_t::null:
      out += "null";
      break;
    case json::value_t::boolean:
      out += v.get<bool>() ? "true" : "false";
      break;
    case json::value_t::number_integer:
      out += std::to_string(v.get<std::int64_t>());
      break;
    case json::value_t::number_unsigned:
      out += std::to_string(v.get<std::uint64_t>());
      break;
    case json::value_t::number_float:
      out += canonical_float(v.get<double>());
      break;
    case json::value_t::string:
      escape_string(out, v.get_ref<const std::string&>());
      break;
    case json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& item : v) {
        if (!first) out += ',';
        first = false;
        emit(out, item);
      }
      out += ']';
      break;
    }
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        escape_string(out, it.key());
        out += ':';
        emit(out, it.value());
      }
      out += '}';
      break;
    }
    default:
      throw std::runtime_error("report: unsupported JSON value type");
  }
}

}  // namespace detail

// Canonical serialization: keys in sorted order (the json object already
// iterates sorted), no whitespace, floats in the fixed format above.
// Equal values always serialize to equal bytes.
inline std::string canonical_json(const json& v) {
  std::string out;
  detail::emit(out, v);
  return out;
}

inline std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}

inline std::string config_hash(const json& config) {
  return hash_hex(hash_label(canonical_json(config)));
}

// Uniform report envelope; every artifact carries the config echo, its
// hash, the seed, the parallelism degree, and the library version, which
// together pin down an exact re-run.
inline json make_report(const std::string& command, const json& config,
                        std::uint64_t seed, int threads,
                        const json& results) {
  json r;
  r["command"] = command;
  r["config"] = config;
  r["config_hash"] = config_hash(config);
  r["seed"] = seed;
  r["threads"] = threads;
  r["version"] = kVersion;
  r["results"] = results;
  return r;
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& content) {
  if (!path.parent_path().empty())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("report: cannot open " + path.string());
  out.write(content.data(), std::streamsize(content.size()));
  if (!out)
    throw std::runtime_error("report: short write to " + path.string());
}

// RFC-4180 table: CRLF row endings, fields quoted when they contain a
// comma, quote, or line break, embedded quotes doubled.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) {
    if (row.size() != header.size())
      throw std::runtime_error("csv: row width does not match header");
    rows.push_back(std::move(row));
  }

  static std::string escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
      if (c == '"') out += "\"\"";
      else out += c;
    }
    out += '"';
    return out;
  }

  std::string serialize() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += escape(cells[i]);
      }
      out += "\r\n";
    };
    line(header);
    for (const auto& row : rows) line(row);
    return out;
  }
};

}  // namespace kornlab::report
