#pragma once

// Curve serialization. CSV uses std::to_chars/std::from_chars, which ignore
// the global locale, so output always has dot decimals and LF line endings.
// A single curve is written as `p,yield`; several curves sharing a grid are
// written wide as `p,<method>,<method>,...`.

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "ebcap/capacity.hpp"

namespace ebcap {

inline constexpr int kCsvSignificantDigits = 12;
inline constexpr const char* kJsonSchema = "ebcap.curves/1";

inline std::string format_number(double v, int digits = kCsvSignificantDigits) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits);
  if (res.ec != std::errc{}) throw std::runtime_error("format_number: conversion failed");
  std::string out(buf, res.ptr);
  return out == "-0" ? "0" : out;
}

inline double parse_number(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  }
  return v;
}

inline void write_csv(std::ostream& os, const std::vector<YieldCurve>& curves) {
  if (curves.empty()) throw std::invalid_argument("write_csv: no curves");
  const auto& base = curves.front();
  for (const auto& c : curves) {
    if (c.points.size() != base.points.size()) {
      throw std::invalid_argument("write_csv: curves do not share a grid");
    }
  }
  std::string out = "p";
  if (curves.size() == 1) {
    out += ",yield";
  } else {
    for (const auto& c : curves) out += "," + c.method;
  }
  out += '\n';
  for (std::size_t i = 0; i < base.points.size(); ++i) {
    out += format_number(base.points[i].p);
    for (const auto& c : curves) {
      if (std::abs(c.points[i].p - base.points[i].p) > kGridTolerance) {
        throw std::invalid_argument("write_csv: curves do not share a grid");
      }
      out += ',';
      out += format_number(c.points[i].yield);
    }
    out += '\n';
  }
  os << out;
}

inline std::string to_csv(const std::vector<YieldCurve>& curves) {
  std::ostringstream os;
  write_csv(os, curves);
  return os.str();
}

/// Reads single or wide CSV. A `p,yield` file yields one curve named by
/// `fallback_method`.
inline std::vector<YieldCurve> read_csv(std::istream& is, const std::string& fallback_method) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  };
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("read_csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  if (header.size() < 2 || header[0] != "p") {
    throw std::invalid_argument("read_csv: header must start with 'p' and name a column");
  }
  std::vector<YieldCurve> curves(header.size() - 1);
  for (std::size_t j = 1; j < header.size(); ++j) {
    curves[j - 1].method =
        (header.size() == 2 && header[1] == "yield") ? fallback_method : header[j];
  }
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw std::invalid_argument("read_csv: line " + std::to_string(line_no) +
                                  ": expected " + std::to_string(header.size()) + " columns");
    }
    try {
      const double p = parse_number(cells[0]);
      for (std::size_t j = 1; j < cells.size(); ++j) {
        curves[j - 1].points.push_back({p, parse_number(cells[j]), {}});
      }
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("read_csv: line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  for (const auto& c : curves) check_curve(c);
  return curves;
}

inline nlohmann::ordered_json to_json(const std::vector<YieldCurve>& curves) {
  nlohmann::ordered_json doc;
  doc["schema"] = kJsonSchema;
  auto& arr = doc["curves"] = nlohmann::ordered_json::array();
  for (const auto& c : curves) {
    nlohmann::ordered_json jc;
    jc["method"] = c.method;
    jc["metadata"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : c.metadata) jc["metadata"][k] = v;
    auto& pts = jc["points"] = nlohmann::ordered_json::array();
    for (const auto& pt : c.points) {
      nlohmann::ordered_json jp;
      jp["p"] = pt.p;
      jp["yield"] = pt.yield;
      if (!pt.winner.empty()) jp["winner"] = pt.winner;
      pts.push_back(std::move(jp));
    }
    arr.push_back(std::move(jc));
  }
  return doc;
}

inline std::vector<YieldCurve> from_json(const nlohmann::ordered_json& doc) {
  if (!doc.contains("schema") || doc["schema"] != kJsonSchema) {
    throw std::invalid_argument(std::string("from_json: expected schema ") + kJsonSchema);
  }
  std::vector<YieldCurve> curves;
  for (const auto& jc : doc.at("curves")) {
    YieldCurve c;
    c.method = jc.at("method").get<std::string>();
    for (const auto& [k, v] : jc.at("metadata").items()) c.metadata[k] = v.get<std::string>();
    for (const auto& jp : jc.at("points")) {
      c.points.push_back({jp.at("p").get<double>(), jp.at("yield").get<double>(),
                          jp.value("winner", std::string{})});
    }
    check_curve(c);
    curves.push_back(std::move(c));
  }
  return curves;
}

}  // namespace ebcap
