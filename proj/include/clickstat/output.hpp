#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

namespace clickstat {

enum class OutputFormat { Json, Csv };

OutputFormat parse_format(const std::string& text);  // "json" | "csv"

/// 17 significant digits: enough that parsing the printed text gives
/// back the identical double.
std::string format_probability(double value);

/// Minimal JSON emitter with a fixed, locale-free number format so CLI
/// output is byte-stable across runs and platforms.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(const std::string& name);
  JsonWriter& value(const std::string& text);
  JsonWriter& value(const char* text);
  JsonWriter& value(double number);
  JsonWriter& value(int number);
  JsonWriter& value(std::int64_t number);
  JsonWriter& value(std::uint64_t number);

  std::string str() const;

 private:
  void separate();

  std::ostringstream out_;
  std::vector<bool> first_in_scope_ = {true};
  bool after_key_ = false;
};

std::string json_escape(const std::string& text);

/// {"error": message, "exit_code": code} plus newline, for stderr.
std::string render_error(const std::string& message, int exit_code);

/// CSV under RFC-ish rules: our cells never contain commas, quotes or
/// newlines, so no quoting logic is needed.
std::string render_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows);

}  // namespace clickstat
