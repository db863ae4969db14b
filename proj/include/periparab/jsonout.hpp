#pragma once

#include <string>
#include <utility>
#include <vector>

namespace periparab {

/// Ordered JSON document for deterministic serialization: object keys keep
/// insertion order, doubles print with 17 significant digits (exact binary
/// round trip), and non-finite doubles serialize as null.
class JsonValue {
 public:
  static JsonValue null();
  static JsonValue boolean(bool v);
  static JsonValue integer(long long v);
  static JsonValue number(double v);
  static JsonValue string(std::string v);
  static JsonValue array();
  static JsonValue object();

  /// Array of numbers, in order.
  static JsonValue number_array(const std::vector<double>& values);

  /// Appends to an array value.
  JsonValue& push(JsonValue v);

  /// Inserts (or overwrites) an object member, preserving first-insertion
  /// order for existing keys.
  JsonValue& set(const std::string& key, JsonValue v);

  /// Serializes with two-space indentation and a trailing newline at the top
  /// level.
  [[nodiscard]] std::string dump() const;

 private:
  enum class Kind { null, boolean, integer, number, string, array, object };

  Kind kind_ = Kind::null;
  bool bool_ = false;
  long long int_ = 0;
  double num_ = 0.0;
  std::string str_;
  std::vector<JsonValue> items_;
  std::vector<std::pair<std::string, JsonValue>> members_;

  void write(std::string& out, int depth) const;
};

/// Formats one double with 17 significant digits ("%.17g"); non-finite
/// values return "null".
[[nodiscard]] std::string format_double(double v);

/// Writes text to a file, replacing any existing content; throws
/// ValidationError when the file cannot be created.
void write_text_file(const std::string& path, const std::string& text);

/// Reads an entire file; throws ValidationError when it cannot be opened.
[[nodiscard]] std::string read_text_file(const std::string& path);

}  // namespace periparab
