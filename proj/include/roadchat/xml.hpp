#pragma once

#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace roadchat::xml {

/// Minimal DOM used by every file reader in the project.
struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Element> children;

  const std::string* find_attribute(std::string_view key) const;
  /// Throws ParseError when the attribute is missing.
  const std::string& attribute(std::string_view key) const;
  double number(std::string_view key) const;
  long long integer(std::string_view key) const;
  std::vector<const Element*> children_named(std::string_view child_name) const;
  const Element* first_child(std::string_view child_name) const;
};

/// Parses a whole document and returns its root element. Throws ParseError.
Element parse(std::string_view text);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);
double parse_number(std::string_view text);

std::string escape(std::string_view text);

using Attributes = std::vector<std::pair<std::string, std::string>>;

/// Streaming writer with two-space indentation; output depends only on call order.
class Writer {
 public:
  Writer();

  void open(std::string_view name, const Attributes& attributes = {});
  void leaf(std::string_view name, const Attributes& attributes = {});
  void close();
  void comment(std::string_view text);

  std::string finish();

 private:
  void write_start(std::string_view name, const Attributes& attributes);

  std::string out_;
  std::vector<std::string> stack_;
};

}  // namespace roadchat::xml
