#include "roadchat/xml.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <charconv>
#include <cmath>
#include <sstream>
#include <system_error>

#include "roadchat/errors.hpp"

namespace roadchat::xml {

namespace pt = boost::property_tree;

namespace {

Element convert(const std::string& name, const pt::ptree& tree) {
  Element element;
  element.name = name;
  for (const auto& [key, child] : tree) {
    if (key == "<xmlattr>") {
      for (const auto& [attr_key, attr_value] : child) {
        element.attributes.emplace_back(attr_key, attr_value.data());
      }
    } else if (key == "<xmlcomment>" || key == "<xmltext>") {
      continue;
    } else {
      element.children.push_back(convert(key, child));
    }
  }
  return element;
}

}  // namespace

const std::string* Element::find_attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return &v;
  }
  return nullptr;
}

const std::string& Element::attribute(std::string_view key) const {
  if (const auto* value = find_attribute(key)) return *value;
  throw ParseError("<" + name + "> is missing attribute '" + std::string(key) + "'");
}

double Element::number(std::string_view key) const {
  try {
    return parse_number(attribute(key));
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("<" + name + "> attribute '" + std::string(key) + "' is not a number");
  }
}

long long Element::integer(std::string_view key) const {
  const auto& text = attribute(key);
  long long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError("<" + name + "> attribute '" + std::string(key) + "' is not an integer");
  }
  return value;
}

std::vector<const Element*> Element::children_named(std::string_view child_name) const {
  std::vector<const Element*> out;
  for (const auto& child : children) {
    if (child.name == child_name) out.push_back(&child);
  }
  return out;
}

const Element* Element::first_child(std::string_view child_name) const {
  for (const auto& child : children) {
    if (child.name == child_name) return &child;
  }
  return nullptr;
}

Element parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  pt::ptree tree;
  try {
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(std::string("malformed XML: ") + e.what());
  }
  for (const auto& [key, child] : tree) {
    if (key == "<xmlcomment>") continue;
    return convert(key, child);
  }
  throw ParseError("XML document has no root element");
}

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buffer, ptr);
}

double parse_number(std::string_view text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw ParseError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

Writer::Writer() { out_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"; }

void Writer::write_start(std::string_view name, const Attributes& attributes) {
  out_.append(stack_.size() * 2, ' ');
  out_ += '<';
  out_ += name;
  for (const auto& [key, value] : attributes) {
    out_ += ' ';
    out_ += key;
    out_ += "=\"";
    out_ += escape(value);
    out_ += '"';
  }
}

void Writer::open(std::string_view name, const Attributes& attributes) {
  write_start(name, attributes);
  out_ += ">\n";
  stack_.emplace_back(name);
}

void Writer::leaf(std::string_view name, const Attributes& attributes) {
  write_start(name, attributes);
  out_ += "/>\n";
}

void Writer::close() {
  if (stack_.empty()) throw std::logic_error("xml::Writer::close without open element");
  out_.append((stack_.size() - 1) * 2, ' ');
  out_ += "</" + stack_.back() + ">\n";
  stack_.pop_back();
}

void Writer::comment(std::string_view text) {
  out_.append(stack_.size() * 2, ' ');
  out_ += "<!-- ";
  out_ += text;
  out_ += " -->\n";
}

std::string Writer::finish() {
  while (!stack_.empty()) close();
  return std::move(out_);
}

}  // namespace roadchat::xml
