#include "sparsest/config.hpp"

#include <charconv>
#include <istream>
#include <sstream>

#include "sparsest/errors.hpp"
#include "sparsest/io.hpp"

namespace sparsest {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename F>
void for_each_item(std::string_view text, F&& f) {
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find(',', start);
    const auto item = trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (item.empty()) throw FormatError("empty list item in '" + std::string(text) + "'");
    f(item);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError("config line " + std::to_string(lineno) + " is not key = value");
    }
    const auto key = trim(view.substr(0, eq));
    if (key.empty()) throw FormatError("config line " + std::to_string(lineno) + " has an empty key");
    cfg.entries_[std::string(key)] = std::string(trim(view.substr(eq + 1)));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse(in);
}

bool KeyValueConfig::contains(std::string_view key) const { return entries_.find(key) != entries_.end(); }

std::optional<std::string> KeyValueConfig::get(std::string_view key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  for_each_item(text, [&](std::string_view item) { out.push_back(parse_double(item)); });
  return out;
}

std::vector<std::int64_t> parse_integer_list(std::string_view text) {
  std::vector<std::int64_t> out;
  for_each_item(text, [&](std::string_view item) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec == std::errc{} && ptr == item.data() + item.size()) {
      out.push_back(v);
      return;
    }
    // Accept integral values written in scientific notation, e.g. 1e4.
    const double d = parse_double(item);
    if (d != static_cast<double>(static_cast<std::int64_t>(d))) {
      throw FormatError("expected an integer, got '" + std::string(item) + "'");
    }
    out.push_back(static_cast<std::int64_t>(d));
  });
  return out;
}

}  // namespace sparsest
