// Copyright 2026 The segcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "segcert/cli.hpp"
#include "segcert/errors.hpp"

namespace segcert::cli {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) {
    throw ConfigError("config key '" + key + "': cannot parse '" + text + "' as a number");
  }
  return value;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  if (trim(text).empty()) return items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(trim(item));
  return items;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

KeyValueConfig KeyValueConfig::parse(std::string_view text, const std::string& origin) {
  KeyValueConfig config;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find_first_of("#;");
    std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const std::string where = origin + ":" + std::to_string(number);
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = trim(body.substr(1, body.size() - 2));
      if (!valid_name(section)) throw ConfigError(where + ": bad section name '" + section + "'");
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string name = trim(body.substr(0, eq));
    if (!valid_name(name)) throw ConfigError(where + ": bad key '" + name + "'");
    const std::string key = section.empty() ? name : section + "." + name;
    if (config.values_.count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    config.values_[key] = trim(body.substr(eq + 1));
  }
  return config;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  return parse(data::read_file(path), path.string());
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  if (!valid_name(key)) throw ConfigError("bad config key '" + key + "'");
  values_[key] = trim(value);
}

std::optional<std::string> KeyValueConfig::lookup(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

void KeyValueConfig::record(const std::string& key, const std::string& value) const { used_[key] = value; }

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  const std::string v = lookup(key).value_or(fallback);
  record(key, v);
  return v;
}

std::string KeyValueConfig::require_string(const std::string& key) const {
  const auto v = lookup(key);
  if (!v || v->empty()) throw ConfigError("missing required config key '" + key + "'");
  record(key, *v);
  return *v;
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  const auto v = lookup(key);
  const int value = v ? parse_number<int>(key, *v) : fallback;
  record(key, std::to_string(value));
  return value;
}

int KeyValueConfig::require_int(const std::string& key) const {
  const int value = parse_number<int>(key, require_string(key));
  record(key, std::to_string(value));
  return value;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto v = lookup(key);
  const double value = v ? parse_number<double>(key, *v) : fallback;
  record(key, format_double(value));
  return value;
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto v = lookup(key);
  const std::uint64_t value = v ? parse_number<std::uint64_t>(key, *v) : fallback;
  record(key, std::to_string(value));
  return value;
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key,
                                                const std::vector<double>& fallback) const {
  const auto v = lookup(key);
  std::vector<double> values = fallback;
  if (v) {
    values.clear();
    for (const auto& item : split_list(*v)) values.push_back(parse_number<double>(key, item));
  }
  std::string text;
  for (std::size_t i = 0; i < values.size(); ++i) text += (i ? ", " : "") + format_double(values[i]);
  record(key, text);
  return values;
}

std::vector<std::string> KeyValueConfig::get_strings(const std::string& key,
                                                     const std::vector<std::string>& fallback) const {
  const auto v = lookup(key);
  const std::vector<std::string> values = v ? split_list(*v) : fallback;
  std::string text;
  for (std::size_t i = 0; i < values.size(); ++i) text += (i ? ", " : "") + values[i];
  record(key, text);
  return values;
}

std::string KeyValueConfig::echo() const {
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
  for (const auto& [key, value] : used_) {
    const auto dot = key.find('.');
    if (dot == std::string::npos) {
      sections[""].emplace_back(key, value);
    } else {
      sections[key.substr(0, dot)].emplace_back(key.substr(dot + 1), value);
    }
  }
  std::string out;
  for (const auto& [section, entries] : sections) {
    if (!section.empty()) out += (out.empty() ? "" : "\n") + ("[" + section + "]\n");
    for (const auto& [k, v] : entries) out += k + " = " + v + "\n";
  }
  return out;
}

}  // namespace segcert::cli
