// Copyright 2026 The jepatok Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "jepatok/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "jepatok/error.hpp"

namespace jepatok {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad(std::size_t line, const std::string& what) {
  raise(ErrorCode::kConfig, "config line " + std::to_string(line) + ": " + what);
}

double parse_number(std::string_view s, std::size_t line) {
  s = trim(s);
  double value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    bad(line, "expected a number, got '" + std::string(s) + "'");
  return value;
}

std::int64_t parse_integer(std::string_view s, std::size_t line) {
  const double v = parse_number(s, line);
  if (v != std::floor(v) || std::abs(v) > 9.0e15)
    bad(line, "expected an integer, got '" + std::string(trim(s)) + "'");
  return static_cast<std::int64_t>(v);
}

std::vector<double> parse_array(std::string_view s, std::size_t line) {
  s = trim(s);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']')
    bad(line, "expected an array like [1, 2, 3]");
  s = trim(s.substr(1, s.size() - 2));
  std::vector<double> out;
  while (!s.empty()) {
    const auto comma = s.find(',');
    out.push_back(parse_number(s.substr(0, comma), line));
    if (comma == std::string_view::npos) break;
    s = s.substr(comma + 1);
  }
  return out;
}

struct Entry {
  std::string value;
  std::size_t line;
};

}  // namespace

CodecConfig parse_config(std::string_view text) {
  std::map<std::string, Entry> entries;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) bad(line_no, "expected 'key = value'");
    std::string key(trim(line.substr(0, eq)));
    if (key.size() > 2 && key.ends_with("[]")) key.resize(key.size() - 2);
    if (key.empty()) bad(line_no, "missing key");
    if (entries.count(key)) bad(line_no, "duplicate key '" + key + "'");
    entries[key] = Entry{std::string(trim(line.substr(eq + 1))), line_no};
  }

  CodecConfig cfg;
  auto take = [&](const std::string& key) -> std::optional<Entry> {
    const auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    Entry e = it->second;
    entries.erase(it);
    return e;
  };

  if (auto e = take("sample_rate")) cfg.sample_rate = parse_number(e->value, e->line);
  if (auto e = take("hop")) cfg.hop = parse_integer(e->value, e->line);
  if (auto e = take("group_size")) {
    const auto g = parse_integer(e->value, e->line);
    if (g < 1) bad(e->line, "group_size must be >= 1");
    cfg.group_size = static_cast<std::size_t>(g);
  }
  if (auto e = take("lambda_stft")) cfg.weights.stft = parse_number(e->value, e->line);
  if (auto e = take("lambda_gan")) cfg.weights.gan = parse_number(e->value, e->line);
  if (auto e = take("fsq.temperature")) cfg.fsq_temperature = parse_number(e->value, e->line);

  std::optional<std::int64_t> code_dim;
  if (auto e = take("code_dim")) {
    code_dim = parse_integer(e->value, e->line);
    if (*code_dim < 1) bad(e->line, "code_dim must be >= 1");
  }
  std::vector<std::int32_t> levels;
  if (auto e = take("levels")) {
    for (double v : parse_array(e->value, e->line)) {
      if (v != std::floor(v) || v < 1 || v > 65535)
        bad(e->line, "levels must be integers in [1, 65535]");
      levels.push_back(static_cast<std::int32_t>(v));
    }
    if (levels.empty()) bad(e->line, "levels must not be empty");
    if (code_dim && levels.size() == 1)
      levels.assign(static_cast<std::size_t>(*code_dim), levels.front());
    if (code_dim && levels.size() != static_cast<std::size_t>(*code_dim))
      bad(e->line, "levels has " + std::to_string(levels.size()) +
                       " entries but code_dim is " + std::to_string(*code_dim));
    cfg.levels.levels = std::move(levels);
  } else if (code_dim) {
    cfg.levels = FsqLevels::uniform(static_cast<std::size_t>(*code_dim), 4);
  }

  std::optional<Entry> k_entry = take("daam.k");
  std::optional<Entry> delta_entry = take("daam.delta");
  std::optional<Entry> nu_entry = take("daam.nu");
  Eigen::Index k = 4;
  if (k_entry) {
    k = parse_integer(k_entry->value, k_entry->line);
    if (k < 1) bad(k_entry->line, "daam.k must be >= 1");
  }
  cfg.daam = DaamParams<double>::defaults(k);
  auto load_vector = [&](const std::optional<Entry>& e, SignalD& dst, const char* name) {
    if (!e) return;
    const auto values = parse_array(e->value, e->line);
    if (static_cast<Eigen::Index>(values.size()) != k)
      bad(e->line, std::string(name) + " has " + std::to_string(values.size()) +
                       " entries, daam.k is " + std::to_string(k));
    dst = Eigen::Map<const SignalD>(values.data(), k);
  };
  load_vector(delta_entry, cfg.daam.delta, "daam.delta");
  load_vector(nu_entry, cfg.daam.nu, "daam.nu");
  if (auto e = take("daam.alpha")) cfg.daam.alpha = parse_number(e->value, e->line);

  if (auto e = take("mask.ratio")) cfg.mask.mask_ratio = parse_number(e->value, e->line);
  if (auto e = take("mask.span_min")) cfg.mask.span_min = parse_integer(e->value, e->line);
  if (auto e = take("mask.span_max")) {
    cfg.mask.span_max = e->value == "auto" ? 0 : parse_integer(e->value, e->line);
    if (e->value != "auto" && cfg.mask.span_max < 1)
      bad(e->line, "mask.span_max must be >= 1 or 'auto'");
  }
  if (auto e = take("mask.seed")) cfg.mask.seed = static_cast<std::uint64_t>(parse_integer(e->value, e->line));

  if (!entries.empty()) {
    const auto& [key, e] = *entries.begin();
    bad(e.line, "unknown key '" + key + "'");
  }

  require(cfg.sample_rate >= 1, ErrorCode::kConfig, "config: sample_rate must be >= 1");
  require(cfg.hop >= 1, ErrorCode::kConfig, "config: hop must be >= 1");
  cfg.levels.validate();
  cfg.daam.validate();
  require(cfg.mask.mask_ratio >= 0 && cfg.mask.mask_ratio <= 1, ErrorCode::kConfig,
          "config: mask.ratio must lie in [0, 1]");
  require(cfg.mask.span_min >= 1, ErrorCode::kConfig, "config: mask.span_min must be >= 1");
  require(cfg.mask.span_max <= 0 || cfg.mask.span_max >= cfg.mask.span_min,
          ErrorCode::kConfig, "config: mask.span_max must be >= mask.span_min");
  return cfg;
}

CodecConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::kConfig, "cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace jepatok
