// Copyright 2026 The crashsift Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "crashsift/tags.hpp"

#include <cctype>

#include "crashsift/error.hpp"

namespace crashsift {
namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

// At text[pos] == '<': reads `<name` and reports where the name ends.
std::size_t read_name(std::string_view text, std::size_t pos, std::string& name) {
  std::size_t i = pos + 1;
  if (i >= text.size() || !ident_start(text[i])) return std::string_view::npos;
  std::size_t start = i;
  while (i < text.size() && ident_char(text[i])) ++i;
  name.assign(text.substr(start, i - start));
  return i;
}

bool opens(std::string_view text, std::size_t pos, std::string_view name) {
  if (text.compare(pos, name.size() + 1, std::string("<") + std::string(name)) != 0) return false;
  std::size_t after = pos + name.size() + 1;
  return after < text.size() &&
         (text[after] == '>' || std::isspace(static_cast<unsigned char>(text[after])));
}

// Position of the '<' of the closer matching an opener whose '>' ends at
// body_start, or npos.
std::size_t matching_close(std::string_view text, std::size_t body_start, std::string_view name,
                           bool count_attributed) {
  const std::string closer = "</" + std::string(name) + ">";
  const std::string bare = "<" + std::string(name) + ">";
  int depth = 1;
  std::size_t i = body_start;
  while (i < text.size()) {
    std::size_t lt = text.find('<', i);
    if (lt == std::string_view::npos) return std::string_view::npos;
    if (text.compare(lt, closer.size(), closer) == 0) {
      if (--depth == 0) return lt;
      i = lt + closer.size();
    } else if (count_attributed ? opens(text, lt, name)
                                : text.compare(lt, bare.size(), bare) == 0) {
      ++depth;
      i = lt + 1;
    } else {
      i = lt + 1;
    }
  }
  return std::string_view::npos;
}

std::map<std::string, std::string> parse_attributes(std::string_view s) {
  std::map<std::string, std::string> attrs;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t k = i;
    while (k < s.size() && ident_char(s[k])) ++k;
    if (k == i) break;
    std::string key(s.substr(i, k - i));
    i = k;
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= s.size() || s[i] != '=') {
      attrs[key] = "";
      continue;
    }
    ++i;
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i < s.size() && (s[i] == '"' || s[i] == '\'')) {
      char q = s[i];
      std::size_t e = s.find(q, i + 1);
      if (e == std::string_view::npos) e = s.size();
      attrs[key] = std::string(s.substr(i + 1, e - i - 1));
      i = e + 1;
    } else {
      std::size_t e = i;
      while (e < s.size() && !std::isspace(static_cast<unsigned char>(s[e]))) ++e;
      attrs[key] = std::string(s.substr(i, e - i));
      i = e;
    }
  }
  return attrs;
}

}  // namespace

std::vector<TagElement> find_elements(std::string_view text, std::string_view name) {
  std::vector<TagElement> out;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t lt = text.find('<', i);
    if (lt == std::string_view::npos) break;
    if (!opens(text, lt, name)) {
      i = lt + 1;
      continue;
    }
    std::size_t gt = text.find('>', lt);
    if (gt == std::string_view::npos) {
      throw Error(ErrorKind::UnbalancedTags, "unterminated <" + std::string(name) + " tag");
    }
    std::size_t close = matching_close(text, gt + 1, name, true);
    if (close == std::string_view::npos) {
      throw Error(ErrorKind::UnbalancedTags, "unclosed <" + std::string(name) + ">");
    }
    TagElement el;
    el.name = std::string(name);
    el.attributes = parse_attributes(text.substr(lt + 1 + name.size(), gt - lt - 1 - name.size()));
    el.body = std::string(text.substr(gt + 1, close - gt - 1));
    el.begin = lt;
    el.end = close + name.size() + 3;
    i = el.end;
    out.push_back(std::move(el));
  }
  return out;
}

std::optional<std::string> first_body(std::string_view text, std::string_view name) {
  auto els = find_elements(text, name);
  if (els.empty()) return std::nullopt;
  return els.front().body;
}

std::optional<std::string> output_section(std::string_view text, std::string_view name) {
  try {
    return first_body(text, name);
  } catch (const Error& e) {
    throw Error(ErrorKind::MalformedOutput, e.what());
  }
}

std::vector<std::pair<std::string, std::string>> top_level_sections(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::map<std::string, int> attributed_open;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t lt = text.find('<', i);
    if (lt == std::string_view::npos) break;
    std::string name;
    if (lt + 1 < text.size() && text[lt + 1] == '/') {
      std::size_t end = read_name(text, lt + 1, name);
      if (end != std::string_view::npos && end < text.size() && text[end] == '>') {
        auto it = attributed_open.find(name);
        if (it == attributed_open.end() || it->second == 0) {
          throw Error(ErrorKind::UnbalancedTags, "stray </" + name + ">");
        }
        --it->second;
        i = end + 1;
        continue;
      }
      i = lt + 1;
      continue;
    }
    std::size_t end = read_name(text, lt, name);
    if (end == std::string_view::npos || end >= text.size()) {
      i = lt + 1;
      continue;
    }
    if (text[end] == '>') {
      std::size_t close = matching_close(text, end + 1, name, false);
      if (close == std::string_view::npos) {
        throw Error(ErrorKind::UnbalancedTags, "unclosed <" + name + ">");
      }
      out.emplace_back(name, std::string(text.substr(end + 1, close - end - 1)));
      i = close + name.size() + 3;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(text[end]))) {
      std::size_t gt = text.find('>', end);
      if (gt != std::string_view::npos && text.substr(end, gt - end).find('<') == std::string_view::npos) {
        ++attributed_open[name];
        i = gt + 1;
        continue;
      }
    }
    i = lt + 1;
  }
  return out;
}

}  // namespace crashsift
