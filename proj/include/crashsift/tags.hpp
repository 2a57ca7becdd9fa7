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

// Lightweight scanning of XML-ish tagged sections in model output and
// prompts. This is deliberately not an XML parser: bodies are raw text and
// only same-name nesting is tracked.

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crashsift {

struct TagElement {
  std::string name;
  std::map<std::string, std::string> attributes;
  std::string body;
  std::size_t begin = 0;  // offset of '<'
  std::size_t end = 0;    // one past the closing '>'
};

// All non-overlapping <name ...>body</name> elements, outermost first.
// Throws UnbalancedTags when an opening tag has no matching close.
std::vector<TagElement> find_elements(std::string_view text, std::string_view name);

// Body of the first <name> element, if present.
std::optional<std::string> first_body(std::string_view text, std::string_view name);

// first_body for model output: unbalanced markup is reported as
// MalformedOutput instead of UnbalancedTags.
std::optional<std::string> output_section(std::string_view text, std::string_view name);

// Every top-level attribute-less <tag>...</tag> pair in order. Nested
// markup stays verbatim inside its parent. Throws UnbalancedTags for an
// opener without its closer or a stray closer at top level.
std::vector<std::pair<std::string, std::string>> top_level_sections(std::string_view text);

}  // namespace crashsift
