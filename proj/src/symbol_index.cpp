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

// Brace/signature scanning over comment- and literal-stripped source. This is
// not a C++ parser: templates calls, macros that expand to definitions and
// indirect calls are not understood.

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_set>

#include "crashsift/error.hpp"
#include "crashsift/toolbox.hpp"
#include "crashsift/util.hpp"

namespace fs = std::filesystem;

namespace crashsift {
namespace {

bool is_source_file(const fs::path& p) {
  static const std::set<std::string> kExt = {".c", ".h", ".cc", ".cpp", ".cxx", ".hpp",
                                             ".hh", ".hxx", ".inc", ".ipp", ".c++", ".h++"};
  return kExt.count(to_lower(p.extension().string())) > 0;
}

// Blanks comments, literal contents and preprocessor lines, keeping byte
// offsets and newlines intact so line numbers survive.
std::string strip_source(const std::string& src) {
  std::string out = src;
  std::size_t n = src.size();
  std::size_t i = 0;
  bool line_start = true;
  auto blank = [&](std::size_t from, std::size_t to) {
    for (std::size_t k = from; k < to && k < n; ++k) {
      if (out[k] != '\n') out[k] = ' ';
    }
  };
  while (i < n) {
    char c = src[i];
    if (line_start && c == '#') {
      std::size_t j = i;
      while (j < n && src[j] != '\n') {
        if (src[j] == '\\' && j + 1 < n && src[j + 1] == '\n') ++j;
        ++j;
      }
      blank(i, j);
      i = j;
      continue;
    }
    if (c == '\n') {
      line_start = true;
      ++i;
      continue;
    }
    if (!std::isspace(static_cast<unsigned char>(c))) line_start = false;
    if (c == '/' && i + 1 < n && src[i + 1] == '/') {
      std::size_t j = src.find('\n', i);
      if (j == std::string::npos) j = n;
      blank(i, j);
      i = j;
    } else if (c == '/' && i + 1 < n && src[i + 1] == '*') {
      std::size_t j = src.find("*/", i + 2);
      j = (j == std::string::npos) ? n : j + 2;
      blank(i, j);
      i = j;
    } else if (c == 'R' && i + 1 < n && src[i + 1] == '"' &&
               (i == 0 || !(std::isalnum(static_cast<unsigned char>(src[i - 1])) ||
                            src[i - 1] == '_'))) {
      std::size_t open = src.find('(', i + 2);
      if (open == std::string::npos) {
        ++i;
        continue;
      }
      std::string delim = ")" + src.substr(i + 2, open - i - 2) + "\"";
      std::size_t close = src.find(delim, open);
      std::size_t end = (close == std::string::npos) ? n : close + delim.size();
      blank(i + 2, end - 1);
      i = end;
    } else if (c == '"' || c == '\'') {
      std::size_t j = i + 1;
      while (j < n && src[j] != c && src[j] != '\n') {
        if (src[j] == '\\') ++j;
        ++j;
      }
      blank(i + 1, std::min(j, n));
      i = (j < n && src[j] == c) ? j + 1 : j;
    } else {
      ++i;
    }
  }
  return out;
}

enum class TokKind { Ident, Punct, Literal };

struct Token {
  TokKind kind;
  std::string text;
  std::size_t offset;
  int line;
};

std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> toks;
  int line = 1;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      // A literal prefix such as L"..." or u8'x' belongs to the literal.
      if (j < s.size() && (s[j] == '"' || s[j] == '\'') && j - i <= 2) {
        i = j;
        continue;
      }
      toks.push_back({TokKind::Ident, s.substr(i, j - i), i, line});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '.' ||
                              s[j] == '\'' || s[j] == '_')) {
        ++j;
      }
      toks.push_back({TokKind::Literal, s.substr(i, j - i), i, line});
      i = j;
    } else if (c == '"' || c == '\'') {
      std::size_t j = i + 1;
      while (j < s.size() && s[j] != c && s[j] != '\n') ++j;
      toks.push_back({TokKind::Literal, std::string(1, c), i, line});
      i = (j < s.size() && s[j] == c) ? j + 1 : j;
    } else if (c == ':' && i + 1 < s.size() && s[i + 1] == ':') {
      toks.push_back({TokKind::Punct, "::", i, line});
      i += 2;
    } else if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
      toks.push_back({TokKind::Punct, "->", i, line});
      i += 2;
    } else {
      toks.push_back({TokKind::Punct, std::string(1, c), i, line});
      ++i;
    }
  }
  return toks;
}

const std::unordered_set<std::string>& non_call_words() {
  static const std::unordered_set<std::string> kWords = {
      "if", "for", "while", "switch", "return", "sizeof", "catch", "alignof", "alignas",
      "decltype", "typeid", "static_assert", "noexcept", "throw", "new", "delete",
      "static_cast", "dynamic_cast", "const_cast", "reinterpret_cast", "__attribute__",
      "__declspec", "defined", "_Alignof", "_Alignas", "_Static_assert", "_Generic",
      "__typeof__", "typeof", "__asm__", "asm", "do", "else", "case", "goto", "operator",
      "requires", "co_await", "co_return", "co_yield", "explicit"};
  return kWords;
}

// Words after which `name(` is still a call rather than a declaration.
const std::unordered_set<std::string>& expression_lead_words() {
  static const std::unordered_set<std::string> kWords = {
      "return", "else", "case", "do", "throw", "co_return", "co_await", "co_yield",
      "and", "or", "not", "sizeof"};
  return kWords;
}

enum class ScopeKind { Namespace, Extern, Class, Function, Block };

struct Scope {
  ScopeKind kind;
  std::string name;        // namespace / class name
  std::string function;    // qualified name (Function scope)
  std::size_t entry = 0;   // index of the SymbolEntry being built
};

struct PendingDefinition {
  std::string name;
  SymbolEntry entry;
};

struct FileScan {
  std::vector<PendingDefinition> definitions;
  std::vector<PendingDefinition> declarations;
  std::vector<CallEdge> raw_calls;  // callee as written
};

std::string qualify(const std::vector<Scope>& stack, const std::string& name) {
  std::string prefix;
  for (const auto& s : stack) {
    if ((s.kind == ScopeKind::Namespace || s.kind == ScopeKind::Class) && !s.name.empty()) {
      prefix += s.name + "::";
    }
  }
  return prefix + name;
}

// Reads `a::b::~c` backwards from toks[last]; returns start index.
std::size_t qualified_start(const std::vector<Token>& toks, std::size_t first, std::size_t last) {
  std::size_t k = last;
  while (k > first) {
    if (toks[k - 1].text == "~") {
      --k;
      continue;
    }
    if (k >= first + 2 && toks[k - 1].text == "::" && toks[k - 2].kind == TokKind::Ident) {
      k -= 2;
      continue;
    }
    break;
  }
  return k;
}

std::string join_tokens(const std::vector<Token>& toks, std::size_t from, std::size_t to) {
  std::string s;
  for (std::size_t k = from; k <= to; ++k) s += toks[k].text;
  return s;
}

struct FunctionHead {
  std::string name;
  std::size_t name_start = 0;
  std::size_t close_paren = 0;
};

// Finds `name ( ... )` in toks[first, last) at paren depth 0, skipping
// attribute groups. Returns false for initializers and type definitions.
bool find_function_head(const std::vector<Token>& toks, std::size_t first, std::size_t last,
                        FunctionHead& head) {
  int depth = 0;
  int angle = 0;
  for (std::size_t k = first; k < last; ++k) {
    const auto& t = toks[k];
    if (t.text == "(") {
      if (depth == 0) {
        if (k == first || toks[k - 1].kind != TokKind::Ident) return false;
        const std::string& word = toks[k - 1].text;
        if (word == "__attribute__" || word == "__declspec" || word == "alignas" ||
            word == "_Alignas" || word == "decltype" || word == "__typeof__") {
          ++depth;
          continue;
        }
        if (non_call_words().count(word)) return false;
        std::size_t start = qualified_start(toks, first, k - 1);
        // Need a return type or qualifier before an unqualified name, except
        // for constructors/destructors written with a scope.
        bool scoped = start < k - 1;
        if (start == first && !scoped) return false;
        int d = 0;
        std::size_t j = k;
        for (; j < last; ++j) {
          if (toks[j].text == "(") ++d;
          if (toks[j].text == ")" && --d == 0) break;
        }
        if (j >= last) return false;
        head.name = join_tokens(toks, start, k - 1);
        head.name_start = start;
        head.close_paren = j;
        return true;
      }
      ++depth;
    } else if (t.text == ")") {
      --depth;
    } else if (t.text == "<") {
      ++angle;
    } else if (t.text == ">") {
      --angle;
    } else if (depth == 0 && angle <= 0 && (t.text == "=" || t.text == "[")) {
      return false;
    }
  }
  return false;
}

bool has_word(const std::vector<Token>& toks, std::size_t first, std::size_t last,
              std::string_view word) {
  for (std::size_t k = first; k < last; ++k) {
    if (toks[k].kind == TokKind::Ident && toks[k].text == word) return true;
  }
  return false;
}

std::string type_name_after(const std::vector<Token>& toks, std::size_t first, std::size_t last,
                            std::string_view keyword) {
  for (std::size_t k = first; k < last; ++k) {
    if (toks[k].text == keyword) {
      for (std::size_t j = k + 1; j < last; ++j) {
        if (toks[j].kind != TokKind::Ident) {
          if (toks[j].text == "[" || toks[j].text == "(") break;  // attributes
          continue;
        }
        if (toks[j].text == "final" || toks[j].text == "alignas") continue;
        return toks[j].text;
      }
    }
  }
  return {};
}

FileScan scan_file(const std::string& rel, const std::string& src) {
  FileScan scan;
  std::string stripped = strip_source(src);
  auto toks = tokenize(stripped);

  std::vector<Scope> stack;
  std::size_t stmt_start = 0;
  // One entry per open function body.
  std::vector<PendingDefinition> open_defs;

  auto in_function = [&]() {
    return std::any_of(stack.begin(), stack.end(),
                       [](const Scope& s) { return s.kind == ScopeKind::Function; });
  };
  auto current_function = [&]() -> const Scope* {
    for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
      if (it->kind == ScopeKind::Function) return &*it;
    }
    return nullptr;
  };
  auto signature_text = [&](std::size_t from, std::size_t to_offset) {
    return normalize_whitespace(
        std::string_view(stripped).substr(toks[from].offset, to_offset - toks[from].offset));
  };

  for (std::size_t i = 0; i < toks.size(); ++i) {
    const Token& t = toks[i];
    if (in_function()) {
      if (t.text == "{") {
        stack.push_back({ScopeKind::Block, {}, {}, 0});
      } else if (t.text == "}") {
        Scope top = stack.back();
        stack.pop_back();
        if (top.kind == ScopeKind::Function) {
          auto& def = open_defs[top.entry];
          def.entry.line_end = t.line;
          scan.definitions.push_back(def);
          stmt_start = i + 1;
        }
      } else if (t.kind == TokKind::Ident && i + 1 < toks.size() && toks[i + 1].text == "(" &&
                 !non_call_words().count(t.text)) {
        bool declaration = false;
        std::size_t start = qualified_start(toks, 0, i);
        if (start > 0) {
          const Token& prev = toks[start - 1];
          if (prev.kind == TokKind::Ident && !expression_lead_words().count(prev.text)) {
            declaration = true;
          }
        }
        if (!declaration) {
          const Scope* fn = current_function();
          std::string written = (start > 0 && (toks[start - 1].text == "." ||
                                               toks[start - 1].text == "->"))
                                    ? t.text
                                    : join_tokens(toks, start, i);
          if (!written.empty() && written.front() == '~') written.erase(0, 1);
          scan.raw_calls.push_back({fn->function, written, rel, t.line, false});
        }
      }
      continue;
    }

    if (t.text == ";") {
      FunctionHead head;
      if (stmt_start < i && find_function_head(toks, stmt_start, i, head) &&
          !has_word(toks, stmt_start, i, "typedef") && !has_word(toks, stmt_start, i, "using")) {
        PendingDefinition decl;
        decl.name = qualify(stack, head.name);
        decl.entry.file = rel;
        decl.entry.line_start = toks[stmt_start].line;
        decl.entry.line_end = t.line;
        decl.entry.signature = signature_text(stmt_start, t.offset);
        decl.entry.is_definition = false;
        scan.declarations.push_back(std::move(decl));
      }
      stmt_start = i + 1;
    } else if (t.text == "}") {
      if (!stack.empty()) stack.pop_back();
      stmt_start = i + 1;
    } else if (t.text == ":" && i == stmt_start + 1 &&
               (toks[stmt_start].text == "public" || toks[stmt_start].text == "private" ||
                toks[stmt_start].text == "protected")) {
      stmt_start = i + 1;
    } else if (t.text == "{") {
      FunctionHead head;
      if (has_word(toks, stmt_start, i, "namespace")) {
        std::string name;
        for (std::size_t k = stmt_start; k < i; ++k) {
          if (toks[k].kind == TokKind::Ident && toks[k].text != "namespace" &&
              toks[k].text != "inline") {
            name += toks[k].text;
          } else if (toks[k].text == "::") {
            name += "::";
          }
        }
        stack.push_back({ScopeKind::Namespace, name, {}, 0});
      } else if (stmt_start < i && toks[stmt_start].text == "extern" && i == stmt_start + 2 &&
                 toks[stmt_start + 1].kind == TokKind::Literal) {
        stack.push_back({ScopeKind::Extern, {}, {}, 0});
      } else if (find_function_head(toks, stmt_start, i, head)) {
        PendingDefinition def;
        def.name = qualify(stack, head.name);
        def.entry.file = rel;
        def.entry.line_start = toks[stmt_start].line;
        def.entry.signature = signature_text(stmt_start, t.offset);
        def.entry.is_definition = true;
        open_defs.push_back(def);
        stack.push_back({ScopeKind::Function, {}, def.name, open_defs.size() - 1});
      } else if (has_word(toks, stmt_start, i, "class") || has_word(toks, stmt_start, i, "struct") ||
                 has_word(toks, stmt_start, i, "union")) {
        std::string name = type_name_after(toks, stmt_start, i, "class");
        if (name.empty()) name = type_name_after(toks, stmt_start, i, "struct");
        if (name.empty()) name = type_name_after(toks, stmt_start, i, "union");
        if (has_word(toks, stmt_start, i, "enum")) {
          stack.push_back({ScopeKind::Block, {}, {}, 0});
        } else {
          stack.push_back({ScopeKind::Class, name, {}, 0});
        }
      } else {
        // enum bodies, aggregate initializers: skip to the matching brace.
        int depth = 1;
        std::size_t j = i + 1;
        for (; j < toks.size() && depth > 0; ++j) {
          if (toks[j].text == "{") ++depth;
          if (toks[j].text == "}") --depth;
        }
        i = j - 1;
        continue;
      }
      stmt_start = i + 1;
    }
  }
  return scan;
}

}  // namespace

std::string_view base_name(std::string_view qualified) {
  auto pos = qualified.rfind("::");
  return pos == std::string_view::npos ? qualified : qualified.substr(pos + 2);
}

std::size_t SymbolIndex::definition_count() const {
  std::size_t n = 0;
  for (const auto& [name, list] : entries) {
    n += static_cast<std::size_t>(
        std::count_if(list.begin(), list.end(), [](const SymbolEntry& e) { return e.is_definition; }));
  }
  return n;
}

SymbolIndex build_symbol_index(const ProjectCheckout& checkout) {
  std::vector<std::string> files;
  const fs::path root = checkout.root();
  for (auto it = fs::recursive_directory_iterator(root, fs::directory_options::skip_permission_denied);
       it != fs::recursive_directory_iterator(); ++it) {
    const auto& p = it->path();
    if (it->is_directory() && !p.filename().empty() && p.filename().string().front() == '.') {
      it.disable_recursion_pending();
      continue;
    }
    if (it->is_symlink()) {
      std::error_code ec;
      auto target = fs::canonical(p, ec);
      if (ec || !is_within(root, target)) continue;
    }
    if (it->is_regular_file() && is_source_file(p)) {
      files.push_back(fs::relative(p, root).generic_string());
    }
  }
  if (files.empty()) {
    throw Error(ErrorKind::EmptyProject, "no C/C++ source files under " + root.string());
  }
  std::sort(files.begin(), files.end());

  SymbolIndex index;
  std::vector<CallEdge> raw_calls;
  for (const auto& rel : files) {
    auto scan = scan_file(rel, read_file(root / rel));
    for (auto& d : scan.definitions) index.entries[d.name].push_back(std::move(d.entry));
    for (auto& d : scan.declarations) index.entries[d.name].push_back(std::move(d.entry));
    raw_calls.insert(raw_calls.end(), scan.raw_calls.begin(), scan.raw_calls.end());
  }
  for (auto& [name, list] : index.entries) {
    std::stable_sort(list.begin(), list.end(), [](const SymbolEntry& a, const SymbolEntry& b) {
      return std::tie(a.file, a.line_start, b.is_definition) <
             std::tie(b.file, b.line_start, a.is_definition);
    });
  }

  // base name -> qualified names that have a definition
  std::map<std::string, std::set<std::string>, std::less<>> by_base;
  for (const auto& [name, list] : index.entries) {
    for (const auto& e : list) {
      if (e.is_definition) by_base[std::string(base_name(name))].insert(name);
    }
  }
  for (auto& call : raw_calls) {
    auto exact = index.entries.find(call.callee);
    bool exact_def = exact != index.entries.end() &&
                     std::any_of(exact->second.begin(), exact->second.end(),
                                 [](const SymbolEntry& e) { return e.is_definition; });
    if (exact_def) {
      call.external = false;
    } else {
      auto it = by_base.find(base_name(call.callee));
      if (it == by_base.end()) {
        call.external = true;
      } else {
        call.external = false;
        if (it->second.size() == 1) call.callee = *it->second.begin();
      }
    }
  }
  std::sort(raw_calls.begin(), raw_calls.end(), [](const CallEdge& a, const CallEdge& b) {
    return std::tie(a.file, a.line, a.caller, a.callee) < std::tie(b.file, b.line, b.caller, b.callee);
  });
  index.call_edges = std::move(raw_calls);
  return index;
}

std::vector<FunctionSource> function_search(const SymbolIndex& index, const ProjectCheckout& checkout,
                                            std::string_view function_name) {
  std::vector<FunctionSource> out;
  std::string_view wanted = trim(function_name);
  bool qualified = wanted.find("::") != std::string_view::npos;
  std::map<std::string, std::vector<std::string>> file_lines;
  for (const auto& [name, list] : index.entries) {
    bool match = qualified ? name == wanted : base_name(name) == wanted;
    if (!match) continue;
    for (const auto& e : list) {
      if (!e.is_definition) continue;
      auto& lines = file_lines[e.file];
      if (lines.empty()) {
        std::string content = read_file(checkout.resolve(e.file));
        std::size_t pos = 0;
        while (pos <= content.size()) {
          auto nl = content.find('\n', pos);
          if (nl == std::string::npos) {
            lines.push_back(content.substr(pos));
            break;
          }
          lines.push_back(content.substr(pos, nl - pos));
          pos = nl + 1;
        }
      }
      FunctionSource fs_out;
      fs_out.name = name;
      fs_out.signature = e.signature;
      fs_out.file = e.file;
      fs_out.line_start = e.line_start;
      for (int l = e.line_start; l <= e.line_end && l <= static_cast<int>(lines.size()); ++l) {
        fs_out.source_text += lines[static_cast<std::size_t>(l - 1)];
        fs_out.source_text += '\n';
      }
      out.push_back(std::move(fs_out));
    }
  }
  if (out.empty()) {
    throw Error(ErrorKind::NotFound, "no definition for '" + std::string(wanted) + "'");
  }
  std::sort(out.begin(), out.end(), [](const FunctionSource& a, const FunctionSource& b) {
    return std::tie(a.file, a.line_start) < std::tie(b.file, b.line_start);
  });
  return out;
}

std::vector<CallerSite> find_callers(const SymbolIndex& index, std::string_view function_name) {
  std::string_view wanted = base_name(trim(function_name));
  std::vector<CallerSite> out;
  for (const auto& e : index.call_edges) {
    if (base_name(e.callee) == wanted) out.push_back({e.caller, e.file, e.line});
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool is_test_location(std::string_view file) {
  fs::path p(file);
  for (auto it = p.begin(); it != p.end(); ++it) {
    if (std::next(it) == p.end()) break;  // the file name itself
    auto part = to_lower(it->string());
    if (part == "test" || part == "tests" || part == "fuzz") return true;
  }
  return false;
}

bool is_test_name(std::string_view qualified_name) {
  std::string_view b = base_name(qualified_name);
  auto starts = [&](std::string_view p) { return b.substr(0, p.size()) == p; };
  auto ends = [&](std::string_view s) {
    return b.size() >= s.size() && b.substr(b.size() - s.size()) == s;
  };
  return starts("test_") || ends("_test") || starts("Test");
}

std::vector<std::string> entry_points(const SymbolIndex& index) {
  std::set<std::string, std::less<>> called;
  for (const auto& e : index.call_edges) {
    if (base_name(e.caller) == base_name(e.callee)) continue;  // self recursion
    // Test and fuzz harnesses calling into the project do not make it non-root.
    if (is_test_location(e.file) || is_test_name(e.caller)) continue;
    called.insert(std::string(base_name(e.callee)));
  }
  std::vector<std::string> out;
  for (const auto& [name, list] : index.entries) {
    bool has_def = false;
    bool all_test = true;
    for (const auto& e : list) {
      if (!e.is_definition) continue;
      has_def = true;
      if (!is_test_location(e.file)) all_test = false;
    }
    if (!has_def || all_test || is_test_name(name)) continue;
    if (called.count(base_name(name))) continue;
    out.push_back(name);
  }
  return out;
}

nlohmann::ordered_json to_json(const SymbolIndex& index) {
  nlohmann::ordered_json functions = nlohmann::ordered_json::array();
  for (const auto& [name, list] : index.entries) {
    for (const auto& e : list) {
      nlohmann::ordered_json f;
      f["name"] = name;
      f["file"] = e.file;
      f["line_start"] = e.line_start;
      f["line_end"] = e.line_end;
      f["signature"] = e.signature;
      f["is_definition"] = e.is_definition;
      functions.push_back(std::move(f));
    }
  }
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (const auto& e : index.call_edges) {
    nlohmann::ordered_json c;
    c["caller"] = e.caller;
    c["callee"] = e.callee;
    c["file"] = e.file;
    c["line"] = e.line;
    c["external"] = e.external;
    edges.push_back(std::move(c));
  }
  nlohmann::ordered_json j;
  j["functions"] = std::move(functions);
  j["call_edges"] = std::move(edges);
  return j;
}

SymbolIndex symbol_index_from_json(const nlohmann::ordered_json& j) {
  SymbolIndex index;
  try {
    for (const auto& f : j.at("functions")) {
      SymbolEntry e;
      e.file = f.at("file").get<std::string>();
      e.line_start = f.at("line_start").get<int>();
      e.line_end = f.at("line_end").get<int>();
      e.signature = f.at("signature").get<std::string>();
      e.is_definition = f.at("is_definition").get<bool>();
      index.entries[f.at("name").get<std::string>()].push_back(std::move(e));
    }
    for (const auto& c : j.at("call_edges")) {
      CallEdge e;
      e.caller = c.at("caller").get<std::string>();
      e.callee = c.at("callee").get<std::string>();
      e.file = c.at("file").get<std::string>();
      e.line = c.at("line").get<int>();
      e.external = c.value("external", false);
      index.call_edges.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::ParseError, std::string("index.json: ") + ex.what());
  }
  return index;
}

void save_index(const SymbolIndex& index, const fs::path& path) {
  write_file_atomic(path, to_json(index).dump(2) + "\n");
}

SymbolIndex load_index(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) {
    throw Error(ErrorKind::NotFound, "no symbol index at " + path.string());
  }
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + ex.what());
  }
  return symbol_index_from_json(j);
}

}  // namespace crashsift
