#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ecta/annotate.hpp"
#include "ecta/error.hpp"

namespace ecta::prompts {

enum class Role { System, User, Assistant };

inline std::string_view to_string(Role r) {
  switch (r) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "?";
}

inline std::optional<Role> parse_role(std::string_view s) {
  if (s == "system") return Role::System;
  if (s == "user") return Role::User;
  if (s == "assistant") return Role::Assistant;
  return std::nullopt;
}

struct ChatTurn {
  Role role = Role::User;
  std::string content;

  bool operator==(const ChatTurn&) const = default;
};

// A dialogue-style template loaded from an asset file. Section content keeps
// its rule-block markers and {{slot}} references verbatim; both are resolved
// at render time. Rule ids seen at load survive ablation so that dropping the
// same set twice is a no-op rather than an error.
struct PromptTemplate {
  std::string name;
  std::vector<std::pair<Role, std::string>> turns;  // (role, content with slots)
  std::vector<std::string> slots;                   // declared slot names
  std::set<int> rule_ids;

  bool operator==(const PromptTemplate&) const = default;
};

namespace detail {

inline bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

inline std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == '\n') {
      std::string line(s.substr(start, i - start));
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(std::move(line));
      start = i + 1;
    }
  }
  if (!lines.empty() && lines.back().empty() && !s.empty() && s.back() == '\n') lines.pop_back();
  return lines;
}

// Matches "#rule <id>" marker lines.
inline std::optional<int> rule_open_id(std::string_view line) {
  const std::string t = CategorySet::trim(line);
  if (t.rfind("#rule ", 0) != 0) return std::nullopt;
  const std::string num = CategorySet::trim(t.substr(6));
  if (num.empty()) return std::nullopt;
  for (char c : num)
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
  return std::stoi(num);
}

inline bool is_rule_close(std::string_view line) {
  return CategorySet::trim(line) == "#endrule";
}

// Walks the slot references in a content string; calls `on_slot` for each
// {{name}} and `on_literal` for everything else ("{{{{" is a literal "{{").
template <typename FSlot, typename FLit>
void scan_slots(std::string_view content, FSlot&& on_slot, FLit&& on_literal) {
  std::size_t pos = 0;
  while (pos < content.size()) {
    const std::size_t open = content.find("{{", pos);
    if (open == std::string_view::npos) {
      on_literal(content.substr(pos));
      return;
    }
    on_literal(content.substr(pos, open - pos));
    if (content.compare(open, 4, "{{{{") == 0) {
      on_literal("{{");
      pos = open + 4;
      continue;
    }
    const std::size_t close = content.find("}}", open + 2);
    if (close == std::string_view::npos)
      throw Error(errc::bad_config, "unterminated slot reference near \"" +
                                        std::string(content.substr(open, 20)) + "\"");
    const std::string name(content.substr(open + 2, close - open - 2));
    if (!is_identifier(name))
      throw Error(errc::bad_config, "invalid slot name \"" + name + "\"");
    on_slot(name);
    pos = close + 2;
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Template asset format:
//   slots: name1, name2
//   ---role: system
//   <content, may contain {{slot}} refs and #rule N / #endrule blocks>
//   ---role: user
//   ...
// ---------------------------------------------------------------------------

inline PromptTemplate parse_template(std::string_view text, std::string name) {
  PromptTemplate tpl;
  tpl.name = std::move(name);

  const std::vector<std::string> lines = detail::split_lines(text);
  std::size_t i = 0;
  while (i < lines.size() && CategorySet::trim(lines[i]).empty()) ++i;
  if (i == lines.size() || lines[i].rfind("slots:", 0) != 0)
    throw Error(errc::bad_config, "template must start with a \"slots:\" header line");
  {
    std::stringstream ss(lines[i].substr(6));
    std::string slot;
    while (std::getline(ss, slot, ',')) {
      const std::string t = CategorySet::trim(slot);
      if (t.empty()) continue;
      if (!detail::is_identifier(t))
        throw Error(errc::bad_config, "invalid slot name \"" + t + "\" in header");
      tpl.slots.push_back(t);
    }
  }
  ++i;

  std::optional<Role> current_role;
  std::vector<std::string> current;
  auto flush = [&]() {
    if (!current_role) return;
    std::string content;
    for (std::size_t k = 0; k < current.size(); ++k) {
      if (k) content += '\n';
      content += current[k];
    }
    tpl.turns.emplace_back(*current_role, std::move(content));
    current.clear();
  };
  for (; i < lines.size(); ++i) {
    if (lines[i].rfind("---role:", 0) == 0) {
      flush();
      const std::string role_name = CategorySet::trim(lines[i].substr(8));
      const auto role = parse_role(role_name);
      if (!role) throw Error(errc::bad_config, "unknown role \"" + role_name + "\"");
      current_role = role;
    } else if (current_role) {
      current.push_back(lines[i]);
    } else if (!CategorySet::trim(lines[i]).empty()) {
      throw Error(errc::bad_config, "content before the first ---role: section");
    }
  }
  flush();
  if (tpl.turns.empty()) throw Error(errc::bad_config, "template has no ---role: sections");

  // Validate slot references and collect rule blocks.
  std::set<std::string> declared(tpl.slots.begin(), tpl.slots.end());
  for (const auto& [role, content] : tpl.turns) {
    detail::scan_slots(
        content,
        [&](const std::string& slot) {
          if (!declared.count(slot))
            throw Error(errc::missing_slot, "slot \"" + slot + "\" is referenced but not declared");
        },
        [](std::string_view) {});
    int open_id = -1;
    for (const std::string& line : detail::split_lines(content)) {
      if (auto id = detail::rule_open_id(line)) {
        if (open_id != -1) throw Error(errc::bad_config, "nested #rule block");
        if (tpl.rule_ids.count(*id))
          throw Error(errc::bad_config, "duplicate #rule id " + std::to_string(*id));
        open_id = *id;
        tpl.rule_ids.insert(*id);
      } else if (detail::is_rule_close(line)) {
        if (open_id == -1) throw Error(errc::bad_config, "#endrule without #rule");
        open_id = -1;
      }
    }
    if (open_id != -1) throw Error(errc::bad_config, "unterminated #rule block");
  }
  return tpl;
}

inline PromptTemplate load_template_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::io_error, "cannot open template file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string name = path;
  if (const auto slash = name.find_last_of("/\\"); slash != std::string::npos)
    name = name.substr(slash + 1);
  if (const auto dot = name.find_last_of('.'); dot != std::string::npos) name = name.substr(0, dot);
  return parse_template(ss.str(), name);
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

inline std::vector<ChatTurn> render(const PromptTemplate& tpl,
                                    const std::map<std::string, std::string>& values) {
  std::vector<ChatTurn> turns;
  for (const auto& [role, raw] : tpl.turns) {
    // Drop rule marker lines, keep block content.
    std::string body;
    bool first = true;
    for (const std::string& line : detail::split_lines(raw)) {
      if (detail::rule_open_id(line) || detail::is_rule_close(line)) continue;
      if (!first) body += '\n';
      body += line;
      first = false;
    }
    std::string content;
    detail::scan_slots(
        body,
        [&](const std::string& slot) {
          const auto it = values.find(slot);
          if (it == values.end())
            throw Error(errc::missing_slot, "no value provided for slot \"" + slot + "\"");
          content += it->second;
        },
        [&](std::string_view lit) { content += lit; });
    if (content.empty())
      throw Error(errc::invariant_violation,
                  "turn rendered empty in template \"" + tpl.name + "\"");
    turns.push_back({role, std::move(content)});
  }
  return turns;
}

inline std::vector<ChatTurn> render_extraction_instruction(const PromptTemplate& tpl,
                                                           const std::string& document_text) {
  if (std::find(tpl.slots.begin(), tpl.slots.end(), "document") == tpl.slots.end())
    throw Error(errc::missing_slot, "template \"" + tpl.name + "\" does not declare slot \"document\"");
  if (document_text.empty()) throw Error(errc::empty_document, "document text is empty");
  return render(tpl, {{"document", document_text}});
}

inline std::vector<ChatTurn> render_augmentation_prompt(const PromptTemplate& tpl,
                                                        const std::string& annotated_document) {
  if (std::find(tpl.slots.begin(), tpl.slots.end(), "annotated") == tpl.slots.end())
    throw Error(errc::missing_slot, "template \"" + tpl.name + "\" does not declare slot \"annotated\"");
  try {
    annotation::parse_annotated(annotated_document, annotation::ParseMode::Lenient);
  } catch (const Error& e) {
    throw Error(errc::unparsable_annotation, e.what());
  }
  return render(tpl, {{"annotated", annotated_document}});
}

inline PromptTemplate render_rule_ablation(const PromptTemplate& tpl,
                                           const std::set<int>& drop_rules) {
  for (int id : drop_rules)
    if (!tpl.rule_ids.count(id))
      throw Error(errc::unknown_rule_id, "rule id " + std::to_string(id) + " is not marked in template");

  PromptTemplate out = tpl;
  for (auto& [role, raw] : out.turns) {
    std::string kept;
    bool first = true;
    bool dropping = false;
    for (const std::string& line : detail::split_lines(raw)) {
      if (auto id = detail::rule_open_id(line)) {
        dropping = drop_rules.count(*id) > 0;
        if (dropping) continue;
      } else if (detail::is_rule_close(line) && dropping) {
        dropping = false;
        continue;
      }
      if (dropping) continue;
      if (!first) kept += '\n';
      kept += line;
      first = false;
    }
    raw = std::move(kept);
  }
  return out;
}

// Plain-text serialization of rendered turns, used by the CLI and goldens.
inline std::string format_turns(const std::vector<ChatTurn>& turns) {
  std::string out;
  for (const ChatTurn& t : turns) {
    out += "---role: ";
    out += to_string(t.role);
    out += '\n';
    out += t.content;
    out += '\n';
  }
  return out;
}

}  // namespace ecta::prompts
