#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ecta::unicode {

// Minimal UTF-8 helpers. All offsets exposed by the library are measured in
// unicode scalar values (code points), never bytes. Decoding is lenient:
// invalid byte sequences decode to U+FFFD one byte at a time, so offsets stay
// well defined for arbitrary model output.

inline constexpr char32_t kReplacement = 0xFFFD;

struct CodePoint {
  char32_t value;
  std::size_t byte_pos;   // byte offset of the first byte in the source
  std::size_t byte_len;   // bytes consumed
};

inline std::size_t sequence_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 0;  // continuation or invalid lead byte
}

// Decodes one code point starting at byte `pos`. Returns the decoded point
// and advances `pos` past it. Invalid input yields U+FFFD and advances by 1.
inline char32_t decode_at(std::string_view s, std::size_t& pos) {
  const unsigned char lead = static_cast<unsigned char>(s[pos]);
  const std::size_t len = sequence_length(lead);
  if (len == 0 || pos + len > s.size()) {
    ++pos;
    return kReplacement;
  }
  if (len == 1) {
    ++pos;
    return lead;
  }
  char32_t cp = lead & (0x7F >> len);
  for (std::size_t i = 1; i < len; ++i) {
    const unsigned char cont = static_cast<unsigned char>(s[pos + i]);
    if ((cont >> 6) != 0x2) {
      ++pos;
      return kReplacement;
    }
    cp = (cp << 6) | (cont & 0x3F);
  }
  pos += len;
  return cp;
}

inline std::vector<CodePoint> code_points(std::string_view s) {
  std::vector<CodePoint> out;
  out.reserve(s.size());
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t start = pos;
    const char32_t cp = decode_at(s, pos);
    out.push_back({cp, start, pos - start});
  }
  return out;
}

inline std::size_t length(std::string_view s) {
  std::size_t n = 0, pos = 0;
  while (pos < s.size()) {
    decode_at(s, pos);
    ++n;
  }
  return n;
}

inline void append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::string encode(const std::vector<char32_t>& cps) {
  std::string out;
  for (char32_t cp : cps) append(out, cp);
  return out;
}

inline std::vector<char32_t> decode(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  std::size_t pos = 0;
  while (pos < s.size()) out.push_back(decode_at(s, pos));
  return out;
}

inline bool is_cjk(char32_t cp) {
  return (cp >= 0x4E00 && cp <= 0x9FFF) ||    // CJK unified
         (cp >= 0x3400 && cp <= 0x4DBF) ||    // extension A
         (cp >= 0xF900 && cp <= 0xFAFF) ||    // compatibility ideographs
         (cp >= 0x3040 && cp <= 0x30FF) ||    // kana
         (cp >= 0xAC00 && cp <= 0xD7AF);      // hangul
}

inline bool contains_cjk(std::string_view s) {
  std::size_t pos = 0;
  while (pos < s.size()) {
    if (is_cjk(decode_at(s, pos))) return true;
  }
  return false;
}

// Number of code points in s before byte offset `byte_pos`.
inline std::size_t cp_index_of_byte(std::string_view s, std::size_t byte_pos) {
  std::size_t n = 0, pos = 0;
  while (pos < byte_pos && pos < s.size()) {
    decode_at(s, pos);
    ++n;
  }
  return n;
}

}  // namespace ecta::unicode
