#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace charpipe::utf8 {

/// Decodes UTF-8 into Unicode scalar values. Throws DecodeError on ill-formed
/// input (overlongs, surrogates and truncated sequences included).
std::u32string decode(std::string_view bytes);

/// Calls `fn(char32_t)` for every scalar value without materializing a buffer.
template <class Fn>
void for_each_code_point(std::string_view bytes, Fn&& fn);

std::string encode(char32_t cp);
std::string encode(std::u32string_view cps);
void append(std::string& out, char32_t cp);

bool is_valid(std::string_view bytes);
std::size_t length(std::string_view bytes);

/// Byte offset of the first ill-formed sequence, or npos.
std::size_t find_invalid(std::string_view bytes);

// Returns the next scalar value starting at `pos` and advances `pos`; returns
// a negative value on ill-formed input. Exposed for the template below.
int next(std::string_view bytes, std::size_t& pos);
[[noreturn]] void throw_invalid(std::size_t offset);

template <class Fn>
void for_each_code_point(std::string_view bytes, Fn&& fn) {
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const unsigned char lead = static_cast<unsigned char>(bytes[pos]);
    if (lead < 0x80) {
      ++pos;
      fn(static_cast<char32_t>(lead));
      continue;
    }
    const std::size_t start = pos;
    const int cp = next(bytes, pos);
    if (cp < 0) {
      throw_invalid(start);
    }
    fn(static_cast<char32_t>(cp));
  }
}

}  // namespace charpipe::utf8
