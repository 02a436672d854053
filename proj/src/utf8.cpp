#include "charpipe/utf8.hpp"

#include <unicode/utf8.h>

#include "charpipe/errors.hpp"

namespace charpipe::utf8 {

int next(std::string_view bytes, std::size_t& pos) {
  const auto* s = reinterpret_cast<const std::uint8_t*>(bytes.data());
  const auto length = static_cast<int32_t>(bytes.size());
  auto i = static_cast<int32_t>(pos);
  UChar32 c = 0;
  U8_NEXT(s, i, length, c);
  pos = static_cast<std::size_t>(i);
  return c;
}

void throw_invalid(std::size_t offset) {
  throw DecodeError("invalid UTF-8 at byte " + std::to_string(offset), offset);
}

std::u32string decode(std::string_view bytes) {
  std::u32string out;
  out.reserve(bytes.size());
  for_each_code_point(bytes, [&](char32_t c) { out.push_back(c); });
  return out;
}

void append(std::string& out, char32_t cp) {
  char buf[U8_MAX_LENGTH];
  int32_t n = 0;
  UBool error = false;
  U8_APPEND(reinterpret_cast<std::uint8_t*>(buf), n, U8_MAX_LENGTH,
            static_cast<UChar32>(cp), error);
  if (error) {
    throw Error("cannot encode code point " + std::to_string(cp));
  }
  out.append(buf, static_cast<std::size_t>(n));
}

std::string encode(char32_t cp) {
  std::string out;
  append(out, cp);
  return out;
}

std::string encode(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t c : cps) append(out, c);
  return out;
}

std::size_t find_invalid(std::string_view bytes) {
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    if (static_cast<unsigned char>(bytes[pos]) < 0x80) {
      ++pos;
      continue;
    }
    const std::size_t start = pos;
    if (next(bytes, pos) < 0) return start;
  }
  return std::string_view::npos;
}

bool is_valid(std::string_view bytes) {
  return find_invalid(bytes) == std::string_view::npos;
}

std::size_t length(std::string_view bytes) {
  std::size_t n = 0;
  for_each_code_point(bytes, [&](char32_t) { ++n; });
  return n;
}

}  // namespace charpipe::utf8
