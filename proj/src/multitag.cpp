#include "charpipe/multitag.hpp"

#include <algorithm>

#include "charpipe/errors.hpp"

namespace charpipe {

Multitag::Multitag(std::vector<std::string> tags) : tags_(std::move(tags)) {
  for (const auto& t : tags_) {
    if (t.empty() || t.find(kTagSeparator) != std::string::npos) {
      throw Error("invalid tag '" + t + "'");
    }
  }
}

Multitag Multitag::parse(std::string_view key) {
  std::vector<std::string> tags;
  if (key.empty()) return Multitag();
  std::size_t start = 0;
  while (true) {
    const auto pos = key.find(kTagSeparator, start);
    tags.emplace_back(key.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return Multitag(std::move(tags));
}

bool Multitag::contains(std::string_view tag) const {
  return std::find(tags_.begin(), tags_.end(), tag) != tags_.end();
}

std::string Multitag::class_key() const {
  std::string key;
  for (const auto& t : tags_) {
    if (!key.empty()) key += kTagSeparator;
    key += t;
  }
  return key;
}

std::map<std::string, std::size_t> Multitag::multiset() const {
  std::map<std::string, std::size_t> counts;
  for (const auto& t : tags_) ++counts[t];
  return counts;
}

}  // namespace charpipe
