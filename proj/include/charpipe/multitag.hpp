#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace charpipe {

/// An ordered sequence of tags. As a class label it is identified by its
/// "+"-joined key, so ADP+DET and DET+ADP are different classes; metrics
/// treat it as a multiset.
class Multitag {
 public:
  Multitag() = default;
  explicit Multitag(std::vector<std::string> tags);
  Multitag(std::initializer_list<std::string> tags)
      : Multitag(std::vector<std::string>(tags)) {}

  /// Splits a "+"-joined key. The empty string yields an empty multitag.
  static Multitag parse(std::string_view key);

  const std::vector<std::string>& tags() const { return tags_; }
  std::size_t size() const { return tags_.size(); }
  bool empty() const { return tags_.empty(); }
  bool contains(std::string_view tag) const;

  std::string class_key() const;
  std::map<std::string, std::size_t> multiset() const;

  bool operator==(const Multitag&) const = default;

 private:
  std::vector<std::string> tags_;
};

inline constexpr char kTagSeparator = '+';

}  // namespace charpipe
