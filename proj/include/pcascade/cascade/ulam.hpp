#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pcascade/error.hpp"

namespace pcascade {

/// Vertex of the Ulam tree: a finite word over the positive integers.
/// The empty word is the root.
class UlamLabel {
 public:
  UlamLabel() = default;

  explicit UlamLabel(std::vector<std::uint64_t> entries) : entries_(std::move(entries)) {
    for (auto e : entries_)
      if (e == 0) throw DomainError("UlamLabel: entries must be positive");
  }

  static UlamLabel root() { return {}; }

  /// "." for the root, otherwise dot-separated entries such as "3.1.2".
  static UlamLabel parse(std::string_view s) {
    if (s == ".") return {};
    std::vector<std::uint64_t> e;
    std::uint64_t cur = 0;
    bool have_digit = false;
    for (char c : s) {
      if (c == '.') {
        if (!have_digit) throw DomainError("UlamLabel: empty entry in '" + std::string(s) + "'");
        e.push_back(cur);
        cur = 0;
        have_digit = false;
      } else if (c >= '0' && c <= '9') {
        cur = cur * 10 + static_cast<std::uint64_t>(c - '0');
        have_digit = true;
      } else {
        throw DomainError("UlamLabel: bad character in '" + std::string(s) + "'");
      }
    }
    if (!have_digit) throw DomainError("UlamLabel: empty entry in '" + std::string(s) + "'");
    e.push_back(cur);
    return UlamLabel(std::move(e));
  }

  std::size_t generation() const { return entries_.size(); }
  bool is_root() const { return entries_.empty(); }
  const std::vector<std::uint64_t>& entries() const { return entries_; }

  UlamLabel child(std::uint64_t i) const {
    if (i == 0) throw DomainError("UlamLabel: child index must be positive");
    UlamLabel c = *this;
    c.entries_.push_back(i);
    return c;
  }

  UlamLabel parent() const {
    if (is_root()) throw DomainError("UlamLabel: the root has no parent");
    UlamLabel c = *this;
    c.entries_.pop_back();
    return c;
  }

  /// Concatenation uv.
  UlamLabel operator+(const UlamLabel& v) const {
    UlamLabel c = *this;
    c.entries_.insert(c.entries_.end(), v.entries_.begin(), v.entries_.end());
    return c;
  }

  bool is_prefix_of(const UlamLabel& v) const {
    if (entries_.size() > v.entries_.size()) return false;
    for (std::size_t i = 0; i < entries_.size(); ++i)
      if (entries_[i] != v.entries_[i]) return false;
    return true;
  }

  std::string to_string() const {
    if (is_root()) return ".";
    std::string s;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (i) s += '.';
      s += std::to_string(entries_[i]);
    }
    return s;
  }

  friend bool operator==(const UlamLabel&, const UlamLabel&) = default;
  friend auto operator<=>(const UlamLabel&, const UlamLabel&) = default;

 private:
  std::vector<std::uint64_t> entries_;
};

}  // namespace pcascade
