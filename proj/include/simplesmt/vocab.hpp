#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace simplesmt {

using WordId = std::uint32_t;

// Bidirectional string <-> dense id map. Ids are assigned in insertion order.
class Vocab {
 public:
  WordId intern(std::string_view word) {
    auto it = index_.find(std::string(word));
    if (it != index_.end()) return it->second;
    WordId id = static_cast<WordId>(words_.size());
    words_.emplace_back(word);
    index_.emplace(words_.back(), id);
    return id;
  }

  // Returns `fallback` for unknown words.
  WordId find(std::string_view word, WordId fallback) const {
    auto it = index_.find(std::string(word));
    return it == index_.end() ? fallback : it->second;
  }
  bool contains(std::string_view word) const { return index_.count(std::string(word)) != 0; }

  const std::string& word(WordId id) const { return words_[id]; }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId> index_;
};

}  // namespace simplesmt
