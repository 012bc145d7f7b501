// Copyright 2026 The shuffledp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SHUFFLEDP_MESSAGE_BAG_H_
#define SHUFFLEDP_MESSAGE_BAG_H_

#include <algorithm>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "shuffledp/random.h"

namespace shuffledp {

// The analyzer's view: an unordered multiset of messages. Messages are kept
// in the (shuffled) order they were delivered so the bag can be serialized,
// but equality and counting are multiset operations and every analyzer in
// this library depends on multiplicities only.
template <typename Message>
class MessageBag {
 public:
  using value_type = Message;
  using const_iterator = typename std::vector<Message>::const_iterator;

  MessageBag() = default;
  explicit MessageBag(std::vector<Message> messages)
      : messages_(std::move(messages)) {}

  std::size_t size() const { return messages_.size(); }
  bool empty() const { return messages_.empty(); }
  const_iterator begin() const { return messages_.begin(); }
  const_iterator end() const { return messages_.end(); }
  std::span<const Message> messages() const { return messages_; }

  std::size_t count(const Message& message) const {
    return static_cast<std::size_t>(
        std::count(messages_.begin(), messages_.end(), message));
  }

  // Distinct messages with multiplicities, in ascending message order.
  std::vector<std::pair<Message, std::size_t>> Distinct() const {
    std::vector<Message> sorted = messages_;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<Message, std::size_t>> out;
    for (const Message& m : sorted) {
      if (!out.empty() && out.back().first == m) {
        ++out.back().second;
      } else {
        out.emplace_back(m, 1);
      }
    }
    return out;
  }

  // Same multiset with the delivery order replaced by a uniform permutation.
  MessageBag Reordered(Rng& rng) const {
    std::vector<Message> copy = messages_;
    std::shuffle(copy.begin(), copy.end(), rng);
    return MessageBag(std::move(copy));
  }

  friend bool operator==(const MessageBag& a, const MessageBag& b) {
    if (a.size() != b.size()) return false;
    std::vector<Message> x = a.messages_;
    std::vector<Message> y = b.messages_;
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    return x == y;
  }

 private:
  std::vector<Message> messages_;
};

// The trusted shuffler: multiset union of the per-user outputs, delivered in
// a uniformly random order drawn from `rng`.
template <typename Message>
MessageBag<Message> Shuffle(std::span<const std::vector<Message>> per_user,
                            Rng& rng) {
  std::size_t total = 0;
  for (const auto& bag : per_user) total += bag.size();
  std::vector<Message> all;
  all.reserve(total);
  for (const auto& bag : per_user) all.insert(all.end(), bag.begin(), bag.end());
  std::shuffle(all.begin(), all.end(), rng);
  return MessageBag<Message>(std::move(all));
}

}  // namespace shuffledp

#endif  // SHUFFLEDP_MESSAGE_BAG_H_
