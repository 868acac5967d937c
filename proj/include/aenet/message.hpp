#pragma once

#include <cassert>
#include <cstdint>
#include <span>
#include <vector>

namespace aenet {

// One symbol on a wire: a fixed-width bit payload, the empty sentinel (bot),
// or the erased placeholder (star). Star never travels on a live wire; it
// only appears when a protocol is re-evaluated with some inputs erased.
class Message {
 public:
  enum class Kind : std::uint8_t { kValue, kBot, kStar };

  constexpr Message() : bits_(0), width_(0), kind_(Kind::kBot) {}

  static constexpr Message value(std::uint64_t bits, int width) {
    assert(width >= 1 && width <= 64);
    const std::uint64_t mask = (width >= 64) ? ~0ULL : ((1ULL << width) - 1);
    return Message(bits & mask, static_cast<std::uint8_t>(width), Kind::kValue);
  }
  static constexpr Message bot() { return Message(); }
  static constexpr Message star() { return Message(0, 0, Kind::kStar); }

  constexpr bool is_value() const { return kind_ == Kind::kValue; }
  constexpr bool is_bot() const { return kind_ == Kind::kBot; }
  constexpr bool is_star() const { return kind_ == Kind::kStar; }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr int width() const { return width_; }
  constexpr Kind kind() const { return kind_; }

  // Size used by the work accounting: payload width for values, one bit for
  // the sentinels.
  constexpr int bit_size() const { return is_value() ? width_ : 1; }

  friend constexpr bool operator==(const Message& a, const Message& b) {
    return a.kind_ == b.kind_ && a.width_ == b.width_ && a.bits_ == b.bits_;
  }
  friend constexpr bool operator!=(const Message& a, const Message& b) { return !(a == b); }

 private:
  constexpr Message(std::uint64_t bits, std::uint8_t width, Kind kind)
      : bits_(bits), width_(width), kind_(kind) {}

  std::uint64_t bits_;
  std::uint8_t width_;
  Kind kind_;
};

// Tallies votes for majority decisions. Non-star messages (bot included) are
// counted as ordinary candidates; stars are tallied separately so the
// tri-state rules below can reason about what erased slots could have been.
class VoteCounter {
 public:
  void add(const Message& m) {
    ++total_;
    if (m.is_star()) {
      ++stars_;
      return;
    }
    for (auto& [val, n] : counts_)
      if (val == m) {
        ++n;
        return;
      }
    counts_.emplace_back(m, 1);
  }

  void clear() {
    counts_.clear();
    stars_ = 0;
    total_ = 0;
  }

  std::uint32_t total() const { return total_; }
  std::uint32_t stars() const { return stars_; }
  bool empty() const { return total_ == 0; }

  // Strict majority over all entries, bot counting as a candidate value.
  // Empty input or a tie yields bot. Stars must not be present.
  Message strict_majority() const {
    assert(stars_ == 0);
    for (const auto& [val, n] : counts_)
      if (2ULL * n > total_) return val;
    return Message::bot();
  }

  // Strict majority where every slot is occupied but star slots could hold
  // any symbol (bot included). Returns the unique winner if one wins under
  // every completion, bot if no completion produces a winner other than bot,
  // star otherwise.
  Message tri_strict_majority() const {
    for (const auto& [val, n] : counts_)
      if (2ULL * n > total_) return val;
    // No certain winner. Could some completion elect a non-bot value?
    if (2ULL * stars_ > total_) return Message::star();  // fresh value could win
    for (const auto& [val, n] : counts_)
      if (!val.is_bot() && 2ULL * (n + stars_) > total_) return Message::star();
    return Message::bot();
  }

  // Strict majority over a bag whose star entries may also be absent (an
  // erased receipt might never have arrived). The realized bag size varies
  // with the completion, so certainty is judged against the largest one.
  Message tri_bag_majority() const {
    const std::uint64_t fixed = total_ - stars_;
    for (const auto& [val, n] : counts_)
      if (2ULL * n > fixed + stars_) return val;
    if (stars_ > fixed) return Message::star();
    for (const auto& [val, n] : counts_)
      if (2ULL * n + stars_ > fixed) return Message::star();
    return Message::bot();
  }

  const std::vector<std::pair<Message, std::uint32_t>>& entries() const { return counts_; }

 private:
  std::vector<std::pair<Message, std::uint32_t>> counts_;
  std::uint32_t stars_ = 0;
  std::uint32_t total_ = 0;
};

// Strict majority of a message list; ties and empty input decode to bot.
inline Message majority(std::span<const Message> votes) {
  VoteCounter vc;
  for (const Message& m : votes) vc.add(m);
  return vc.strict_majority();
}

inline Message majority(const std::vector<Message>& votes) {
  return majority(std::span<const Message>(votes.data(), votes.size()));
}

}  // namespace aenet
