#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace discpar {

/// The four top-level relation senses, in fixed order.
enum class Label : std::uint8_t { Comp = 0, Cont = 1, Exp = 2, Temp = 3 };
inline constexpr std::size_t kNumLabels = 4;
inline constexpr std::array<Label, kNumLabels> kAllLabels = {Label::Comp, Label::Cont, Label::Exp,
                                                             Label::Temp};

std::string_view label_name(Label label) noexcept;
std::optional<Label> parse_label(std::string_view text) noexcept;
inline std::size_t label_index(Label label) noexcept { return static_cast<std::size_t>(label); }

enum class SlotKind : std::uint8_t { Implicit = 0, Explicit = 1 };
std::string_view kind_name(SlotKind kind) noexcept;  // "IMP" / "EXP"

inline constexpr std::int32_t kUnknownId = -1;

struct Token {
  std::string surface;
  std::int32_t word_id = kUnknownId;  // set by bind_vocabulary
  std::int32_t pos_id = kUnknownId;
  std::int32_t ner_id = kUnknownId;
  std::string pos;  // raw tag text, kept for lossless serialization
  std::string ner;

  friend bool operator==(const Token&, const Token&) = default;
};

/// Inclusive token range of one discourse unit.
struct DuSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t length() const noexcept { return end - start + 1; }
  friend bool operator==(const DuSpan&, const DuSpan&) = default;
};

/// Relation between DU `index` and DU `index + 1`.
struct RelationSlot {
  std::size_t index = 0;
  SlotKind kind = SlotKind::Implicit;
  std::vector<Label> gold;  // 1-2 distinct labels, first-listed first

  bool accepts(Label label) const noexcept;
  friend bool operator==(const RelationSlot&, const RelationSlot&) = default;
};

struct Paragraph {
  std::vector<Token> tokens;
  std::vector<DuSpan> spans;
  std::vector<RelationSlot> slots;

  std::size_t du_count() const noexcept { return spans.size(); }
  /// Throws DataError on any violated invariant.
  void validate() const;
  friend bool operator==(const Paragraph&, const Paragraph&) = default;
};

/// Fixed-width tag inventory for the one-hot POS / NER blocks. Unknown tags
/// map to kUnknownId (an all-zero block). An open inventory admits new tags
/// until its capacity is reached; a frozen one never grows.
class TagInventory {
 public:
  explicit TagInventory(std::size_t capacity = 0) : capacity_(capacity) {}
  TagInventory(std::size_t capacity, const std::vector<std::string>& tags);

  std::size_t capacity() const noexcept { return capacity_; }
  const std::vector<std::string>& tags() const noexcept { return tags_; }
  bool frozen() const noexcept { return frozen_; }
  void freeze() noexcept { frozen_ = true; }

  std::int32_t find(std::string_view tag) const;
  /// find, admitting the tag first when the inventory is open and has room.
  std::int32_t resolve(std::string_view tag);

  friend bool operator==(const TagInventory& a, const TagInventory& b) {
    return a.capacity_ == b.capacity_ && a.tags_ == b.tags_;
  }

 private:
  std::size_t capacity_;
  std::vector<std::string> tags_;
  std::unordered_map<std::string, std::int32_t> index_;
  bool frozen_ = false;
};

inline constexpr std::size_t kDefaultPosSlots = 36;
inline constexpr std::size_t kDefaultNerSlots = 7;

struct Inventories {
  TagInventory pos{kDefaultPosSlots};
  TagInventory ner{kDefaultNerSlots};
  friend bool operator==(const Inventories&, const Inventories&) = default;
};

struct Corpus {
  std::vector<Paragraph> train;
  std::vector<Paragraph> dev;
  std::vector<Paragraph> test;
  Inventories inventories;
};

std::size_t count_slots(const std::vector<Paragraph>& paragraphs, std::optional<SlotKind> kind = {});

}  // namespace discpar
