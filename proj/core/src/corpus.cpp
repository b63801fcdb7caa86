#include "discpar/corpus.hpp"

#include <algorithm>

#include "discpar/error.hpp"

namespace discpar {

namespace {
constexpr std::array<std::string_view, kNumLabels> kLabelNames = {"Comp", "Cont", "Exp", "Temp"};
}  // namespace

std::string_view label_name(Label label) noexcept { return kLabelNames[label_index(label)]; }

std::optional<Label> parse_label(std::string_view text) noexcept {
  for (std::size_t i = 0; i < kNumLabels; ++i) {
    if (kLabelNames[i] == text) return static_cast<Label>(i);
  }
  return std::nullopt;
}

std::string_view kind_name(SlotKind kind) noexcept {
  return kind == SlotKind::Implicit ? "IMP" : "EXP";
}

bool RelationSlot::accepts(Label label) const noexcept {
  return std::find(gold.begin(), gold.end(), label) != gold.end();
}

void Paragraph::validate() const {
  if (spans.size() < 2) throw DataError("paragraph needs at least 2 discourse units");
  if (tokens.empty()) throw DataError("paragraph has no tokens");
  std::size_t expected_start = 0;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const DuSpan& s = spans[i];
    if (s.start != expected_start || s.end < s.start) {
      throw DataError("discourse unit " + std::to_string(i) + " is not contiguous");
    }
    expected_start = s.end + 1;
  }
  if (expected_start != tokens.size()) throw DataError("discourse units do not cover the tokens");
  if (slots.size() + 1 != spans.size()) {
    throw DataError("expected " + std::to_string(spans.size() - 1) + " relation slots, found " +
                    std::to_string(slots.size()));
  }
  for (std::size_t t = 0; t < slots.size(); ++t) {
    const RelationSlot& slot = slots[t];
    if (slot.index != t) throw DataError("relation slot " + std::to_string(t) + " out of order");
    if (slot.gold.empty() || slot.gold.size() > 2) {
      throw DataError("relation slot " + std::to_string(t) + " needs 1 or 2 gold labels");
    }
    if (slot.gold.size() == 2 && slot.gold[0] == slot.gold[1]) {
      throw DataError("relation slot " + std::to_string(t) + " repeats a gold label");
    }
  }
}

TagInventory::TagInventory(std::size_t capacity, const std::vector<std::string>& tags)
    : capacity_(std::max(capacity, tags.size())) {
  for (const auto& tag : tags) {
    if (index_.contains(tag)) throw DataError("duplicate tag '" + tag + "' in inventory");
    index_.emplace(tag, static_cast<std::int32_t>(tags_.size()));
    tags_.push_back(tag);
  }
  frozen_ = true;
}

std::int32_t TagInventory::find(std::string_view tag) const {
  auto it = index_.find(std::string(tag));
  return it == index_.end() ? kUnknownId : it->second;
}

std::int32_t TagInventory::resolve(std::string_view tag) {
  const std::int32_t id = find(tag);
  if (id != kUnknownId || frozen_ || tags_.size() >= capacity_) return id;
  const auto fresh = static_cast<std::int32_t>(tags_.size());
  tags_.emplace_back(tag);
  index_.emplace(tags_.back(), fresh);
  return fresh;
}

std::size_t count_slots(const std::vector<Paragraph>& paragraphs, std::optional<SlotKind> kind) {
  std::size_t n = 0;
  for (const auto& p : paragraphs) {
    for (const auto& s : p.slots) {
      if (!kind || s.kind == *kind) ++n;
    }
  }
  return n;
}

}  // namespace discpar
