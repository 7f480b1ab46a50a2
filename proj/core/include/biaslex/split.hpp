#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "biaslex/text_prep.hpp"

namespace biaslex {

struct SplitSpec {
  std::array<double, 3> ratios{0.72, 0.18, 0.10};  // train, val, test
  std::uint64_t seed = 20240601;
  bool stratify_on_label = true;

  // Ratios must be positive and sum to 1 within 1e-9.
  void validate() const;
};

// Floors each share of n and hands the leftover units out by descending
// fractional remainder, earlier splits first on ties.
std::array<std::size_t, 3> largest_remainder(std::size_t n, const std::array<double, 3>& ratios);

struct SplitIndices {
  std::vector<std::size_t> train, val, test;
};

// One entry per item: its group (decision id) and binary label.
struct SplitItem {
  std::string group;
  int label = 0;
};

// Apportions whole groups, so no group straddles two splits. A group is
// labeled biased when any of its items is. With stratification each label
// class is apportioned separately; a class with fewer groups than splits goes
// wholly to train with a warning. Index lists are ascending.
SplitIndices split(const std::vector<SplitItem>& items, const SplitSpec& spec);

// Chunks grouped by decision id; unlabeled chunks count as non-biased.
SplitIndices split(const std::vector<Chunk>& chunks, const SplitSpec& spec);

}  // namespace biaslex
