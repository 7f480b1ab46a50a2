#include "biaslex/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "biaslex/error.hpp"
#include "biaslex/log.hpp"
#include "biaslex/rng.hpp"

namespace biaslex {

void SplitSpec::validate() const {
  double sum = 0.0;
  for (double r : ratios) {
    if (!(r > 0.0)) throw ConfigError("split ratios must be positive");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("split ratios must sum to 1");
}

std::array<std::size_t, 3> largest_remainder(std::size_t n, const std::array<double, 3>& ratios) {
  std::array<std::size_t, 3> sizes{};
  // Remainders quantized to 1e-9 so shares that tie exactly also tie here.
  std::array<long long, 3> rem{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double share = static_cast<double>(n) * ratios[i];
    // The epsilon keeps exact shares such as 160 * 0.1 from flooring to 15.
    const double fl = std::floor(share + 1e-9);
    sizes[i] = static_cast<std::size_t>(fl);
    rem[i] = std::llround(std::max(0.0, share - fl) * 1e9);
    assigned += sizes[i];
  }
  if (assigned > n) throw ConfigError("split ratios exceed one");
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++sizes[order[k % 3]];
  return sizes;
}

namespace {

// Stream ids for the per-class shuffles; the unstratified pass uses its own.
constexpr std::uint64_t kUnstratifiedStream = 0xffffffffULL;

void apportion(std::vector<std::size_t> groups, const SplitSpec& spec, std::uint64_t stream,
               std::array<std::vector<std::size_t>, 3>& out) {
  SeededStream rng(spec.seed, stream);
  rng.shuffle(groups.begin(), groups.end());
  const auto sizes = largest_remainder(groups.size(), spec.ratios);
  std::size_t pos = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t k = 0; k < sizes[s]; ++k) out[s].push_back(groups[pos++]);
  }
}

}  // namespace

SplitIndices split(const std::vector<SplitItem>& items, const SplitSpec& spec) {
  spec.validate();
  if (items.empty()) throw ConfigError("cannot split an empty item list");

  // Groups in order of first appearance.
  std::map<std::string, std::size_t> group_of;
  std::vector<std::vector<std::size_t>> members;
  std::vector<int> group_label;
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto [it, fresh] = group_of.try_emplace(items[i].group, members.size());
    if (fresh) {
      members.emplace_back();
      group_label.push_back(0);
    }
    members[it->second].push_back(i);
    if (items[i].label != 0) group_label[it->second] = 1;
  }

  std::array<std::vector<std::size_t>, 3> assigned;
  if (spec.stratify_on_label) {
    for (int cls : {0, 1}) {
      std::vector<std::size_t> groups;
      for (std::size_t g = 0; g < members.size(); ++g) {
        if (group_label[g] == cls) groups.push_back(g);
      }
      if (groups.empty()) continue;
      if (groups.size() < 3) {
        warn("split: class " + std::to_string(cls) + " has only " +
             std::to_string(groups.size()) + " group(s); placing it wholly in train");
        assigned[0].insert(assigned[0].end(), groups.begin(), groups.end());
        continue;
      }
      apportion(std::move(groups), spec, static_cast<std::uint64_t>(cls), assigned);
    }
  } else {
    std::vector<std::size_t> groups(members.size());
    std::iota(groups.begin(), groups.end(), std::size_t{0});
    apportion(std::move(groups), spec, kUnstratifiedStream, assigned);
  }

  std::array<std::vector<std::size_t>, 3> idx;
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t g : assigned[s]) idx[s].insert(idx[s].end(), members[g].begin(), members[g].end());
    std::sort(idx[s].begin(), idx[s].end());
  }
  return {std::move(idx[0]), std::move(idx[1]), std::move(idx[2])};
}

SplitIndices split(const std::vector<Chunk>& chunks, const SplitSpec& spec) {
  std::vector<SplitItem> items;
  items.reserve(chunks.size());
  for (const auto& c : chunks) {
    items.push_back({c.decision_id, c.label == ChunkLabel::biased ? 1 : 0});
  }
  return split(items, spec);
}

}  // namespace biaslex
