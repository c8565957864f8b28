#pragma once

// Orbit walker: visits Lambda_w * root for every reduced word w of length <= L
// without materializing transforms.  Words grow by prepending letters, so a
// subtree is the set of words sharing a rightmost letter; the 2k subtrees are
// independent tasks whose sinks are merged by the caller in task order.

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "kleinian/group.hpp"

namespace kleinian {

enum class FilterKind {
  All,
  Kernel,         // image under the quotient is trivial
  CosetShortest,  // rightmost letter outside the stabilizer
  CosetSection,   // CosetShortest and |u| + |Q(u)| <= L
};

struct WalkFilter {
  FilterKind kind = FilterKind::All;
  std::optional<QuotientSpec> quotient;
  StabilizerSpec stab;

  static WalkFilter all() { return {}; }
  static WalkFilter kernel(QuotientSpec q) { return {FilterKind::Kernel, std::move(q), {}}; }
  static WalkFilter coset_shortest(StabilizerSpec s) { return {FilterKind::CosetShortest, std::nullopt, std::move(s)}; }
  static WalkFilter coset_section(StabilizerSpec s, QuotientSpec q) {
    return {FilterKind::CosetSection, std::move(q), std::move(s)};
  }
};

struct WalkOptions {
  int depth = 0;
  std::uint64_t node_budget = 4000000000ULL;
  int threads = 1;
  std::size_t block = 256;
};

struct WalkBlock {
  int level = 0;
  std::size_t n = 0;
  const double* y[4] = {nullptr, nullptr, nullptr, nullptr};
  const Letter* first = nullptr;        // leftmost letter of each word
  const std::uint8_t* counted = nullptr;  // filter verdict per word
  int task = -1;                        // rightmost letter, -1 for the identity
};

class WalkSink {
 public:
  virtual ~WalkSink() = default;
  virtual void consume(const WalkBlock& b) = 0;
};

using SinkFactory = std::function<std::unique_ptr<WalkSink>(int task)>;

struct WalkStats {
  int requested_depth = 0;
  int depth = 0;  // depth actually completed
  std::uint64_t nodes = 0;
  bool budget_hit = false;
};

// sinks[0] receives the identity, sinks[1 + r] the subtree with rightmost letter r.
WalkStats walk(const SchottkyGroup& G, const Vec4& root, const WalkOptions& opt, const WalkFilter& filter,
               const SinkFactory& make, std::vector<std::unique_ptr<WalkSink>>& sinks);

// Long double reference traversal, same task order, nodes in depth-first order.
using ExtendedVisitor = std::function<void(int level, const std::array<long double, 4>& Y, bool counted, int task)>;
WalkStats walk_extended(const SchottkyGroup& G, const Vec4& root, const WalkOptions& opt, const WalkFilter& filter,
                        const ExtendedVisitor& visit);

// Largest depth <= L whose full word count fits the budget.
int budget_depth(const SchottkyGroup& G, int L, std::uint64_t budget);

}  // namespace kleinian
