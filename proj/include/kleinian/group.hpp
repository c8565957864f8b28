#pragma once

#include <cstdint>
#include <functional>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "kleinian/mobius.hpp"

namespace kleinian {

// Letter 2i is generator i, letter 2i+1 its inverse.
using Letter = std::uint8_t;
constexpr Letter inverse_letter(Letter l) { return static_cast<Letter>(l ^ 1u); }

struct Word {
  std::vector<Letter> letters;

  std::size_t size() const { return letters.size(); }
  bool empty() const { return letters.empty(); }
  bool reduced() const;
  Word inverse() const;
  friend Word operator*(const Word& a, const Word& b);  // freely reduced product
  friend bool operator==(const Word& a, const Word& b) { return a.letters == b.letters; }
  friend bool operator<(const Word& a, const Word& b);   // shortlex
  std::string key() const { return std::string(letters.begin(), letters.end()); }
};

struct Generator {
  std::string label;
  Transform transform;
  Cap cplus;   // g(Ext cplus) = Int cminus
  Cap cminus;
  std::optional<double> phi;  // separation value, Example 1 data
  bool parabolic = false;     // the two discs may be tangent at the fixed point
};

// Bounded LRU memo of word -> transform.
class PrefixCache {
 public:
  explicit PrefixCache(std::size_t capacity = 1000000) : capacity_(capacity) {}
  std::optional<Transform> get(const std::string& key);
  void put(const std::string& key, const Transform& t);
  std::size_t size() const;
  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  using Entry = std::pair<std::string, Transform>;
  std::size_t capacity_;
  std::list<Entry> lru_;
  std::unordered_map<std::string, std::list<Entry>::iterator> index_;
  mutable std::mutex mu_;
  std::size_t hits_ = 0, misses_ = 0;
};

class SchottkyGroup {
 public:
  // Validates disjoint closures (tangency allowed inside a parabolic pair) and ping-pong.
  SchottkyGroup(int dim, std::vector<Generator> gens, std::size_t cache_capacity = 1000000);
  // Builds loxodromic generators with pair_discs.
  static SchottkyGroup from_caps(int dim, const std::vector<std::pair<Cap, Cap>>& pairs,
                                 const std::vector<std::string>& labels = {});
  static SchottkyGroup trivial(int dim);

  int dim() const { return dim_; }
  int rank() const { return static_cast<int>(gens_.size()); }
  int num_letters() const { return 2 * rank(); }
  const std::vector<Generator>& generators() const { return gens_; }
  const Transform& letter(Letter l) const { return letters_[l]; }
  const Cap& source(Letter l) const;
  const Cap& target(Letter l) const;
  std::string letter_label(Letter l) const;
  std::string word_label(const Word& w) const;

  Transform evaluate(const Word& w) const;
  PrefixCache& cache() const { return *cache_; }

  bool fundamental_domain_contains(const BoundaryPoint& z, double tol = 1e-12) const;
  // open version: strictly outside every closed disc
  bool fundamental_domain_interior(const BoundaryPoint& z, double tol = 1e-12) const;
  // ball point in the region bounded by all the disc hyperplanes
  bool fundamental_domain_contains(const InteriorPoint& z, double tol = 1e-12) const;

  // number of reduced words of length <= L, saturating at UINT64_MAX
  std::uint64_t word_count(int L) const;

 private:
  int dim_;
  std::vector<Generator> gens_;
  std::vector<Transform> letters_;
  std::shared_ptr<PrefixCache> cache_;
};

// Homomorphism from the free group on the generators to a free group (word
// images restricted to single letters or the identity) or to Z^r, r <= 4.
struct QuotientSpec {
  enum class Target { Free, Abelian };
  Target target = Target::Abelian;
  int target_rank = 1;
  // Free: image letter in the target alphabet (2j / 2j+1), or -1 for identity.
  std::vector<int> free_images;
  // Abelian: image vector per generator.
  std::vector<std::array<int, 4>> abelian_images;

  static QuotientSpec free_target(int target_rank, std::vector<int> images);
  static QuotientSpec abelian(int target_rank, std::vector<std::array<int, 4>> images);
  void validate(int rank) const;

  // Packed image of a letter prepended to an image state.  State 0 is the identity.
  std::uint64_t prepend(Letter l, std::uint64_t state) const;
  std::uint64_t image(const Word& w) const;
  // free: reduced image length, abelian: l1 norm
  int image_length(std::uint64_t state) const;
  Word image_word(std::uint64_t state) const;  // free target only
};

// Stabilizer (or other subgroup) declared as a set of generator indices.
struct StabilizerSpec {
  enum class Kind { Undeclared, Trivial, Generators };
  Kind kind = Kind::Undeclared;
  std::vector<int> generators;

  static StabilizerSpec undeclared() { return {}; }
  static StabilizerSpec trivial() { return {Kind::Trivial, {}}; }
  static StabilizerSpec of(std::vector<int> g) { return {Kind::Generators, std::move(g)}; }
  bool contains_letter(Letter l) const;
  bool is_trivial() const { return kind != Kind::Generators || generators.empty(); }
};

struct WordEntry {
  Word word;
  Transform transform;
};

struct EnumerationOptions {
  std::uint64_t node_budget = 50000000;
};

// All reduced words of length <= L, shortlex order.  Throws BudgetExceeded
// (as PartialEnumeration) when the word count exceeds the budget.
std::vector<WordEntry> enumerate_words(const SchottkyGroup& G, int L, const EnumerationOptions& opt = {});
std::vector<WordEntry> kernel_enumerate(const SchottkyGroup& G, const QuotientSpec& Q, int L,
                                        const EnumerationOptions& opt = {});

enum class CosetPolicy {
  MinDistance,    // per coset the enumerated member minimizing d(0, g(0))
  Shortest,       // reduced words that do not end in a stabilizer letter
  KernelSection,  // the member lying in ker(section); one stabilizer generator only
};

struct CosetOptions {
  CosetPolicy policy = CosetPolicy::MinDistance;
  std::optional<QuotientSpec> section;
  std::uint64_t node_budget = 50000000;
};

struct CosetResult {
  std::vector<WordEntry> representatives;
  bool incomplete = false;  // truncation may have hidden a closer coset member or whole cosets
};

// Left cosets g Stab.  Cosets are identified symbolically (strip trailing stabilizer letters).
CosetResult coset_representatives(const SchottkyGroup& G, const StabilizerSpec& stab, int L,
                                  const CosetOptions& opt = {});
// Cosets of the kernel of Q, identified by their quotient image.
CosetResult coset_representatives(const SchottkyGroup& G, const QuotientSpec& Q, int L,
                                  const EnumerationOptions& opt = {});

// Word with trailing stabilizer letters removed, the canonical name of its coset.
Word strip_stabilizer(const Word& w, const StabilizerSpec& stab);

struct EndingSequenceSpec {
  BoundaryPoint target;
  std::vector<double> t;  // Euclidean radii, increasing to 1
  double offset = 0.0;    // hyperbolic distance off the ray
  static EndingSequenceSpec dyadic(const BoundaryPoint& z, int n);  // t_n = 1 - 2^-n
};

std::vector<InteriorPoint> ending_sequence(const SchottkyGroup& G, const EndingSequenceSpec& spec);

class PartialEnumeration : public Error {
 public:
  PartialEnumeration(std::vector<WordEntry> partial, int depth)
      : Error(ErrorCode::BudgetExceeded, "node budget exhausted, complete to depth " + std::to_string(depth)),
        partial_(std::move(partial)),
        depth_(depth) {}
  const std::vector<WordEntry>& partial() const { return partial_; }
  int depth() const { return depth_; }

 private:
  std::vector<WordEntry> partial_;
  int depth_;
};

}  // namespace kleinian
