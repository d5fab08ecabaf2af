#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace schurlab {

enum class GroupKind : std::uint8_t { ZD = 0, Free = 1, Cyclic = 2 };

/// Canonical form of a group element.
///
/// ZD: the integer coordinate vector. Free: the freely reduced word, one
/// code per letter, where code 2j is the generator a_{j+1} and 2j+1 its
/// inverse. Cyclic: a single residue in [0, m).
///
/// Equality is structural. The total order is shortlex on the code vector:
/// lexicographic for ZD (all vectors have the same length), shortlex with
/// letter order a < A < b < B < ... for free groups, numeric for cyclic
/// groups.
class Element {
 public:
  Element() = default;
  Element(GroupKind kind, std::vector<std::int32_t> data)
      : kind_(kind), data_(std::move(data)) {}

  GroupKind kind() const noexcept { return kind_; }
  std::span<const std::int32_t> data() const noexcept { return data_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::int32_t operator[](std::size_t i) const { return data_[i]; }

  friend bool operator==(const Element&, const Element&) = default;
  friend std::strong_ordering operator<=>(const Element& a,
                                          const Element& b) noexcept;

 private:
  GroupKind kind_ = GroupKind::ZD;
  std::vector<std::int32_t> data_;
};

struct ElementHash {
  std::size_t operator()(const Element& x) const noexcept;
};

namespace detail {
struct BallCache;
}

/// A finitely generated group with exact arithmetic and its word metric.
///
/// Supported models: Z^d with the standard generators, the free group F_k on
/// a_1..a_k, and Z/mZ generated by 1. Values are cheap to copy; copies share
/// a synchronized ball cache.
class Group {
 public:
  static constexpr std::size_t kDefaultBallCap = 1'000'000;

  static Group zd(int dim, std::size_t ball_cap = kDefaultBallCap);
  static Group free(int rank, std::size_t ball_cap = kDefaultBallCap);
  static Group cyclic(int modulus, std::size_t ball_cap = kDefaultBallCap);

  /// "Z1", "Z2", "Z3", ..., "F2", ..., "C12".
  static Group parse(std::string_view spec,
                     std::size_t ball_cap = kDefaultBallCap);

  GroupKind kind() const noexcept { return kind_; }
  /// d for Z^d, k for F_k, 1 for cyclic groups.
  int rank() const noexcept { return rank_; }
  int modulus() const noexcept { return modulus_; }
  std::size_t ball_cap() const noexcept { return ball_cap_; }
  std::string spec() const;

  /// Symmetric generating set without the identity, in element order.
  const std::vector<Element>& generators() const noexcept { return gens_; }

  Element identity() const;
  Element coords(std::vector<std::int32_t> xs) const;  // ZD
  Element word(std::string_view letters) const;        // Free, "a B a"
  Element residue(std::int64_t r) const;               // Cyclic, reduced mod m

  bool is_valid(const Element& x) const noexcept;
  void validate(const Element& x) const;

  Element mul(const Element& a, const Element& b) const;
  Element inv(const Element& a) const;

  /// Word length |a| with respect to the generators.
  int length(const Element& a) const;
  /// d(a, b) = |a^{-1} b|.
  int distance(const Element& a, const Element& b) const;

  /// B(e, r) in element order. Memoized; throws ResourceError when the ball
  /// would exceed ball_cap().
  std::shared_ptr<const std::vector<Element>> ball_at_identity(int r) const;
  /// B(center, r) = center * B(e, r), in element order.
  std::vector<Element> ball(const Element& center, int r) const;

  std::string format(const Element& x) const;

  friend bool operator==(const Group& a, const Group& b) noexcept {
    return a.kind_ == b.kind_ && a.rank_ == b.rank_ && a.modulus_ == b.modulus_;
  }

 private:
  Group(GroupKind kind, int rank, int modulus, std::size_t ball_cap);
  void check_kind(const Element& x) const;

  GroupKind kind_;
  int rank_;
  int modulus_;
  std::size_t ball_cap_;
  std::vector<Element> gens_;
  std::shared_ptr<detail::BallCache> cache_;
};

}  // namespace schurlab
