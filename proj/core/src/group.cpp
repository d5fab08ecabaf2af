#include "schurlab/group.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <map>
#include <mutex>
#include <unordered_set>

#include "schurlab/errors.hpp"
#include "schurlab/rng.hpp"

namespace schurlab {

std::strong_ordering operator<=>(const Element& a, const Element& b) noexcept {
  if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
  if (a.data_.size() != b.data_.size()) return a.data_.size() <=> b.data_.size();
  for (std::size_t i = 0; i < a.data_.size(); ++i) {
    if (a.data_[i] != b.data_[i]) return a.data_[i] <=> b.data_[i];
  }
  return std::strong_ordering::equal;
}

std::size_t ElementHash::operator()(const Element& x) const noexcept {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(x.kind()) + 0x51ed27);
  for (auto v : x.data()) {
    h = mix64(h ^ static_cast<std::uint32_t>(v));
  }
  return static_cast<std::size_t>(h);
}

namespace detail {

// BFS layers of the Cayley graph around the identity, grown on demand.
struct BallCache {
  std::mutex mutex;
  std::vector<std::vector<Element>> spheres;
  std::unordered_set<Element, ElementHash> seen;
  std::size_t total = 0;
  std::map<int, std::shared_ptr<const std::vector<Element>>> balls;
};

}  // namespace detail

Group::Group(GroupKind kind, int rank, int modulus, std::size_t ball_cap)
    : kind_(kind),
      rank_(rank),
      modulus_(modulus),
      ball_cap_(ball_cap),
      cache_(std::make_shared<detail::BallCache>()) {
  switch (kind_) {
    case GroupKind::ZD:
      for (int i = 0; i < rank_; ++i) {
        std::vector<std::int32_t> plus(rank_, 0), minus(rank_, 0);
        plus[i] = 1;
        minus[i] = -1;
        gens_.emplace_back(kind_, std::move(plus));
        gens_.emplace_back(kind_, std::move(minus));
      }
      break;
    case GroupKind::Free:
      for (int code = 0; code < 2 * rank_; ++code) {
        gens_.emplace_back(kind_, std::vector<std::int32_t>{code});
      }
      break;
    case GroupKind::Cyclic:
      if (modulus_ >= 2) gens_.emplace_back(kind_, std::vector<std::int32_t>{1});
      if (modulus_ >= 3) {
        gens_.emplace_back(kind_, std::vector<std::int32_t>{modulus_ - 1});
      }
      break;
  }
  std::sort(gens_.begin(), gens_.end());
}

Group Group::zd(int dim, std::size_t ball_cap) {
  if (dim < 1 || dim > 16) throw ValidationError("Z^d needs 1 <= d <= 16");
  return Group(GroupKind::ZD, dim, 0, ball_cap);
}

Group Group::free(int rank, std::size_t ball_cap) {
  // Letters a..d; 'e' is reserved for the identity in the string form.
  if (rank < 1 || rank > 4) throw ValidationError("F_k needs 1 <= k <= 4");
  return Group(GroupKind::Free, rank, 0, ball_cap);
}

Group Group::cyclic(int modulus, std::size_t ball_cap) {
  if (modulus < 1) throw ValidationError("Z/mZ needs m >= 1");
  return Group(GroupKind::Cyclic, 1, modulus, ball_cap);
}

Group Group::parse(std::string_view spec, std::size_t ball_cap) {
  if (spec.size() < 2) {
    throw ValidationError("unrecognized group spec '" + std::string(spec) + "'");
  }
  int value = 0;
  const char* first = spec.data() + 1;
  const char* last = spec.data() + spec.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ValidationError("unrecognized group spec '" + std::string(spec) + "'");
  }
  switch (spec[0]) {
    case 'Z': return zd(value, ball_cap);
    case 'F': return free(value, ball_cap);
    case 'C': return cyclic(value, ball_cap);
    default: break;
  }
  throw ValidationError("unrecognized group spec '" + std::string(spec) + "'");
}

std::string Group::spec() const {
  switch (kind_) {
    case GroupKind::ZD: return "Z" + std::to_string(rank_);
    case GroupKind::Free: return "F" + std::to_string(rank_);
    case GroupKind::Cyclic: return "C" + std::to_string(modulus_);
  }
  return {};
}

Element Group::identity() const {
  switch (kind_) {
    case GroupKind::ZD: return Element(kind_, std::vector<std::int32_t>(rank_, 0));
    case GroupKind::Free: return Element(kind_, {});
    case GroupKind::Cyclic: return Element(kind_, {0});
  }
  return {};
}

Element Group::coords(std::vector<std::int32_t> xs) const {
  if (kind_ != GroupKind::ZD) throw ValidationError("coords() needs a Z^d group");
  if (static_cast<int>(xs.size()) != rank_) {
    throw ValidationError("coordinate vector has wrong dimension for " + spec());
  }
  return Element(kind_, std::move(xs));
}

Element Group::word(std::string_view letters) const {
  if (kind_ != GroupKind::Free) throw ValidationError("word() needs a free group");
  std::vector<std::int32_t> out;
  std::string_view trimmed = letters;
  while (!trimmed.empty() && trimmed.front() == ' ') trimmed.remove_prefix(1);
  while (!trimmed.empty() && trimmed.back() == ' ') trimmed.remove_suffix(1);
  if (trimmed == "e") return identity();
  for (char c : trimmed) {
    if (c == ' ') continue;
    std::int32_t code = -1;
    if (c >= 'a' && c < 'a' + rank_) code = 2 * (c - 'a');
    if (c >= 'A' && c < 'A' + rank_) code = 2 * (c - 'A') + 1;
    if (code < 0) {
      throw ValidationError("letter '" + std::string(1, c) + "' is not a generator of " +
                            spec());
    }
    if (!out.empty() && out.back() == (code ^ 1)) {
      out.pop_back();
    } else {
      out.push_back(code);
    }
  }
  return Element(kind_, std::move(out));
}

Element Group::residue(std::int64_t r) const {
  if (kind_ != GroupKind::Cyclic) throw ValidationError("residue() needs a cyclic group");
  std::int64_t v = r % modulus_;
  if (v < 0) v += modulus_;
  return Element(kind_, {static_cast<std::int32_t>(v)});
}

bool Group::is_valid(const Element& x) const noexcept {
  if (x.kind() != kind_) return false;
  auto d = x.data();
  switch (kind_) {
    case GroupKind::ZD: return static_cast<int>(d.size()) == rank_;
    case GroupKind::Free:
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] < 0 || d[i] >= 2 * rank_) return false;
        if (i > 0 && d[i] == (d[i - 1] ^ 1)) return false;
      }
      return true;
    case GroupKind::Cyclic: return d.size() == 1 && d[0] >= 0 && d[0] < modulus_;
  }
  return false;
}

void Group::validate(const Element& x) const {
  if (!is_valid(x)) {
    throw ValidationError("element is not a canonical element of " + spec());
  }
}

void Group::check_kind(const Element& x) const {
  if (x.kind() != kind_) {
    throw ValidationError("element kind does not match group " + spec());
  }
  if (kind_ == GroupKind::ZD && static_cast<int>(x.size()) != rank_) {
    throw ValidationError("element dimension does not match group " + spec());
  }
}

Element Group::mul(const Element& a, const Element& b) const {
  check_kind(a);
  check_kind(b);
  switch (kind_) {
    case GroupKind::ZD: {
      std::vector<std::int32_t> out(a.data().begin(), a.data().end());
      for (int i = 0; i < rank_; ++i) out[i] += b[i];
      return Element(kind_, std::move(out));
    }
    case GroupKind::Free: {
      std::vector<std::int32_t> out(a.data().begin(), a.data().end());
      for (auto code : b.data()) {
        if (!out.empty() && out.back() == (code ^ 1)) {
          out.pop_back();
        } else {
          out.push_back(code);
        }
      }
      return Element(kind_, std::move(out));
    }
    case GroupKind::Cyclic: {
      std::int64_t v = (static_cast<std::int64_t>(a[0]) + b[0]) % modulus_;
      return Element(kind_, {static_cast<std::int32_t>(v)});
    }
  }
  return {};
}

Element Group::inv(const Element& a) const {
  check_kind(a);
  switch (kind_) {
    case GroupKind::ZD: {
      std::vector<std::int32_t> out(a.data().begin(), a.data().end());
      for (auto& v : out) v = -v;
      return Element(kind_, std::move(out));
    }
    case GroupKind::Free: {
      std::vector<std::int32_t> out(a.data().rbegin(), a.data().rend());
      for (auto& code : out) code ^= 1;
      return Element(kind_, std::move(out));
    }
    case GroupKind::Cyclic:
      return Element(kind_, {a[0] == 0 ? 0 : modulus_ - a[0]});
  }
  return {};
}

int Group::length(const Element& a) const {
  check_kind(a);
  switch (kind_) {
    case GroupKind::ZD: {
      int total = 0;
      for (auto v : a.data()) total += std::abs(v);
      return total;
    }
    case GroupKind::Free: return static_cast<int>(a.size());
    case GroupKind::Cyclic: return std::min(a[0], modulus_ - a[0]);
  }
  return 0;
}

int Group::distance(const Element& a, const Element& b) const {
  return length(mul(inv(a), b));
}

std::shared_ptr<const std::vector<Element>> Group::ball_at_identity(int r) const {
  if (r < 0) throw ValidationError("ball radius must be nonnegative");
  auto& cache = *cache_;
  std::lock_guard lock(cache.mutex);
  if (auto it = cache.balls.find(r); it != cache.balls.end()) return it->second;

  if (cache.spheres.empty()) {
    cache.spheres.push_back({identity()});
    cache.seen.insert(identity());
    cache.total = 1;
  }
  while (static_cast<int>(cache.spheres.size()) <= r) {
    std::vector<Element> next;
    std::unordered_set<Element, ElementHash> fresh;
    for (const auto& x : cache.spheres.back()) {
      for (const auto& s : gens_) {
        Element y = mul(x, s);
        if (cache.seen.contains(y) || fresh.contains(y)) continue;
        fresh.insert(y);
        next.push_back(std::move(y));
        if (cache.total + next.size() > ball_cap_) {
          throw ResourceError("ball B(e," + std::to_string(r) + ") in " + spec() +
                              " exceeds the cap of " + std::to_string(ball_cap_) +
                              " elements");
        }
      }
    }
    cache.total += next.size();
    cache.seen.insert(next.begin(), next.end());
    cache.spheres.push_back(std::move(next));
  }

  auto ball = std::make_shared<std::vector<Element>>();
  for (int j = 0; j <= r; ++j) {
    ball->insert(ball->end(), cache.spheres[j].begin(), cache.spheres[j].end());
  }
  std::sort(ball->begin(), ball->end());
  cache.balls.emplace(r, ball);
  return ball;
}

std::vector<Element> Group::ball(const Element& center, int r) const {
  check_kind(center);
  auto base = ball_at_identity(r);
  std::vector<Element> out;
  out.reserve(base->size());
  for (const auto& u : *base) out.push_back(mul(center, u));
  std::sort(out.begin(), out.end());
  return out;
}

std::string Group::format(const Element& x) const {
  check_kind(x);
  switch (kind_) {
    case GroupKind::ZD: {
      std::string s = "[";
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(x[i]);
      }
      return s + "]";
    }
    case GroupKind::Free: {
      if (x.size() == 0) return "e";
      std::string s;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) s += ' ';
        char base = (x[i] & 1) ? 'A' : 'a';
        s += static_cast<char>(base + x[i] / 2);
      }
      return s;
    }
    case GroupKind::Cyclic: return std::to_string(x[0]);
  }
  return {};
}

}  // namespace schurlab
