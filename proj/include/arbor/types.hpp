#pragma once

#include <cassert>
#include <cstdint>
#include <bit>

namespace arbor {

using Vertex = int;
using Cost = std::int64_t;
using Value = std::int64_t;
using Length = std::int64_t;

// Sentinel for unreachable pairs in closures. Strictly greater than any budget
// the parser accepts (budgets are validated below kMaxBudget), and small enough
// that sums over a tree's worth of entries never overflow.
inline constexpr Cost kInfeasibleCost = Cost{1} << 50;
inline constexpr Cost kMaxBudget = Cost{1} << 40;
inline constexpr Length kNoDeadline = Length{1} << 50;

// Vertex sets are machine-word bitmasks; everything in this library is sized
// for the quasi-polynomial recursion, which is only usable on small instances.
inline constexpr int kMaxVertices = 64;

class VertexSet {
 public:
  constexpr VertexSet() = default;
  constexpr explicit VertexSet(std::uint64_t bits) : bits_(bits) {}

  static constexpr VertexSet single(Vertex v) { return VertexSet(std::uint64_t{1} << v); }
  static constexpr VertexSet full(int n) {
    return VertexSet(n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
  }

  constexpr bool contains(Vertex v) const { return (bits_ >> v) & 1; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr std::uint64_t bits() const { return bits_; }

  constexpr VertexSet with(Vertex v) const { return VertexSet(bits_ | (std::uint64_t{1} << v)); }
  constexpr VertexSet without(Vertex v) const { return VertexSet(bits_ & ~(std::uint64_t{1} << v)); }

  constexpr VertexSet operator|(VertexSet o) const { return VertexSet(bits_ | o.bits_); }
  constexpr VertexSet operator&(VertexSet o) const { return VertexSet(bits_ & o.bits_); }
  constexpr VertexSet operator-(VertexSet o) const { return VertexSet(bits_ & ~o.bits_); }
  constexpr bool operator==(const VertexSet&) const = default;

  constexpr bool subset_of(VertexSet o) const { return (bits_ & ~o.bits_) == 0; }
  constexpr bool intersects(VertexSet o) const { return (bits_ & o.bits_) != 0; }

  // Iterates members in ascending order.
  class iterator {
   public:
    constexpr explicit iterator(std::uint64_t bits) : bits_(bits) {}
    constexpr Vertex operator*() const { return std::countr_zero(bits_); }
    constexpr iterator& operator++() { bits_ &= bits_ - 1; return *this; }
    constexpr bool operator!=(const iterator& o) const { return bits_ != o.bits_; }
   private:
    std::uint64_t bits_;
  };
  constexpr iterator begin() const { return iterator(bits_); }
  constexpr iterator end() const { return iterator(0); }

 private:
  std::uint64_t bits_ = 0;
};

// All submasks of `mask` in ascending numeric order, starting at the empty set.
class Submasks {
 public:
  constexpr explicit Submasks(VertexSet mask) : mask_(mask.bits()) {}
  class iterator {
   public:
    constexpr iterator(std::uint64_t sub, std::uint64_t mask, bool done)
        : sub_(sub), mask_(mask), done_(done) {}
    constexpr VertexSet operator*() const { return VertexSet(sub_); }
    constexpr iterator& operator++() {
      if (sub_ == mask_) { done_ = true; } else { sub_ = (sub_ - mask_) & mask_; }
      return *this;
    }
    constexpr bool operator!=(const iterator& o) const {
      return done_ != o.done_ || (!done_ && sub_ != o.sub_);
    }
   private:
    std::uint64_t sub_, mask_;
    bool done_;
  };
  constexpr iterator begin() const { return iterator(0, mask_, false); }
  constexpr iterator end() const { return iterator(0, mask_, true); }
 private:
  std::uint64_t mask_;
};

// floor((3/2)^i), saturating well below overflow. The recursion caps |Y| and
// tree sizes with this.
inline std::int64_t three_halves_pow(int i) {
  assert(i >= 0);
  if (i > 60) return std::int64_t{1} << 62;
  unsigned __int128 num = 1;
  for (int k = 0; k < i; ++k) num *= 3;
  num >>= i;
  const unsigned __int128 cap = static_cast<unsigned __int128>(std::int64_t{1} << 62);
  return static_cast<std::int64_t>(num > cap ? cap : num);
}

}  // namespace arbor
