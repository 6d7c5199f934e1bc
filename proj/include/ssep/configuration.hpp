#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "ssep/error.hpp"

namespace ssep {

/// Particle configuration eta in {0,1}^{n-1}, bit-packed. Sites are 1-based (x in 1..n-1).
class Configuration {
 public:
  explicit Configuration(int sites) : sites_(sites), words_((static_cast<std::size_t>(sites) + 63) / 64, 0) {
    require(sites >= 1, ErrorKind::Domain, "configuration needs at least one site");
  }
  /// Bit x-1 of `index` is eta(x); requires at most 64 sites.
  static Configuration from_index(int sites, std::uint64_t index) {
    require(sites <= 64, ErrorKind::Size, "index form needs at most 64 sites");
    Configuration c(sites);
    c.words_[0] = sites == 64 ? index : index & ((std::uint64_t{1} << sites) - 1);
    return c;
  }
  std::uint64_t index() const {
    require(sites_ <= 64, ErrorKind::Size, "index form needs at most 64 sites");
    return words_[0];
  }

  int sites() const { return sites_; }
  bool operator[](int x) const { return (words_[word(x)] >> bit(x)) & 1; }
  void set(int x, bool v) {
    const auto mask = std::uint64_t{1} << bit(x);
    words_[word(x)] = v ? words_[word(x)] | mask : words_[word(x)] & ~mask;
  }
  void flip(int x) { words_[word(x)] ^= std::uint64_t{1} << bit(x); }
  void swap(int x, int y) {
    const bool a = (*this)[x], b = (*this)[y];
    if (a != b) flip(x), flip(y);
  }
  int particles() const {
    int c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
  }
  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  static std::size_t word(int x) { return static_cast<std::size_t>(x - 1) / 64; }
  static int bit(int x) { return (x - 1) % 64; }

  int sites_;
  std::vector<std::uint64_t> words_;
};

}  // namespace ssep
