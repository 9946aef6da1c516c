#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace bhq {

using Occupation = std::uint32_t;

inline constexpr std::size_t kDefaultDimensionCap = 2'000'000;

/// Occupation-number basis of N bosons on L sites.
///
/// States are stored in lexicographically descending order of the
/// occupation vectors, so for L=2, N=3 the order is (3,0), (2,1), (1,2), (0,3).
/// The ordering is frozen; CSV dumps and golden values depend on it.
class FockBasis {
 public:
  /// Throws SizingError when binomial(N+L-1, L-1) exceeds `dimension_cap`.
  static FockBasis build(int sites, int particles,
                         std::size_t dimension_cap = kDefaultDimensionCap);

  int sites() const { return sites_; }
  int particles() const { return particles_; }
  std::size_t size() const { return size_; }

  std::span<const Occupation> state(std::size_t i) const {
    return {occupations_.data() + i * static_cast<std::size_t>(sites_),
            static_cast<std::size_t>(sites_)};
  }

  /// Dense index of an occupation vector; nullopt if it is not in the basis.
  std::optional<std::size_t> index(std::span<const Occupation> occupation) const;

  /// Diagnostic dump: `index, n_1, ..., n_L`.
  void write_csv(std::ostream& out) const;

 private:
  FockBasis(int sites, int particles, std::size_t size);

  // Number of ways to put `n` bosons on `l` sites.
  std::size_t count(int n, int l) const;

  int sites_;
  int particles_;
  std::size_t size_;
  std::vector<Occupation> occupations_;
  // counts_[l][n] = binomial(n+l-1, l-1)
  std::vector<std::vector<std::size_t>> counts_;
};

/// binomial(N+L-1, L-1) computed without overflow for the sizes we care
/// about; returns nullopt when the value does not fit in 64 bits.
std::optional<std::uint64_t> fock_dimension(int sites, int particles);

}  // namespace bhq
