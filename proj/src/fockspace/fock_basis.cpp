#include "bhq/fockspace/fock_basis.hpp"

#include <ostream>
#include <string>

#include "bhq/common.hpp"

namespace bhq {

std::optional<std::uint64_t> fock_dimension(int sites, int particles) {
  if (sites < 1 || particles < 0) return std::nullopt;
  // binomial(particles + sites - 1, sites - 1), multiplicative form with exact
  // division at every step.
  unsigned __int128 value = 1;
  const int k = sites - 1;
  for (int i = 1; i <= k; ++i) {
    value = value * static_cast<unsigned __int128>(particles + i) / i;
    if (value > static_cast<unsigned __int128>(UINT64_MAX)) return std::nullopt;
  }
  return static_cast<std::uint64_t>(value);
}

FockBasis::FockBasis(int sites, int particles, std::size_t size)
    : sites_(sites), particles_(particles), size_(size) {}

std::size_t FockBasis::count(int n, int l) const {
  if (n < 0 || l < 1) return 0;
  return counts_[static_cast<std::size_t>(l)][static_cast<std::size_t>(n)];
}

FockBasis FockBasis::build(int sites, int particles, std::size_t dimension_cap) {
  if (sites < 2) throw DomainError("FockBasis: need at least 2 sites, got " + std::to_string(sites));
  if (particles < 1) {
    throw DomainError("FockBasis: need at least 1 particle, got " + std::to_string(particles));
  }
  const auto dim = fock_dimension(sites, particles);
  if (!dim || *dim > dimension_cap) {
    throw SizingError("FockBasis: dimension " + (dim ? std::to_string(*dim) : std::string("> 2^64")) +
                      " for L=" + std::to_string(sites) + ", N=" + std::to_string(particles) +
                      " exceeds the cap " + std::to_string(dimension_cap));
  }

  FockBasis basis(sites, particles, static_cast<std::size_t>(*dim));

  basis.counts_.assign(static_cast<std::size_t>(sites) + 1,
                       std::vector<std::size_t>(static_cast<std::size_t>(particles) + 1, 0));
  for (int l = 1; l <= sites; ++l) {
    for (int n = 0; n <= particles; ++n) {
      basis.counts_[l][n] = static_cast<std::size_t>(*fock_dimension(l, n));
    }
  }

  basis.occupations_.resize(basis.size_ * static_cast<std::size_t>(sites));
  std::vector<Occupation> current(static_cast<std::size_t>(sites), 0);
  current[0] = static_cast<Occupation>(particles);

  // Walk the states in descending lexicographic order: find the rightmost
  // non-final site with particles, move one particle to its right neighbour
  // and gather everything to the right of it there.
  for (std::size_t i = 0; i < basis.size_; ++i) {
    std::copy(current.begin(), current.end(),
              basis.occupations_.begin() + static_cast<std::ptrdiff_t>(i * sites));
    int pivot = sites - 2;
    while (pivot >= 0 && current[pivot] == 0) --pivot;
    if (pivot < 0) break;
    Occupation tail = 0;
    for (int j = pivot + 1; j < sites; ++j) {
      tail += current[j];
      current[j] = 0;
    }
    current[pivot] -= 1;
    current[pivot + 1] = tail + 1;
  }
  return basis;
}

std::optional<std::size_t> FockBasis::index(std::span<const Occupation> occupation) const {
  if (occupation.size() != static_cast<std::size_t>(sites_)) return std::nullopt;
  std::uint64_t total = 0;
  for (auto n : occupation) total += n;
  if (total != static_cast<std::uint64_t>(particles_)) return std::nullopt;

  // States with a larger occupation on the first differing site come first;
  // the number of such states is a hockey-stick sum of Fock dimensions.
  std::size_t rank = 0;
  int remaining = particles_;
  for (int j = 0; j < sites_ - 1; ++j) {
    const int n = static_cast<int>(occupation[j]);
    const int sites_left = sites_ - j;
    rank += count(remaining - n - 1, sites_left);
    remaining -= n;
  }
  return rank;
}

void FockBasis::write_csv(std::ostream& out) const {
  out << "index";
  for (int j = 1; j <= sites_; ++j) out << ", n_" << j;
  out << '\n';
  for (std::size_t i = 0; i < size_; ++i) {
    out << i;
    for (auto n : state(i)) out << ", " << n;
    out << '\n';
  }
}

}  // namespace bhq
