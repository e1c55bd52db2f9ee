#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace spinbus {

/// Product state; bit k set means site k is up (S^z = +1/2).
using BasisState = std::uint32_t;

inline constexpr int kMaxSites = 30;

/// All product states of `n_sites` spins with exactly `n_up` up spins, in
/// ascending bit order. The position in that order is the vector index used
/// everywhere else.
class SectorBasis {
 public:
  SectorBasis(int n_sites, int n_up);

  int n_sites() const { return n_sites_; }
  int n_up() const { return n_up_; }
  /// Twice the total S^z of the sector.
  int twice_sz() const { return 2 * n_up_ - n_sites_; }
  double total_sz() const { return 0.5 * twice_sz(); }

  std::size_t size() const { return states_.size(); }
  const std::vector<BasisState>& states() const { return states_; }
  BasisState operator[](std::size_t i) const { return states_[i]; }

  /// Position of `s`; throws NotInSector when the popcount is wrong or the
  /// state has bits beyond n_sites.
  std::size_t index_of(BasisState s) const;

  /// Non-throwing lookup.
  std::optional<std::size_t> find(BasisState s) const noexcept;

 private:
  int n_sites_;
  int n_up_;
  std::vector<BasisState> states_;
};

SectorBasis enumerate_sector(int n_sites, int n_up);

/// Sector with n_up = n_sites/2 + total_sz; total_sz must be a reachable
/// half-integer.
SectorBasis sector_of_total_sz(int n_sites, double total_sz);

/// Binomial coefficient as an exact 64-bit count.
std::uint64_t binomial(int n, int k);

}  // namespace spinbus
