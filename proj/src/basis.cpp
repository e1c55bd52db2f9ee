#include "spinbus/basis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "spinbus/errors.hpp"

namespace spinbus {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / i;
  return r;
}

SectorBasis::SectorBasis(int n_sites, int n_up) : n_sites_(n_sites), n_up_(n_up) {
  if (n_sites < 1 || n_sites > kMaxSites)
    throw InvalidArgument("n_sites must be in [1, " + std::to_string(kMaxSites) + "]");
  if (n_up < 0 || n_up > n_sites) throw InvalidArgument("n_up out of range");

  states_.reserve(binomial(n_sites, n_up));
  if (n_up == 0) {
    states_.push_back(0);
    return;
  }
  // Gosper's hack: next larger integer with the same popcount.
  const std::uint64_t limit = std::uint64_t{1} << n_sites;
  std::uint64_t s = (std::uint64_t{1} << n_up) - 1;
  while (s < limit) {
    states_.push_back(static_cast<BasisState>(s));
    const std::uint64_t c = s & (~s + 1);
    const std::uint64_t r = s + c;
    s = (((r ^ s) >> 2) / c) | r;
  }
}

std::optional<std::size_t> SectorBasis::find(BasisState s) const noexcept {
  if (std::popcount(s) != n_up_ || (n_sites_ < 32 && (s >> n_sites_) != 0)) return std::nullopt;
  const auto it = std::lower_bound(states_.begin(), states_.end(), s);
  if (it == states_.end() || *it != s) return std::nullopt;
  return static_cast<std::size_t>(it - states_.begin());
}

std::size_t SectorBasis::index_of(BasisState s) const {
  if (auto i = find(s)) return *i;
  throw NotInSector("state " + std::to_string(s) + " is not in sector n_up=" +
                    std::to_string(n_up_));
}

SectorBasis enumerate_sector(int n_sites, int n_up) { return SectorBasis(n_sites, n_up); }

SectorBasis sector_of_total_sz(int n_sites, double total_sz) {
  const double up = 0.5 * n_sites + total_sz;
  const double rounded = std::round(up);
  if (std::abs(up - rounded) > 1e-12 || rounded < 0 || rounded > n_sites)
    throw InvalidArgument("total S^z not reachable with " + std::to_string(n_sites) + " sites");
  return SectorBasis(n_sites, static_cast<int>(rounded));
}

}  // namespace spinbus
