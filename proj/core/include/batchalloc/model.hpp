#pragma once

#include <string>
#include <variant>
#include <vector>

namespace batchalloc {

// ---------------------------------------------------------------------------
// Matching-side model: K batches of online vertices arrive against a fixed
// set of offline vertices.  Three variants share the shape:
//   vwm        unit capacities, per-offline weight, unit "bids"
//   bmatching  integer capacities B_j >= 1, per-offline weight
//   adwords    per-offline budget B_j > 0, per-edge bid in [0,1]
// ---------------------------------------------------------------------------

enum class Variant { vwm, bmatching, adwords };

std::string variant_name(Variant v);

struct Edge {
  int j = 0;       // offline index
  double b = 1.0;  // bid (adwords); fixed at 1 otherwise
};

struct OnlineVertex {
  std::vector<Edge> edges;
};

struct OfflineVertex {
  double w = 0.0;  // weight (vwm / bmatching); unused for adwords
  double B = 1.0;  // capacity (integer for bmatching) or budget (adwords)
};

struct MatchingInstance {
  Variant variant = Variant::vwm;
  int K = 1;
  std::vector<OfflineVertex> offline;
  std::vector<std::vector<OnlineVertex>> stages;  // exactly K batches

  int num_offline() const { return static_cast<int>(offline.size()); }
  int num_online() const {
    int n = 0;
    for (const auto& s : stages) n += static_cast<int>(s.size());
    return n;
  }
};

// ---------------------------------------------------------------------------
// Auction-side model: K batches of users; each user offers a menu of
// configurations; a configuration hands xi impressions to advertiser j at
// price-universe level tau.  Levels are 1-based into `prices` (level 0 is the
// implicit zero price).
// ---------------------------------------------------------------------------

struct McaAlloc {
  int j = 0;        // advertiser index
  double xi = 0.0;  // impression count, 0 <= xi <= n_j
  int tau = 1;      // price level in [1, T]
};

struct McaConfig {
  std::vector<McaAlloc> alloc;
};

struct McaUser {
  std::vector<McaConfig> configs;
};

struct McaAdvertiser {
  double n = 1.0;  // demand; integral on input, 1 after normalize_mca
};

struct McaInstance {
  int K = 1;
  std::vector<McaAdvertiser> advertisers;
  std::vector<double> prices;  // strictly increasing, all > 0
  std::vector<std::vector<McaUser>> stages;  // exactly K batches

  int num_advertisers() const { return static_cast<int>(advertisers.size()); }
  int num_levels() const { return static_cast<int>(prices.size()); }
  int num_users() const {
    int n = 0;
    for (const auto& s : stages) n += static_cast<int>(s.size());
    return n;
  }
  double price(int tau) const { return tau <= 0 ? 0.0 : prices[tau - 1]; }
};

using Instance = std::variant<MatchingInstance, McaInstance>;

// ---------------------------------------------------------------------------

struct ValidationReport {
  bool ok = true;
  std::string error;  // first violated invariant, with location
};

ValidationReport validate(const MatchingInstance& instance);
ValidationReport validate(const McaInstance& instance);
ValidationReport validate(const Instance& instance);

// Rescales demands to 1: xi -> xi / n_j and every price level used by
// advertiser j maps to n_j * price, merged into a fresh shared universe.
// Objective values of allocations are preserved exactly.
McaInstance normalize_mca(const McaInstance& instance);

}  // namespace batchalloc
