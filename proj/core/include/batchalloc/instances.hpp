#pragma once

#include <cstdint>
#include <string>

#include "batchalloc/model.hpp"

namespace batchalloc {

// --- JSON ------------------------------------------------------------------
// Canonical serialization: field names and order are fixed, unknown fields
// are rejected on input, and serialize -> parse -> serialize is
// byte-identical.

std::string to_json(const MatchingInstance& instance);
std::string to_json(const McaInstance& instance);
std::string to_json(const Instance& instance);
Instance instance_from_json(const std::string& text);  // throws invalid_argument

// --- Generators ------------------------------------------------------------

// Unit-weight worst-case construction: batch sizes decay geometrically, each
// batch k < K sees the K*|U_k| lowest-ranked offline vertices under a seeded
// uniform permutation and the last batch sees the |U_K| lowest-ranked ones.
// A perfect matching always exists, so the offline optimum equals the number
// of offline vertices (K*N).
MatchingInstance gen_tightness(int K, int N, std::uint64_t seed);

// Second-price auction ensemble: every configuration allocates one impression
// to the highest-value advertiser among a sampled candidate pool, priced at
// the runner-up's value.
struct AuctionSpec {
  int advertisers = 20;
  int users = 100;
  int demand = 5;                 // n_j, identical across advertisers
  int levels = 20;                // price universe size T
  int configs_per_user = 5;
  int advertisers_per_config = 3;
  bool symmetric = true;          // false: user i draws from the top pool only
  int K = 2;
  std::uint64_t seed = 0;
};
McaInstance gen_auction(const AuctionSpec& spec);

// Embeds a unit-capacity instance into the auction model: one configuration
// per edge granting a single impression at the offline weight's price level.
// Zero-weight edges are dropped (they cannot contribute revenue).
McaInstance to_mca(const MatchingInstance& instance);

// Seeded test-battery generator; output always passes validation.
struct RandomShape {
  std::string kind = "vwm";       // vwm | bmatching | adwords | mca
  int K = 2;
  int online_per_stage = 4;       // users per stage for mca
  int offline = 4;                // advertisers for mca
  double density = 0.7;           // edge / candidate membership probability
  double max_weight = 5.0;        // weight / price scale
  bool unit_weights = false;      // force all weights to 1 (vwm only)
  int capacity_min = 1;           // bmatching capacity or adwords budget range
  int capacity_max = 1;
  int levels = 4;                 // price universe size (mca)
  int configs_per_user = 3;       // mca
  int allocs_per_config = 2;      // mca
  int max_demand = 1;             // mca demands drawn from [1, max_demand]
};
Instance gen_random(const RandomShape& shape, std::uint64_t seed);

}  // namespace batchalloc
