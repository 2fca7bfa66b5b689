#include "batchalloc/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace batchalloc {
namespace {

std::string at_batch(int k) { return " (batch " + std::to_string(k + 1) + ")"; }

ValidationReport bad(std::string message) { return {false, std::move(message)}; }

bool is_integral(double v) { return std::isfinite(v) && v == std::floor(v); }

}  // namespace

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::vwm: return "vwm";
    case Variant::bmatching: return "bmatching";
    case Variant::adwords: return "adwords";
  }
  return "?";
}

ValidationReport validate(const MatchingInstance& instance) {
  if (instance.K < 1) return bad("stage count must be at least 1");
  if (static_cast<int>(instance.stages.size()) != instance.K) {
    return bad("stage list length differs from K");
  }
  for (int j = 0; j < instance.num_offline(); ++j) {
    const OfflineVertex& v = instance.offline[j];
    if (!(v.w >= 0.0) || !std::isfinite(v.w)) {
      return bad("negative weight at offline " + std::to_string(j));
    }
    switch (instance.variant) {
      case Variant::vwm:
        if (v.B != 1.0) return bad("non-unit capacity at offline " + std::to_string(j));
        break;
      case Variant::bmatching:
        if (!is_integral(v.B) || v.B < 1.0) {
          return bad("capacity must be a positive integer at offline " + std::to_string(j));
        }
        break;
      case Variant::adwords:
        if (!(v.B > 0.0) || !std::isfinite(v.B)) {
          return bad("budget must be positive at offline " + std::to_string(j));
        }
        break;
    }
  }
  for (int k = 0; k < instance.K; ++k) {
    if (instance.stages[k].empty()) return bad("empty batch" + at_batch(k));
    for (std::size_t i = 0; i < instance.stages[k].size(); ++i) {
      for (const Edge& e : instance.stages[k][i].edges) {
        if (e.j < 0 || e.j >= instance.num_offline()) {
          return bad("edge endpoint out of range" + at_batch(k) + " online " + std::to_string(i));
        }
        if (instance.variant == Variant::adwords) {
          if (!(e.b >= 0.0 && e.b <= 1.0)) {
            return bad("bid outside [0,1]" + at_batch(k) + " online " + std::to_string(i));
          }
        } else if (e.b != 1.0) {
          return bad("non-unit bid on a non-budgeted variant" + at_batch(k));
        }
      }
    }
  }
  return {};
}

ValidationReport validate(const McaInstance& instance) {
  if (instance.K < 1) return bad("stage count must be at least 1");
  if (static_cast<int>(instance.stages.size()) != instance.K) {
    return bad("stage list length differs from K");
  }
  for (int j = 0; j < instance.num_advertisers(); ++j) {
    double n = instance.advertisers[j].n;
    if (!is_integral(n) || n < 1.0) {
      // Normalized instances carry n = 1, which stays integral.
      return bad("demand must be a positive integer at advertiser " + std::to_string(j));
    }
  }
  double prev = 0.0;
  for (int t = 0; t < instance.num_levels(); ++t) {
    double p = instance.prices[t];
    if (!(p > prev) || !std::isfinite(p)) {
      return bad("price universe must be strictly increasing and positive (level " +
                 std::to_string(t + 1) + ")");
    }
    prev = p;
  }
  for (int k = 0; k < instance.K; ++k) {
    if (instance.stages[k].empty()) return bad("empty batch" + at_batch(k));
    for (std::size_t i = 0; i < instance.stages[k].size(); ++i) {
      for (const McaConfig& cfg : instance.stages[k][i].configs) {
        for (const McaAlloc& a : cfg.alloc) {
          std::string where = at_batch(k) + " user " + std::to_string(i);
          if (a.j < 0 || a.j >= instance.num_advertisers()) {
            return bad("advertiser index out of range" + where);
          }
          if (a.tau < 1 || a.tau > instance.num_levels()) {
            return bad("off-universe price level" + where);
          }
          if (!(a.xi >= 0.0) || !std::isfinite(a.xi)) {
            return bad("negative impression count" + where);
          }
          if (a.xi > instance.advertisers[a.j].n) {
            return bad("impression count exceeds demand" + where);
          }
        }
      }
    }
  }
  return {};
}

ValidationReport validate(const Instance& instance) {
  return std::visit([](const auto& inner) { return validate(inner); }, instance);
}

McaInstance normalize_mca(const McaInstance& instance) {
  ValidationReport report = validate(instance);
  if (!report.ok) throw std::invalid_argument("invalid-argument: " + report.error);
  bool unit = true;
  for (const auto& adv : instance.advertisers) unit = unit && adv.n == 1.0;
  if (unit) return instance;

  // Scaled price n_j * price(tau) for every (advertiser, level) pair in use,
  // merged into one strictly increasing universe.
  std::map<double, int> universe;  // scaled price -> new 1-based level
  for (const auto& stage : instance.stages) {
    for (const auto& user : stage) {
      for (const auto& cfg : user.configs) {
        for (const auto& a : cfg.alloc) {
          universe.emplace(instance.advertisers[a.j].n * instance.price(a.tau), 0);
        }
      }
    }
  }
  int next = 1;
  for (auto& [price, index] : universe) index = next++;

  McaInstance out;
  out.K = instance.K;
  out.advertisers.assign(instance.advertisers.size(), McaAdvertiser{1.0});
  out.prices.reserve(universe.size());
  for (const auto& [price, index] : universe) out.prices.push_back(price);
  out.stages.resize(instance.stages.size());
  for (std::size_t k = 0; k < instance.stages.size(); ++k) {
    out.stages[k].reserve(instance.stages[k].size());
    for (const auto& user : instance.stages[k]) {
      McaUser nu;
      nu.configs.reserve(user.configs.size());
      for (const auto& cfg : user.configs) {
        McaConfig nc;
        nc.alloc.reserve(cfg.alloc.size());
        for (const auto& a : cfg.alloc) {
          double n = instance.advertisers[a.j].n;
          McaAlloc na;
          na.j = a.j;
          na.xi = a.xi / n;
          na.tau = universe.at(n * instance.price(a.tau));
          nc.alloc.push_back(na);
        }
        nu.configs.push_back(nc);
      }
      out.stages[k].push_back(std::move(nu));
    }
  }
  return out;
}

}  // namespace batchalloc
