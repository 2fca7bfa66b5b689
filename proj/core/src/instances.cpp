#include "batchalloc/instances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string_view>
#include <utility>

#include "batchalloc/rng.hpp"
#include "json.hpp"

namespace batchalloc {
namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void reject(const std::string& why) {
  throw std::invalid_argument("invalid-argument: " + why);
}

void require_keys(const ordered_json& obj, std::initializer_list<std::string_view> allowed,
                  const char* where) {
  if (!obj.is_object()) reject(std::string(where) + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (std::string_view a : allowed) known = known || key == a;
    if (!known) reject("unknown field \"" + key + "\" in " + where);
  }
}

const ordered_json& field(const ordered_json& obj, const char* name, const char* where) {
  auto it = obj.find(name);
  if (it == obj.end()) reject(std::string("missing field \"") + name + "\" in " + where);
  return *it;
}

long long get_int(const ordered_json& obj, const char* name, const char* where) {
  const ordered_json& v = field(obj, name, where);
  if (!v.is_number_integer()) reject(std::string("field \"") + name + "\" must be an integer");
  return v.get<long long>();
}

double get_real(const ordered_json& obj, const char* name, const char* where) {
  const ordered_json& v = field(obj, name, where);
  if (!v.is_number()) reject(std::string("field \"") + name + "\" must be a number");
  return v.get<double>();
}

const ordered_json& get_array(const ordered_json& obj, const char* name, const char* where) {
  const ordered_json& v = field(obj, name, where);
  if (!v.is_array()) reject(std::string("field \"") + name + "\" must be an array");
  return v;
}

MatchingInstance parse_matching(const ordered_json& root, Variant variant) {
  require_keys(root, {"kind", "K", "offline", "stages"}, "instance");
  MatchingInstance out;
  out.variant = variant;
  out.K = static_cast<int>(get_int(root, "K", "instance"));
  for (const ordered_json& v : get_array(root, "offline", "instance")) {
    require_keys(v, {"w", "B"}, "offline vertex");
    OfflineVertex vertex;
    vertex.w = get_real(v, "w", "offline vertex");
    vertex.B = get_real(v, "B", "offline vertex");
    out.offline.push_back(vertex);
  }
  for (const ordered_json& stage : get_array(root, "stages", "instance")) {
    if (!stage.is_array()) reject("each stage must be an array of online vertices");
    std::vector<OnlineVertex> batch;
    for (const ordered_json& online : stage) {
      require_keys(online, {"edges"}, "online vertex");
      OnlineVertex vertex;
      for (const ordered_json& e : get_array(online, "edges", "online vertex")) {
        require_keys(e, {"j", "b"}, "edge");
        Edge edge;
        edge.j = static_cast<int>(get_int(e, "j", "edge"));
        if (variant == Variant::adwords) {
          edge.b = get_real(e, "b", "edge");
        } else if (e.contains("b")) {
          edge.b = get_real(e, "b", "edge");
        }
        vertex.edges.push_back(edge);
      }
      batch.push_back(std::move(vertex));
    }
    out.stages.push_back(std::move(batch));
  }
  return out;
}

McaInstance parse_mca(const ordered_json& root) {
  require_keys(root, {"kind", "K", "advertisers", "prices", "stages"}, "instance");
  McaInstance out;
  out.K = static_cast<int>(get_int(root, "K", "instance"));
  for (const ordered_json& a : get_array(root, "advertisers", "instance")) {
    require_keys(a, {"n"}, "advertiser");
    out.advertisers.push_back({static_cast<double>(get_int(a, "n", "advertiser"))});
  }
  for (const ordered_json& p : get_array(root, "prices", "instance")) {
    if (!p.is_number()) reject("prices must be numbers");
    out.prices.push_back(p.get<double>());
  }
  for (const ordered_json& stage : get_array(root, "stages", "instance")) {
    if (!stage.is_array()) reject("each stage must be an array of users");
    std::vector<McaUser> batch;
    for (const ordered_json& u : stage) {
      require_keys(u, {"configs"}, "user");
      McaUser user;
      for (const ordered_json& c : get_array(u, "configs", "user")) {
        require_keys(c, {"alloc"}, "config");
        McaConfig config;
        for (const ordered_json& a : get_array(c, "alloc", "config")) {
          require_keys(a, {"j", "xi", "tau"}, "alloc");
          McaAlloc alloc;
          alloc.j = static_cast<int>(get_int(a, "j", "alloc"));
          alloc.xi = get_real(a, "xi", "alloc");
          alloc.tau = static_cast<int>(get_int(a, "tau", "alloc"));
          config.alloc.push_back(alloc);
        }
        user.configs.push_back(std::move(config));
      }
      batch.push_back(std::move(user));
    }
    out.stages.push_back(std::move(batch));
  }
  return out;
}

}  // namespace

std::string to_json(const MatchingInstance& instance) {
  ordered_json root;
  root["kind"] = variant_name(instance.variant);
  root["K"] = instance.K;
  ordered_json offline = ordered_json::array();
  for (const OfflineVertex& v : instance.offline) {
    offline.push_back({{"w", v.w}, {"B", v.B}});
  }
  root["offline"] = std::move(offline);
  ordered_json stages = ordered_json::array();
  for (const auto& stage : instance.stages) {
    ordered_json batch = ordered_json::array();
    for (const OnlineVertex& online : stage) {
      ordered_json edges = ordered_json::array();
      for (const Edge& e : online.edges) {
        if (instance.variant == Variant::adwords) {
          edges.push_back({{"j", e.j}, {"b", e.b}});
        } else {
          edges.push_back({{"j", e.j}});
        }
      }
      batch.push_back({{"edges", std::move(edges)}});
    }
    stages.push_back(std::move(batch));
  }
  root["stages"] = std::move(stages);
  return root.dump();
}

std::string to_json(const McaInstance& instance) {
  ordered_json root;
  root["kind"] = "mca";
  root["K"] = instance.K;
  ordered_json advertisers = ordered_json::array();
  for (const McaAdvertiser& a : instance.advertisers) {
    advertisers.push_back({{"n", static_cast<long long>(std::llround(a.n))}});
  }
  root["advertisers"] = std::move(advertisers);
  root["prices"] = instance.prices;
  ordered_json stages = ordered_json::array();
  for (const auto& stage : instance.stages) {
    ordered_json batch = ordered_json::array();
    for (const McaUser& user : stage) {
      ordered_json configs = ordered_json::array();
      for (const McaConfig& c : user.configs) {
        ordered_json alloc = ordered_json::array();
        for (const McaAlloc& a : c.alloc) {
          alloc.push_back({{"j", a.j}, {"xi", a.xi}, {"tau", a.tau}});
        }
        configs.push_back({{"alloc", std::move(alloc)}});
      }
      batch.push_back({{"configs", std::move(configs)}});
    }
    stages.push_back(std::move(batch));
  }
  root["stages"] = std::move(stages);
  return root.dump();
}

std::string to_json(const Instance& instance) {
  return std::visit([](const auto& inner) { return to_json(inner); }, instance);
}

Instance instance_from_json(const std::string& text) {
  ordered_json root;
  try {
    root = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    reject(std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) reject("top level must be an object");
  auto kind_it = root.find("kind");
  if (kind_it == root.end() || !kind_it->is_string()) reject("missing \"kind\"");
  std::string kind = kind_it->get<std::string>();
  Instance out;
  if (kind == "vwm") {
    out = parse_matching(root, Variant::vwm);
  } else if (kind == "bmatching") {
    out = parse_matching(root, Variant::bmatching);
  } else if (kind == "adwords") {
    out = parse_matching(root, Variant::adwords);
  } else if (kind == "mca") {
    out = parse_mca(root);
  } else {
    reject("unknown kind \"" + kind + "\"");
  }
  ValidationReport report = validate(out);
  if (!report.ok) reject(report.error);
  // Non-budgeted variants admit an explicit unit bid on input but the
  // canonical form drops it; validation has already pinned b to 1 there.
  return out;
}

MatchingInstance gen_tightness(int K, int N, std::uint64_t seed) {
  if (K < 1 || N < 1) reject("gen_tightness needs K >= 1 and N >= 1");
  const int total_offline = K * N;
  std::vector<int> sizes(K, 0);
  int used = 0;
  for (int k = 0; k + 1 < K; ++k) {
    double exact = std::pow(static_cast<double>(K - 1) / K, k) * N;
    sizes[k] = static_cast<int>(std::nearbyint(exact));  // half-to-even
    used += sizes[k];
  }
  sizes[K - 1] = total_offline - used;
  for (int k = 0; k < K; ++k) {
    if (sizes[k] < 1) reject("batch size rounding gave an empty batch; increase N");
  }
  // Batch k < K sees the K*|U_k| lowest-ranked offline vertices, the final
  // batch the |U_K| lowest-ranked; thresholds must nest.
  std::vector<int> threshold(K);
  for (int k = 0; k < K; ++k) {
    threshold[k] = (k + 1 < K) ? K * sizes[k] : sizes[k];
    threshold[k] = std::min(threshold[k], total_offline);
    if (k > 0 && threshold[k] > threshold[k - 1]) {
      reject("batch size rounding broke nesting; increase N");
    }
  }

  std::vector<int> by_rank(total_offline);
  for (int j = 0; j < total_offline; ++j) by_rank[j] = j;
  Rng perm_rng = Rng(seed).split("permutation");
  perm_rng.shuffle(by_rank);
  std::vector<int> rank(total_offline);  // offline j -> rank in 1..K*N
  for (int p = 0; p < total_offline; ++p) rank[by_rank[p]] = p + 1;

  MatchingInstance out;
  out.variant = Variant::vwm;
  out.K = K;
  out.offline.assign(total_offline, OfflineVertex{1.0, 1.0});
  out.stages.resize(K);
  for (int k = 0; k < K; ++k) {
    OnlineVertex prototype;
    for (int j = 0; j < total_offline; ++j) {
      if (rank[j] <= threshold[k]) prototype.edges.push_back({j, 1.0});
    }
    out.stages[k].assign(sizes[k], prototype);
  }
  return out;
}

McaInstance gen_auction(const AuctionSpec& spec) {
  if (spec.advertisers < spec.advertisers_per_config || spec.advertisers_per_config < 2 ||
      spec.users < 1 || spec.levels < 1 || spec.demand < 1 || spec.configs_per_user < 1 ||
      spec.K < 1) {
    reject("gen_auction spec out of range");
  }
  const int block = (spec.users + spec.K - 1) / spec.K;
  if (block * (spec.K - 1) >= spec.users) reject("more batches than user blocks");

  Rng root(spec.seed);
  McaInstance out;
  out.K = spec.K;
  out.advertisers.assign(spec.advertisers, McaAdvertiser{static_cast<double>(spec.demand)});

  Rng price_rng = root.split("prices");
  out.prices.resize(spec.levels);
  for (double& p : out.prices) p = price_rng.exponential();
  std::sort(out.prices.begin(), out.prices.end());
  for (int t = 1; t < spec.levels; ++t) {
    if (out.prices[t] <= out.prices[t - 1]) {
      out.prices[t] = std::nextafter(out.prices[t - 1], std::numeric_limits<double>::infinity());
    }
  }

  Rng mu_rng = root.split("mu");
  std::vector<double> mu(spec.advertisers);
  for (double& m : mu) m = mu_rng.uniform(1.0, 2.0);
  std::sort(mu.begin(), mu.end());

  Rng tau_user_rng = root.split("tau_user");
  Rng tau_pair_rng = root.split("tau_pair");
  Rng pool_rng = root.split("pools");
  const double spread = spec.levels / 3.0;

  out.stages.resize(spec.K);
  for (int i = 0; i < spec.users; ++i) {
    double tau_i = tau_user_rng.uniform(0.0, spread);
    std::vector<int> level(spec.advertisers);  // v_ij as a universe index
    for (int j = 0; j < spec.advertisers; ++j) {
      double tau_ij = tau_pair_rng.uniform(0.0, spread);
      int idx = static_cast<int>(std::ceil(tau_i + tau_ij * mu[j]));
      level[j] = std::clamp(idx, 1, spec.levels);
    }
    int pool_start = 0;
    if (!spec.symmetric) {
      pool_start = static_cast<int>(
          (static_cast<long long>(spec.advertisers - spec.advertisers_per_config) * (i + 1)) /
          spec.users);
    }
    std::vector<int> allowed;
    for (int j = pool_start; j < spec.advertisers; ++j) allowed.push_back(j);

    McaUser user;
    for (int c = 0; c < spec.configs_per_user; ++c) {
      // Partial shuffle draws a distinct candidate pool.
      std::vector<int> pool = allowed;
      for (int s = 0; s < spec.advertisers_per_config; ++s) {
        int pick = s + static_cast<int>(pool_rng.next_below(pool.size() - s));
        std::swap(pool[s], pool[pick]);
      }
      pool.resize(spec.advertisers_per_config);
      int winner = pool[0];
      for (int j : pool) {
        if (level[j] > level[winner] || (level[j] == level[winner] && j < winner)) winner = j;
      }
      int second = 0;
      for (int j : pool) {
        if (j != winner) second = std::max(second, level[j]);
      }
      McaConfig config;
      config.alloc.push_back({winner, 1.0, second});
      user.configs.push_back(std::move(config));
    }
    out.stages[std::min(i / block, spec.K - 1)].push_back(std::move(user));
  }
  return out;
}

McaInstance to_mca(const MatchingInstance& instance) {
  ValidationReport report = validate(instance);
  if (!report.ok) reject(report.error);
  if (instance.variant != Variant::vwm) reject("to_mca expects a unit-capacity instance");

  std::map<double, int> universe;  // weight -> 1-based price level
  for (const OfflineVertex& v : instance.offline) {
    if (v.w > 0.0) universe.emplace(v.w, 0);
  }
  int next = 1;
  for (auto& [w, index] : universe) index = next++;

  McaInstance out;
  out.K = instance.K;
  out.advertisers.assign(instance.offline.size(), McaAdvertiser{1.0});
  out.prices.reserve(universe.size());
  for (const auto& [w, index] : universe) out.prices.push_back(w);
  out.stages.resize(instance.stages.size());
  for (std::size_t k = 0; k < instance.stages.size(); ++k) {
    for (const OnlineVertex& online : instance.stages[k]) {
      McaUser user;
      for (const Edge& e : online.edges) {
        double w = instance.offline[e.j].w;
        if (w <= 0.0) continue;  // cannot contribute revenue
        McaConfig config;
        config.alloc.push_back({e.j, 1.0, universe.at(w)});
        user.configs.push_back(std::move(config));
      }
      out.stages[k].push_back(std::move(user));
    }
  }
  return out;
}

Instance gen_random(const RandomShape& shape, std::uint64_t seed) {
  if (shape.K < 1 || shape.online_per_stage < 1 || shape.offline < 1) {
    reject("gen_random shape out of range");
  }
  Rng root(seed);
  if (shape.kind == "mca") {
    if (shape.levels < 1 || shape.configs_per_user < 1 || shape.allocs_per_config < 1 ||
        shape.allocs_per_config > shape.offline || shape.max_demand < 1) {
      reject("gen_random shape out of range");
    }
    McaInstance out;
    out.K = shape.K;
    Rng demand_rng = root.split("demands");
    out.advertisers.resize(shape.offline);
    for (auto& a : out.advertisers) {
      a.n = 1.0 + static_cast<double>(demand_rng.next_below(shape.max_demand));
    }
    Rng price_rng = root.split("prices");
    out.prices.resize(shape.levels);
    double acc = 0.0;
    double step = std::max(0.3, shape.max_weight / shape.levels);
    for (double& p : out.prices) {
      acc += price_rng.uniform(0.2, step);
      p = acc;
    }
    Rng cfg_rng = root.split("configs");
    out.stages.resize(shape.K);
    for (int k = 0; k < shape.K; ++k) {
      for (int i = 0; i < shape.online_per_stage; ++i) {
        McaUser user;
        for (int c = 0; c < shape.configs_per_user; ++c) {
          std::vector<int> pool(shape.offline);
          for (int j = 0; j < shape.offline; ++j) pool[j] = j;
          McaConfig config;
          for (int s = 0; s < shape.allocs_per_config; ++s) {
            int pick = s + static_cast<int>(cfg_rng.next_below(pool.size() - s));
            std::swap(pool[s], pool[pick]);
            McaAlloc alloc;
            alloc.j = pool[s];
            double cap = std::min(out.advertisers[alloc.j].n, 2.0);
            alloc.xi = cfg_rng.uniform(0.2, cap);
            alloc.tau = 1 + static_cast<int>(cfg_rng.next_below(shape.levels));
            config.alloc.push_back(alloc);
          }
          user.configs.push_back(std::move(config));
        }
        out.stages[k].push_back(std::move(user));
      }
    }
    return out;
  }

  Variant variant;
  if (shape.kind == "vwm") {
    variant = Variant::vwm;
  } else if (shape.kind == "bmatching") {
    variant = Variant::bmatching;
  } else if (shape.kind == "adwords") {
    variant = Variant::adwords;
  } else {
    reject("unknown kind \"" + shape.kind + "\"");
  }
  if (shape.capacity_min < 1 || shape.capacity_max < shape.capacity_min) {
    reject("gen_random capacity range out of range");
  }
  MatchingInstance out;
  out.variant = variant;
  out.K = shape.K;
  Rng weight_rng = root.split("weights");
  Rng cap_rng = root.split("capacities");
  out.offline.resize(shape.offline);
  for (auto& v : out.offline) {
    switch (variant) {
      case Variant::vwm:
        v.w = shape.unit_weights ? 1.0 : weight_rng.uniform(0.05, shape.max_weight);
        v.B = 1.0;
        break;
      case Variant::bmatching:
        v.w = weight_rng.uniform(0.05, shape.max_weight);
        v.B = static_cast<double>(
            shape.capacity_min +
            static_cast<int>(cap_rng.next_below(shape.capacity_max - shape.capacity_min + 1)));
        break;
      case Variant::adwords:
        v.w = 0.0;
        v.B = cap_rng.uniform(static_cast<double>(shape.capacity_min),
                              static_cast<double>(shape.capacity_max));
        break;
    }
  }
  Rng edge_rng = root.split("edges");
  Rng bid_rng = root.split("bids");
  out.stages.resize(shape.K);
  for (int k = 0; k < shape.K; ++k) {
    for (int i = 0; i < shape.online_per_stage; ++i) {
      OnlineVertex online;
      for (int j = 0; j < shape.offline; ++j) {
        if (edge_rng.next_double() >= shape.density) continue;
        Edge e;
        e.j = j;
        e.b = variant == Variant::adwords ? bid_rng.uniform(0.05, 1.0) : 1.0;
        online.edges.push_back(e);
      }
      out.stages[k].push_back(std::move(online));
    }
  }
  return out;
}

}  // namespace batchalloc
