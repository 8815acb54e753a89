#include "groundr/corpusgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "groundr/layout.hpp"

namespace groundr {

namespace {

const char* const kVerbs[] = {"add",      "stir",      "heat",     "filter",  "centrifuge", "incubate",
                              "wash",     "dry",       "measure",  "mix",     "cool",       "dissolve",
                              "transfer", "pipette",   "shake",    "vortex",  "sonicate",   "evaporate",
                              "titrate",  "grind",     "weigh",    "degas",   "quench",     "crystallize"};

std::string padded(std::size_t i, std::size_t width) {
  std::string s = std::to_string(i);
  return std::string(s.size() < width ? width - s.size() : 0, '0') + s;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool chance(std::mt19937_64& rng, double p) { return uniform(rng, 0.0, 1.0) < p; }

struct Cluster {
  std::vector<std::size_t> core;  // canonical type indices, ascending
  std::vector<double> weights;
};

std::vector<Cluster> make_clusters(const GenParams& p) {
  std::mt19937_64 rng(p.seed);
  const std::size_t n = p.n_op_types;
  const std::size_t size = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::lround(1.5 * static_cast<double>(n) / static_cast<double>(p.n_clusters))),
      std::min<std::size_t>(2, n), n);
  std::vector<Cluster> out(p.n_clusters);
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  for (auto& c : out) {
    std::shuffle(all.begin(), all.end(), rng);
    c.core.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(size));
    std::sort(c.core.begin(), c.core.end());
    for (std::size_t i = 0; i < c.core.size(); ++i) c.weights.push_back(uniform(rng, 0.5, 2.0));
  }
  return out;
}

}  // namespace

void GenParams::validate() const {
  if (n_op_types < 1) throw ConfigError("generator: n_op_types must be >= 1");
  if (n_clusters < 1) throw ConfigError("generator: n_clusters must be >= 1");
  if (min_ops < 1 || min_ops > max_ops) throw ConfigError("generator: need 1 <= min_ops <= max_ops");
  if (!(density >= 0 && density <= 1)) throw ConfigError("generator: density must lie in [0, 1]");
  if (!(reverse_prob >= 0 && reverse_prob <= 1)) throw ConfigError("generator: reverse_prob must lie in [0, 1]");
  if (!(explicit_duration_prob >= 0 && explicit_duration_prob <= 1))
    throw ConfigError("generator: explicit_duration_prob must lie in [0, 1]");
  if (!(min_duration_s > 0 && min_duration_s <= max_duration_s))
    throw ConfigError("generator: need 0 < min_duration_s <= max_duration_s");
  if (name_prefix.empty()) throw ConfigError("generator: name_prefix must be nonempty");
}

std::vector<std::string> op_type_vocabulary(std::size_t n) {
  std::vector<std::string> out;
  const std::size_t named = std::size(kVerbs);
  for (std::size_t i = 0; i < n; ++i) out.push_back(i < named ? kVerbs[i] : "op_" + padded(i + 1, 2));
  return out;
}

Corpus generate_corpus(const GenParams& p) {
  p.validate();
  const auto vocab = op_type_vocabulary(p.n_op_types);
  const auto clusters = make_clusters(p);
  // Clusters depend on the seed alone; the protocol stream also on the name
  // prefix, so differently named corpora share clusters but not protocols.
  std::vector<std::uint32_t> material{static_cast<std::uint32_t>(p.seed), static_cast<std::uint32_t>(p.seed >> 32)};
  for (char ch : p.name_prefix) material.push_back(static_cast<unsigned char>(ch));
  std::seed_seq seq(material.begin(), material.end());
  std::mt19937_64 rng(seq);

  Corpus c;
  const std::size_t width = std::max<std::size_t>(3, std::to_string(p.n_protocols).size());
  for (std::size_t n = 0; n < p.n_protocols; ++n) {
    const Cluster& cl = clusters[pick(rng, 0, clusters.size() - 1)];
    const std::size_t len = pick(rng, p.min_ops, p.max_ops);
    std::discrete_distribution<std::size_t> draw(cl.weights.begin(), cl.weights.end());
    std::vector<std::size_t> types;
    for (std::size_t i = 0; i < len; ++i) types.push_back(cl.core[draw(rng)]);
    std::sort(types.begin(), types.end());
    if (chance(rng, p.reverse_prob)) {
      std::vector<std::size_t> spots;
      for (std::size_t i = 0; i + 1 < types.size(); ++i)
        if (types[i] != types[i + 1]) spots.push_back(i);
      if (!spots.empty()) {
        const std::size_t i = spots[pick(rng, 0, spots.size() - 1)];
        std::swap(types[i], types[i + 1]);
      }
    }

    Protocol proto;
    proto.name = p.name_prefix + padded(n + 1, width);
    for (std::size_t i = 0; i < types.size(); ++i) {
      Operation op;
      op.id = default_operation_id(i);
      op.op_type = vocab[types[i]];
      auto input = [&](const std::string& stock) {
        if (i > 0 && chance(rng, p.density)) {
          const std::size_t from = chance(rng, 0.75) ? i - 1 : pick(rng, 0, i - 1);
          return "r" + std::to_string(from + 1);
        }
        return stock;
      };
      op.preconditions.push_back(input("s" + std::to_string(i + 1)));
      if (chance(rng, 0.25)) {
        std::string extra = input("t" + std::to_string(i + 1));
        if (extra != op.preconditions.front()) op.preconditions.push_back(std::move(extra));
      }
      op.postconditions.push_back("r" + std::to_string(i + 1));
      if (chance(rng, p.explicit_duration_prob))
        op.duration_s = std::round(uniform(rng, p.min_duration_s, p.max_duration_s));
      if (chance(rng, 0.2)) op.parameters["temp"] = {std::to_string(pick(rng, 20, 90)), "C"};
      proto.operations.push_back(std::move(op));
    }
    c.protocols.push_back(std::move(proto));
  }
  return c;
}

Catalog generate_catalog(const Corpus& c, const CatalogParams& p) {
  std::mt19937_64 rng(p.seed);
  std::set<std::string> type_set;
  for (const auto& proto : c.protocols)
    for (const auto& op : proto.operations) type_set.insert(op.op_type);
  std::vector<std::string> ops(type_set.begin(), type_set.end());

  std::map<std::string, std::vector<std::string>> expansions;
  std::map<std::string, std::string> prep_of;
  for (const auto& op : ops)
    if (chance(rng, p.expansion_prob)) {
      prep_of[op] = op + "_prep";
      expansions[op] = {op + "_prep", op};
    }

  auto price = [&] { return 10.0 * std::round(uniform(rng, p.min_price, p.max_price) / 10.0); };
  auto duration = [&] { return std::round(uniform(rng, p.min_duration_s, p.max_duration_s)); };

  std::vector<std::string> shuffled = ops;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  std::vector<DeviceType> devices;
  for (std::size_t i = 0; i < shuffled.size();) {
    const std::size_t take = std::min<std::size_t>(chance(rng, 0.5) ? 2 : 1, shuffled.size() - i);
    DeviceType d;
    d.name = "dev_" + padded(devices.size() + 1, 2);
    for (std::size_t k = 0; k < take; ++k) {
      const std::string& op = shuffled[i + k];
      d.capabilities.push_back(op);
      if (prep_of.count(op)) d.capabilities.push_back(prep_of[op]);
    }
    std::sort(d.capabilities.begin(), d.capabilities.end());
    d.price = price();
    for (const auto& cap : d.capabilities) d.durations_s[cap] = duration();
    devices.push_back(std::move(d));
    i += take;
  }
  for (const auto& op : ops) {
    if (!chance(rng, p.alternative_prob)) continue;
    DeviceType d;
    d.name = "alt_" + op;
    d.capabilities = {op};
    if (prep_of.count(op)) d.capabilities.push_back(prep_of[op]);
    std::sort(d.capabilities.begin(), d.capabilities.end());
    d.price = price();
    for (const auto& cap : d.capabilities) d.durations_s[cap] = duration();
    devices.push_back(std::move(d));
  }

  std::vector<RobotType> robots{{"arm_a", 30000, 2, 60}, {"arm_b", 45000, 3, 30}};
  return Catalog(std::move(devices), std::move(robots), std::move(expansions), p.pipeline_unit_price);
}

GeneratedSuite generate_suite(const GenParams& p, const CatalogParams& cp) {
  GeneratedSuite s;
  s.target = generate_corpus(p);
  s.target.role = CorpusRole::target;

  GenParams extra = p;
  extra.n_protocols = std::max<std::size_t>(1, p.n_protocols / 2);
  extra.reverse_prob = 0.5;
  extra.name_prefix = "u";
  Corpus extras = generate_corpus(extra);
  s.universe.role = CorpusRole::universe;
  s.universe.protocols = s.target.protocols;
  for (auto& proto : extras.protocols) s.universe.protocols.push_back(std::move(proto));

  GenParams scale = p;
  scale.n_protocols = std::max<std::size_t>(1, p.n_protocols / 4);
  scale.name_prefix = "s";
  s.scaling = generate_corpus(scale);
  s.scaling.role = CorpusRole::scaling;

  Corpus all = s.universe;
  for (const auto& proto : s.scaling.protocols) all.protocols.push_back(proto);
  s.catalog = generate_catalog(all, cp);
  return s;
}

void write_corpus(const Corpus& c, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& p : c.protocols) {
    std::ofstream out(dir / (p.name + ".proto.dsl"));
    if (!out) throw Error("cannot write " + (dir / (p.name + ".proto.dsl")).string());
    out << to_dsl(p);
  }
}

void write_suite(const GeneratedSuite& s, const std::filesystem::path& dir) {
  write_corpus(s.target, dir / "target");
  write_corpus(s.universe, dir / "universe");
  write_corpus(s.scaling, dir / "scaling");
  std::ofstream out(dir / "catalog.json");
  if (!out) throw Error("cannot write " + (dir / "catalog.json").string());
  out << catalog_to_json(s.catalog).dump(2) << '\n';
}

}  // namespace groundr
