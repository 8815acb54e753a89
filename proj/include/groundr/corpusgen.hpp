#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "groundr/catalog.hpp"
#include "groundr/dsl.hpp"

namespace groundr {

struct GenParams {
  std::uint64_t seed = 42;
  std::size_t n_protocols = 120;
  std::size_t n_op_types = 18;
  std::size_t min_ops = 4;
  std::size_t max_ops = 10;
  double density = 0.7;  // chance an input is an earlier product rather than stock
  std::size_t n_clusters = 4;
  double min_duration_s = 60;
  double max_duration_s = 1800;
  double explicit_duration_prob = 0.3;
  /// Chance that a protocol swaps one adjacent pair of steps against the
  /// cluster's usual order.
  double reverse_prob = 0.0;
  std::string name_prefix = "p";

  /// Throws ConfigError on inconsistent ranges.
  void validate() const;
};

/// Op type names used by the generator, in their canonical order.
std::vector<std::string> op_type_vocabulary(std::size_t n);

/// Protocols drawn from n_clusters latent op-type distributions. Within a
/// cluster steps follow the canonical type order, so dependence runs forward
/// in that order unless a reversal was sampled.
Corpus generate_corpus(const GenParams& p);

struct CatalogParams {
  std::uint64_t seed = 42;
  double min_price = 500;
  double max_price = 20000;
  double min_duration_s = 60;
  double max_duration_s = 1800;
  /// Chance a capability also gets a pricier single-purpose device type.
  double alternative_prob = 0.3;
  /// Chance an op type is executed as a two-step chain (prep + op).
  double expansion_prob = 0.0;
  double pipeline_unit_price = 800;
};

/// Device types covering every op type of `c` (capabilities grouped one or
/// two per type, seeded prices and durations) plus two robot types.
Catalog generate_catalog(const Corpus& c, const CatalogParams& p = {});

struct GeneratedSuite {
  Corpus target;
  Corpus universe;  // target plus protocols with more out-of-order steps
  Corpus scaling;   // fresh protocols from the same clusters
  Catalog catalog;
};

/// Target from `p`; universe extras (half as many, reverse_prob 0.5) and
/// scaling protocols (a quarter as many) from derived seeds.
GeneratedSuite generate_suite(const GenParams& p, const CatalogParams& cp = {});

/// Writes one `<name>.proto.dsl` per protocol into `dir` (created if needed).
void write_corpus(const Corpus& c, const std::filesystem::path& dir);

/// target/, universe/, scaling/ and catalog.json under `dir`.
void write_suite(const GeneratedSuite& s, const std::filesystem::path& dir);

}  // namespace groundr
