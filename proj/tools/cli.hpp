#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kleinian/examples.hpp"

namespace kleinian::cli {

using nlohmann::json;

constexpr int kSchemaVersion = 1;
constexpr const char* kLibraryVersion = "0.1.0";

enum Exit { Ok = 0, ConfigError = 2, BudgetError = 3, IoError = 4 };

// The group and targets a command runs on, from a custom group spec or an example id.
struct Setup {
  SchottkyGroup group = SchottkyGroup::trivial(1);
  std::optional<BoundaryPoint> target;
  InteriorPoint interior;
  StabilizerSpec stabilizer = StabilizerSpec::trivial();
  std::optional<QuotientSpec> kernel;   // measures and series of a kernel subgroup
  std::optional<QuotientSpec> section;  // reduced series truncation
  std::optional<ContractionCertificate> certificate;
  json example_report;  // example-specific static data, null when absent
};

struct RunConfig {
  json doc;  // resolved config, threads excluded
  std::string example;
  double s = 1.0;
  int depth = 6;
  std::uint64_t node_budget = 4000000000ULL;
  int threads = 1;
  bool extended = false;
  std::string source = "ending";  // measure and render: ending | orbit
  int bins = 64;
  int image_size = 256;
  int cells = 64;
};

// Parses and validates; throws Error(InvalidConfig) before any computation.
RunConfig resolve_config(const json& doc, const std::optional<int>& depth, const std::optional<double>& exponent,
                         const std::optional<int>& threads, const std::optional<std::string>& precision);
Setup build_setup(const RunConfig& cfg);
SeriesOptions series_options(const RunConfig& cfg, const Setup& st);

json to_json(const SeriesResult& r);
json to_json(const AtomicityVerdict& v);
json to_json(const DeltaEstimate& d);

struct Histogram {
  int dim = 1;
  int lat = 1, lon = 64;  // dim 1: lat = 1
  std::vector<double> mass;
};

// Boundary histogram: angle bins on S^1, equal-angle latitude x longitude bins on S^2.
// Interior atoms are binned by their radial projection.
Histogram histogram(const AtomicMeasure& mu, int bins);
std::string histogram_csv(const Histogram& h);
// P6 image: annulus on S^1, equirectangular on S^2.
std::string render_ppm(const Histogram& h, int size);

std::uint64_t fnv1a(const std::string& bytes);

int run(int argc, char** argv);

}  // namespace kleinian::cli
