#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kleinian/series.hpp"

namespace kleinian {

struct Atom {
  Vec3 point{};  // closed ball, boundary atoms have norm 1
  double weight = 0.0;
  int word_length = 0;
};

enum class MeasureSource { Orbit, Ending, Custom };
const char* to_string(MeasureSource s);

struct AtomicMeasure {
  int dim = 1;
  MeasureSource source = MeasureSource::Custom;
  double s = 0.0;
  int depth = 0;
  std::vector<Atom> atoms;  // weights descending
  std::optional<SeriesResult> series;

  double total() const;
  double max_weight() const { return atoms.empty() ? 0.0 : atoms.front().weight; }
  double shell_mass(int length) const;
};

constexpr double kMergeTolerance = 1e-12;

// Normalizes, merges atoms closer than kMergeTolerance and sorts by weight.
AtomicMeasure make_measure(int dim, std::vector<Atom> atoms, MeasureSource src = MeasureSource::Custom);

struct MeasureOptions {
  SeriesOptions series;
  std::optional<QuotientSpec> kernel;  // measure of the kernel subgroup instead of G
  bool check_domain = true;
};

AtomicMeasure orbit_measure(const SchottkyGroup& G, const InteriorPoint& z, double s, int L,
                            const MeasureOptions& opt = {});
AtomicMeasure ending_measure(const SchottkyGroup& G, const BoundaryPoint& zeta, double s, int L,
                             const StabilizerSpec& stab, const MeasureOptions& opt = {});

// Partition of the boundary into `cells` test sets: arcs on S^1, equal-area
// latitude bands times longitude sectors on S^2.
int partition_cell(const Vec3& x, int dim, int cells);

double conformality_residual(const AtomicMeasure& mu, const Transform& g, double s, int cells = 64);

enum class StabilizerCheck { AllDerivativesOne, DerivativeNotOne, NoStabilizerDeclared };
enum class Conclusion { AtomAtZeta, NoAtomAtZeta, Inconclusive };
const char* to_string(StabilizerCheck c);
const char* to_string(Conclusion c);

struct AtomicityVerdict {
  StabilizerCheck stabilizer_check = StabilizerCheck::NoStabilizerDeclared;
  int witness = -1;  // stabilizer generator index
  double witness_value = 1.0;
  std::optional<SeriesResult> series;     // reduced series
  std::optional<SeriesResult> unreduced;  // when the stabilizer is nontrivial
  Conclusion conclusion = Conclusion::Inconclusive;
  std::vector<std::string> transcript;
};

AtomicityVerdict classify_atomicity(const SchottkyGroup& G, const BoundaryPoint& zeta, double s, int L,
                                    const StabilizerSpec& stab, const SeriesOptions& opt = {});

// Hat-function differences on the test partition (scaled by |x| so interior
// atoms are handled continuously) plus a weighted chamfer distance between the
// 32 heaviest atoms of each side.
double weak_distance(const AtomicMeasure& mu, const AtomicMeasure& nu, int cells = 64, int top = 32);

// (mass of mu within eps of supp nu, mass of nu within eps of supp mu), the
// support of a truncated measure being its `top` heaviest atoms.  Deep
// truncations of two measures on the same limit set are dense in each other,
// so the full atom set says nothing.
std::pair<double, double> singularity_diagnostic(const AtomicMeasure& mu, const AtomicMeasure& nu, double eps,
                                                 int top = 32);
// smallest distance between the `top` heaviest atoms of mu and of nu
double support_gap(const AtomicMeasure& mu, const AtomicMeasure& nu, int top = 32);

std::string atoms_csv(const AtomicMeasure& mu);

}  // namespace kleinian
