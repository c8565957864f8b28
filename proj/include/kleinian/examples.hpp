#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kleinian/limits.hpp"
#include "kleinian/measure.hpp"

namespace kleinian {

// phi(n) = scale * base^n
struct SeparationSchedule {
  double scale = 16.0;
  double base = 2.0;

  double operator()(int n) const;
  // sum over all n >= 1 of (4/phi(n))^(2s), closed form; +inf when it diverges
  double admissibility_sum(double s) const;
};

struct Example1Config {
  double s = 0.5;
  SeparationSchedule phi;
  int M = 4;
  double kappa = 0.3;    // enlarged half-angle over the distance of the center to zeta*
  double ratio = 0.5;    // theta_{n+1} / theta_n
  double theta1 = 1.5707963267948966;
  double zeta_angle = 0.0;  // accumulation point zeta*
  int depth = 8;
  int measure_depth = 6;
  SeriesOptions series;
};

struct BranchBound {
  int generator;
  double phi;
  double bound;        // sup of j over the exterior of the enlarged source disc, both letters
  double closed_bound;  // (4/phi)^2
};

struct Example1Report {
  double admissibility_sum = 0.0;  // all n, closed form
  double truncated_sum = 0.0;      // n <= M
  std::vector<BranchBound> branches;
  double certificate_q = 0.0;      // sum over letters of bound^s
  std::optional<double> closed_tail;  // example1_tail_bound over the instantiated phi
  SeriesResult horospherical;
  AtomicityVerdict atomicity;
  bool jorgensen = false;
  double zeta_atom_weight = 0.0;
  double zeta_atom_floor = 0.0;  // 1/(partial + tail)
  AtomicMeasure measure;
};

struct Example1 {
  SchottkyGroup group;
  BoundaryPoint zeta;
  std::vector<double> enlargement;
  ContractionCertificate certificate;
  Example1Report report;
};

// Group, zeta and certificate only.  Throws PlacementInfeasible or InvalidSeparation.
Example1 build_example1_group(const Example1Config& cfg);
Example1 build_example1(const Example1Config& cfg);

struct ArcPair {
  double plus_angle, minus_angle, half;
};

struct Example2Config {
  std::vector<ArcPair> g1{{0.7853981633974483, 3.9269908169872414, 0.08}, {2.356194490192345, 5.497787143782138, 0.08}};
  std::vector<ArcPair> g2{{3.141592653589793, 0.0, 0.6}, {4.71238898038469, 1.5707963267948966, 0.6}};
  double s = 0.6;  // near the kernel exponent estimate
  std::vector<int> measure_depths{6, 7, 8};
  std::uint64_t delta_budget = 1000000;
  double delta_lo = 0.05, delta_hi = 1.0;
  int delta_iterations = 10;
  SeriesOptions series;
};

struct Example2Report {
  std::vector<std::vector<double>> max_weight;  // per target, per measure depth
  std::pair<double, double> overlap{0.0, 0.0};
  double support_gap = 0.0;
  double eps = 0.0;
  DeltaEstimate delta_group;
  DeltaEstimate delta_kernel;
  bool delta_gap = false;  // upper(kernel) < lower(group)
};

struct Example2 {
  SchottkyGroup group;  // G2 generators first, then G1
  QuotientSpec quotient;
  std::vector<BoundaryPoint> zeta;  // attracting fixed points of the G2 generators
  std::vector<AtomicMeasure> measures;  // at the deepest measure depth
  Example2Report report;
};

Example2 build_example2_group(const Example2Config& cfg);
Example2 build_example2(const Example2Config& cfg);

struct Example3Config {
  double zeta_angle = 0.0;
  double tau = 2.0;
  std::vector<ArcPair> g1{{1.9634954084936207, 4.319689898685965, 0.25}, {2.748893571891069, 3.5342917352885173, 0.25}};
  double s = 0.9;
  int depth = 6;
  int domination_depth = 8;
  int powers = 20;
  SeriesOptions series;
};

struct Example3Report {
  double max_power_defect = 0.0;  // max_k |j(p^k, zeta) - 1|
  double section_sum = 0.0;
  double kernel_sum = 0.0;
  double b = 0.0;
  std::vector<std::pair<double, double>> domination;  // per depth: (reduced partial, e^{sb} P(0,s) partial)
  bool dominated = false;
  SeriesResult unreduced;
  AtomicityVerdict atomicity;
  AtomicMeasure measure;
  std::string hypothesis = "convergence type of G unverified";
};

struct Example3 {
  SchottkyGroup group;  // parabolic generator first
  QuotientSpec quotient;  // exponent sum of the parabolic
  StabilizerSpec stabilizer;
  BoundaryPoint zeta;
  Example3Report report;
};

Example3 build_example3_group(const Example3Config& cfg);
Example3 build_example3(const Example3Config& cfg);

}  // namespace kleinian
