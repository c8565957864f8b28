#pragma once

#include <string>
#include <utility>
#include <vector>

#include "kleinian/walker.hpp"

namespace kleinian {

struct LimitOptions {
  std::uint64_t node_budget = 4000000000ULL;
  int threads = 1;
};

// min over words of length <= L of d(z, w(0)); an upper bound for the orbit distance.
double orbit_distance(const SchottkyGroup& G, const InteriorPoint& z, int L, const LimitOptions& opt = {});
std::vector<double> orbit_distances(const SchottkyGroup& G, const std::vector<InteriorPoint>& z, int L,
                                    const LimitOptions& opt = {});

enum class ProfileEvidence { Bounded, Growth, Unclear };
const char* to_string(ProfileEvidence e);

struct RadialProfile {
  BoundaryPoint zeta;
  std::vector<std::pair<double, double>> samples;  // (T, Delta(xi_T))
  int depth = 0;
  double slope = 0.0;  // least squares over the upper half of the grid
  ProfileEvidence evidence = ProfileEvidence::Unclear;
};

std::vector<double> default_t_grid();  // 1..12
RadialProfile radial_profile(const SchottkyGroup& G, const BoundaryPoint& zeta, const std::vector<double>& T, int L,
                             const LimitOptions& opt = {});

struct JorgensenOptions {
  bool declared_limit = false;
  double ratio_max = 0.9;  // accumulation test: geometric decay of the last three disc distances
};

// zeta in the closed fundamental domain and a limit point (declared, or the
// generator discs accumulate at it in the order given).
bool jorgensen_test(const SchottkyGroup& G, const BoundaryPoint& zeta, const JorgensenOptions& opt = {});
bool discs_accumulate_at(const SchottkyGroup& G, const BoundaryPoint& zeta, double ratio_max = 0.9);

struct HoroWitness {
  Word word;
  double kernel;  // k(w(0), zeta)
};

// Words of length <= L with k(w(0), zeta) > c, kernel descending.
std::vector<HoroWitness> horoball_entry(const SchottkyGroup& G, const BoundaryPoint& zeta, double c, int L,
                                        const LimitOptions& opt = {});
std::vector<double> default_c_grid();  // 2^-3 .. 2^6

}  // namespace kleinian
