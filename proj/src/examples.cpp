#include "kleinian/examples.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kleinian {

double SeparationSchedule::operator()(int n) const { return scale * std::pow(base, n); }

double SeparationSchedule::admissibility_sum(double s) const {
  // sum_n (4/scale)^(2s) x^n, x = base^(-2s)
  const double x = std::pow(base, -2.0 * s);
  if (!(x < 1.0)) return std::numeric_limits<double>::infinity();
  return std::pow(4.0 / scale, 2.0 * s) * x / (1.0 - x);
}

namespace {

const Atom* nearest_atom(const AtomicMeasure& mu, const Vec3& p) {
  const Atom* best = nullptr;
  double d = 1e-9;
  for (const auto& a : mu.atoms)
    if (distance(a.point, p) < d) {
      d = distance(a.point, p);
      best = &a;
    }
  return best;
}

std::vector<std::pair<Cap, Cap>> arc_caps(const std::vector<ArcPair>& arcs) {
  std::vector<std::pair<Cap, Cap>> out;
  for (const auto& a : arcs) out.emplace_back(Cap::from_angle(a.plus_angle, a.half), Cap::from_angle(a.minus_angle, a.half));
  return out;
}

}  // namespace

Example1 build_example1_group(const Example1Config& cfg) {
  if (cfg.M < 1) throw Error(ErrorCode::InvalidConfig, "M must be positive");
  if (!(cfg.s > 0.0)) throw Error(ErrorCode::InvalidConfig, "exponent must be positive");
  if (!(cfg.kappa > 0.0 && cfg.kappa < 1.0) || !(cfg.ratio > 0.0 && cfg.ratio < 1.0) || !(cfg.theta1 > 0.0))
    throw Error(ErrorCode::InvalidConfig, "placement parameters out of range");
  std::vector<double> phis;
  for (int n = 1; n <= cfg.M; ++n) {
    phis.push_back(cfg.phi(n));
    if (!(phis.back() >= 2.0)) throw Error(ErrorCode::InvalidSeparation, "phi(" + std::to_string(n) + ") < 2");
  }
  if (!(cfg.phi.admissibility_sum(cfg.s) < 0.5))
    throw Error(ErrorCode::InvalidSeparation, "sum of (4/phi(n))^(2s) is not below 1/2");

  std::vector<std::pair<Cap, Cap>> pairs;
  std::vector<std::string> labels;
  std::vector<double> factors;
  double theta = cfg.theta1;
  for (int n = 1; n <= cfg.M; ++n, theta *= cfg.ratio) {
    const double beta = cfg.kappa * theta;
    const double r = 2.0 * std::sin(beta / 2.0) / phis[static_cast<std::size_t>(n - 1)];
    const double alpha = 2.0 * std::asin(r / 2.0);
    if (!(alpha > 1e-300) || !(beta < pi() / 2))
      throw Error(ErrorCode::PlacementInfeasible, "pair " + std::to_string(n) + " cannot be placed");
    pairs.emplace_back(Cap::from_angle(cfg.zeta_angle + theta, alpha), Cap::from_angle(cfg.zeta_angle - theta, alpha));
    labels.push_back("g" + std::to_string(n));
    factors.push_back(beta / alpha);
  }

  auto build = [&]() {
    try {
      auto G = SchottkyGroup::from_caps(1, pairs, labels);
      enlarged_discs(G, factors);
      return G;
    } catch (const Error& e) {
      throw Error(ErrorCode::PlacementInfeasible, std::string("separated pairs do not fit: ") + e.what());
    }
  };
  Example1 ex{build(), BoundaryPoint::from_angle(cfg.zeta_angle), factors, {}, {}};
  for (const auto& c : enlarged_discs(ex.group, factors))
    if (c.contains_closed(ex.zeta, 0.0))
      throw Error(ErrorCode::PlacementInfeasible, "zeta* lies in an enlarged disc");
  ex.certificate = branch_contraction(ex.group, factors);
  return ex;
}

Example1 build_example1(const Example1Config& cfg) {
  Example1 ex = build_example1_group(cfg);
  const SchottkyGroup& G = ex.group;
  auto& rep = ex.report;
  rep.admissibility_sum = cfg.phi.admissibility_sum(cfg.s);
  std::vector<double> phis;
  for (int n = 1; n <= cfg.M; ++n) {
    phis.push_back(cfg.phi(n));
    rep.truncated_sum += std::pow(4.0 / phis.back(), 2.0 * cfg.s);
  }
  for (int i = 0; i < G.rank(); ++i) {
    const auto& lb = ex.certificate.letter_bounds;
    const double phi = phis[static_cast<std::size_t>(i)];
    rep.branches.push_back({i, phi, std::max(lb[static_cast<std::size_t>(2 * i)], lb[static_cast<std::size_t>(2 * i + 1)]),
                            std::pow(4.0 / phi, 2.0)});
  }
  for (double b : ex.certificate.letter_bounds) rep.certificate_q += std::pow(b, cfg.s);
  rep.closed_tail = example1_tail_bound(phis, cfg.s, cfg.depth + 1);

  SeriesOptions so = cfg.series;
  so.certificate = ex.certificate;
  rep.atomicity = classify_atomicity(G, ex.zeta, cfg.s, cfg.depth, StabilizerSpec::trivial(), so);
  if (rep.atomicity.series) rep.horospherical = *rep.atomicity.series;
  rep.jorgensen = jorgensen_test(G, ex.zeta);

  MeasureOptions mo;
  mo.series = cfg.series;
  rep.measure = ending_measure(G, ex.zeta, cfg.s, cfg.measure_depth, StabilizerSpec::trivial(), mo);
  if (const Atom* a = nearest_atom(rep.measure, ex.zeta.coords())) rep.zeta_atom_weight = a->weight;
  if (rep.horospherical.tail_bound)
    rep.zeta_atom_floor = 1.0 / (rep.horospherical.partial_sum + *rep.horospherical.tail_bound);
  return ex;
}

Example2 build_example2_group(const Example2Config& cfg) {
  if (cfg.g2.size() != 2 || cfg.g1.empty()) throw Error(ErrorCode::InvalidConfig, "G2 needs two generators and G1 at least one");
  auto pairs = arc_caps(cfg.g2);
  for (auto& p : arc_caps(cfg.g1)) pairs.push_back(p);
  std::vector<std::string> labels{"a", "b"};
  std::vector<int> images{0, 2};
  for (std::size_t i = 0; i < cfg.g1.size(); ++i) {
    labels.push_back("h" + std::to_string(i + 1));
    images.push_back(-1);
  }
  Example2 ex{SchottkyGroup::from_caps(1, pairs, labels), QuotientSpec::free_target(2, images), {}, {}, {}};
  ex.quotient.validate(ex.group.rank());
  for (int i = 0; i < 2; ++i) {
    auto c = classify(ex.group.generators()[static_cast<std::size_t>(i)].transform);
    ex.zeta.push_back(c.fixed_points.at(0));
  }
  return ex;
}

Example2 build_example2(const Example2Config& cfg) {
  if (cfg.measure_depths.empty()) throw Error(ErrorCode::InvalidConfig, "no measure depths");
  Example2 ex = build_example2_group(cfg);
  const SchottkyGroup& G = ex.group;
  auto& rep = ex.report;
  MeasureOptions mo;
  mo.series = cfg.series;
  mo.kernel = ex.quotient;
  mo.check_domain = false;
  for (const auto& z : ex.zeta) {
    rep.max_weight.emplace_back();
    AtomicMeasure last;
    for (int L : cfg.measure_depths) {
      last = ending_measure(G, z, cfg.s, L, StabilizerSpec::trivial(), mo);
      rep.max_weight.back().push_back(last.max_weight());
    }
    ex.measures.push_back(std::move(last));
  }
  rep.support_gap = support_gap(ex.measures[0], ex.measures[1]);
  rep.eps = rep.support_gap / 4.0;
  rep.overlap = singularity_diagnostic(ex.measures[0], ex.measures[1], rep.eps);

  const int d = budget_depth(G, 64, cfg.delta_budget);
  std::vector<int> schedule;
  for (int k = std::max(1, d - 2); k <= d; ++k) schedule.push_back(k);
  DeltaOptions dopt;
  dopt.series = cfg.series;
  dopt.series.node_budget = cfg.delta_budget;
  dopt.iterations = cfg.delta_iterations;
  rep.delta_group = estimate_delta(G, cfg.delta_lo, cfg.delta_hi, schedule, dopt);
  dopt.kernel = ex.quotient;
  rep.delta_kernel = estimate_delta(G, cfg.delta_lo, cfg.delta_hi, schedule, dopt);
  rep.delta_gap = rep.delta_kernel.hi < rep.delta_group.lo;
  return ex;
}

Example3 build_example3_group(const Example3Config& cfg) {
  const BoundaryPoint zeta = BoundaryPoint::from_angle(cfg.zeta_angle);
  const Transform p = Transform::parabolic(zeta, cfg.tau, 1);
  const auto cls = classify(p);
  if (cls.kind != TransformKind::Parabolic || cls.fixed_points.empty() ||
      angle_between(cls.fixed_points[0].coords(), zeta.coords()) > 1e-9)
    throw Error(ErrorCode::StabilizerNotParabolic, "declared stabilizer generator is " + std::string(to_string(cls.kind)));
  auto c1 = isometric_cap(p), c2 = isometric_cap(p.inverse());
  if (!c1 || !c2) throw Error(ErrorCode::StabilizerNotParabolic, "parabolic generator has no isometric discs");
  std::vector<Generator> gens;
  Generator pg;
  pg.label = "p";
  pg.transform = p;
  pg.cplus = *c1;
  pg.cminus = *c2;
  pg.parabolic = true;
  gens.push_back(pg);
  std::vector<std::array<int, 4>> images{{1, 0, 0, 0}};
  int i = 1;
  for (const auto& [cp, cm] : arc_caps(cfg.g1)) {
    Generator g;
    g.label = "h" + std::to_string(i++);
    g.cplus = cp;
    g.cminus = cm;
    g.transform = pair_discs(cp, cm, 1);
    gens.push_back(g);
    images.push_back({0, 0, 0, 0});
  }
  Example3 ex{SchottkyGroup(1, std::move(gens)), QuotientSpec::abelian(1, images), StabilizerSpec::of({0}), zeta, {}};
  ex.quotient.validate(ex.group.rank());
  return ex;
}

Example3 build_example3(const Example3Config& cfg) {
  Example3 ex = build_example3_group(cfg);
  const SchottkyGroup& G = ex.group;
  auto& rep = ex.report;
  const double s = cfg.s;

  Transform pk = Transform::identity(1), pm = Transform::identity(1);
  for (int k = 1; k <= cfg.powers; ++k) {
    pk = compose(pk, G.letter(0));
    pm = compose(pm, G.letter(1));
    rep.max_power_defect = std::max({rep.max_power_defect, std::abs(pk.derivative(ex.zeta) - 1.0),
                                     std::abs(pm.derivative(ex.zeta) - 1.0)});
  }

  SeriesOptions so = cfg.series;
  so.section = ex.quotient;
  rep.section_sum = reduced_horospherical_partial(G, ex.zeta, s, cfg.depth, ex.stabilizer, so).partial_sum;
  MeasureOptions ko;
  ko.series = cfg.series;
  ko.kernel = ex.quotient;
  rep.kernel_sum = ending_measure(G, ex.zeta, s, cfg.depth, ex.stabilizer, ko).series->partial_sum;

  CosetOptions co;
  co.policy = CosetPolicy::KernelSection;
  co.section = ex.quotient;
  co.node_budget = cfg.series.node_budget;
  const auto reps = coset_representatives(G, ex.stabilizer, cfg.domination_depth, co);
  rep.b = -std::numeric_limits<double>::infinity();
  for (const auto& e : reps.representatives)
    rep.b = std::max(rep.b, std::log(e.transform.derivative(ex.zeta)) -
                               std::log(e.transform.derivative(InteriorPoint::origin())));
  rep.dominated = true;
  for (int L = 0; L <= cfg.domination_depth; ++L) {
    const double red = reduced_horospherical_partial(G, ex.zeta, s, L, ex.stabilizer, so).partial_sum;
    const double bound = std::exp(s * rep.b) * poincare_partial(G, InteriorPoint::origin(), s, L, cfg.series).partial_sum;
    rep.domination.emplace_back(red, bound);
    rep.dominated = rep.dominated && red <= bound * (1 + 1e-12);
  }

  rep.unreduced = horospherical_partial(G, ex.zeta, s, cfg.depth, cfg.series);
  rep.atomicity = classify_atomicity(G, ex.zeta, s, cfg.depth, ex.stabilizer, so);
  MeasureOptions mo;
  mo.series = so;
  rep.measure = ending_measure(G, ex.zeta, s, cfg.depth, ex.stabilizer, mo);
  return ex;
}

}  // namespace kleinian
