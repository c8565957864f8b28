#include <cmath>
#include <set>

#include "cli.hpp"

namespace kleinian::cli {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); }

double number(const json& j, const std::string& what) {
  if (!j.is_number()) bad(what + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(what + " must be finite");
  return v;
}

int integer(const json& j, const std::string& what) {
  if (!j.is_number_integer()) bad(what + " must be an integer");
  return j.get<int>();
}

Vec3 vec3(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() < 2 || j.size() > 3) bad(what + " must be an array of 2 or 3 numbers");
  Vec3 v{};
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = number(j[i], what);
  return v;
}

Cap cap(const json& j, const std::string& what) {
  if (!j.is_object() || !j.contains("half")) bad(what + " needs half and angle or center");
  const double a = number(j["half"], what + ".half");
  if (!(a > 0.0 && a < pi())) bad(what + ".half out of (0, pi)");
  if (j.contains("angle")) return Cap::from_angle(number(j["angle"], what + ".angle"), a);
  if (j.contains("center")) {
    const Vec3 c = vec3(j["center"], what + ".center");
    if (!(norm(c) > 0.0)) bad(what + ".center is zero");
    return Cap((1.0 / norm(c)) * c, a);
  }
  bad(what + " needs angle or center");
}

BoundaryPoint boundary(const json& j, const std::string& what) {
  if (j.contains("angle")) return BoundaryPoint::from_angle(number(j["angle"], what + ".angle"));
  if (j.contains("point")) {
    const Vec3 p = vec3(j["point"], what + ".point");
    if (std::abs(norm(p) - 1.0) > 1e-9) bad(what + ".point is not on the unit sphere");
    return BoundaryPoint((1.0 / norm(p)) * p);
  }
  bad(what + " needs angle or point");
}

std::vector<ArcPair> arcs(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) bad(what + " must be a nonempty array of [plus, minus, half]");
  std::vector<ArcPair> out;
  for (const auto& a : j) {
    if (!a.is_array() || a.size() != 3) bad(what + " entries must be [plus, minus, half]");
    out.push_back({number(a[0], what), number(a[1], what), number(a[2], what)});
  }
  return out;
}

SchottkyGroup custom_group(const json& g) {
  if (!g.is_object()) bad("group must be an object");
  const int dim = g.contains("dim") ? integer(g["dim"], "group.dim") : 1;
  if (dim != 1 && dim != 2) bad("group.dim must be 1 or 2");
  std::vector<Generator> gens;
  const json& list = g.contains("generators") ? g["generators"] : json::array();
  if (!list.is_array()) bad("group.generators must be an array");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const json& e = list[i];
    const std::string name = "group.generators[" + std::to_string(i) + "]";
    Generator gen;
    gen.label = e.value("label", "g" + std::to_string(i + 1));
    if (e.contains("parabolic")) {
      const json& p = e["parabolic"];
      const BoundaryPoint z = boundary(p.value("fixed", json::object()), name + ".parabolic.fixed");
      gen.transform = Transform::parabolic(z, number(p.value("tau", json(2.0)), name + ".parabolic.tau"), dim);
      auto c1 = isometric_cap(gen.transform), c2 = isometric_cap(gen.transform.inverse());
      if (!c1 || !c2) bad(name + " parabolic with tau = 0");
      gen.cplus = *c1;
      gen.cminus = *c2;
      gen.parabolic = true;
    } else {
      gen.cplus = cap(e.value("plus", json()), name + ".plus");
      gen.cminus = cap(e.value("minus", json()), name + ".minus");
      try {
        gen.transform = pair_discs(gen.cplus, gen.cminus, dim);
      } catch (const Error& err) {
        throw Error(err.code(), "generator " + gen.label + ": discs " + gen.label + "+ and " + gen.label + "- overlap");
      }
    }
    gens.push_back(gen);
  }
  return SchottkyGroup(dim, std::move(gens));
}

const std::set<std::string> kKeys{"schema_version", "example", "params", "group", "exponent", "depth",
                                   "node_budget", "threads", "precision", "target", "interior",
                                   "stabilizer", "source", "bins", "image_size", "cells"};

}  // namespace

RunConfig resolve_config(const json& in, const std::optional<int>& depth, const std::optional<double>& exponent,
                         const std::optional<int>& threads, const std::optional<std::string>& precision) {
  if (!in.is_object()) bad("config must be a JSON object");
  for (const auto& [k, v] : in.items())
    if (!kKeys.count(k)) bad("unknown config key " + k);
  if (in.contains("schema_version") && in["schema_version"] != kSchemaVersion)
    bad("unsupported schema_version " + in["schema_version"].dump());
  RunConfig c;
  c.doc = in;
  c.doc["schema_version"] = kSchemaVersion;
  c.example = in.value("example", std::string());
  if (!c.example.empty() && c.example != "example1" && c.example != "example2" && c.example != "example3")
    bad("unknown example " + c.example);
  if (!c.example.empty() && in.contains("group")) bad("give either example or group");

  const double s_def = c.example == "example1" ? 0.5 : c.example == "example2" ? 0.6 : c.example == "example3" ? 0.9 : 1.0;
  const int d_def = c.example == "example1" ? 8 : 6;
  c.s = exponent ? *exponent : in.contains("exponent") ? number(in["exponent"], "exponent") : s_def;
  c.depth = depth ? *depth : in.contains("depth") ? integer(in["depth"], "depth") : d_def;
  if (in.contains("node_budget")) {
    if (!in["node_budget"].is_number_unsigned() && !in["node_budget"].is_number_integer()) bad("node_budget must be an integer");
    if (in["node_budget"].get<long long>() <= 0) bad("node_budget must be positive");
    c.node_budget = in["node_budget"].get<std::uint64_t>();
  }
  c.threads = threads ? *threads : in.contains("threads") ? integer(in["threads"], "threads") : 1;
  const std::string prec = precision ? *precision : in.value("precision", std::string("double"));
  if (prec != "double" && prec != "extended") bad("precision must be double or extended");
  c.extended = prec == "extended";
  c.source = in.value("source", std::string("ending"));
  if (c.source != "ending" && c.source != "orbit") bad("source must be ending or orbit");
  c.bins = in.contains("bins") ? integer(in["bins"], "bins") : 64;
  c.image_size = in.contains("image_size") ? integer(in["image_size"], "image_size") : 256;
  c.cells = in.contains("cells") ? integer(in["cells"], "cells") : 64;

  if (!(c.s >= 0.0) || !std::isfinite(c.s)) bad("exponent must be >= 0");
  if (c.depth < 0 || c.depth > 60) bad("depth must be in [0, 60]");
  if (c.threads < 1 || c.threads > 256) bad("threads must be in [1, 256]");
  if (c.bins < 1 || c.bins > 100000) bad("bins must be in [1, 100000]");
  if (c.image_size < 16 || c.image_size > 4096) bad("image_size must be in [16, 4096]");
  if (c.cells < 1) bad("cells must be positive");

  c.doc["exponent"] = c.s;
  c.doc["depth"] = c.depth;
  c.doc["node_budget"] = c.node_budget;
  c.doc["precision"] = prec;
  c.doc["source"] = c.source;
  c.doc["bins"] = c.bins;
  c.doc["image_size"] = c.image_size;
  c.doc["cells"] = c.cells;
  c.doc.erase("threads");
  return c;
}

Setup build_setup(const RunConfig& c) {
  Setup st;
  const json params = c.doc.value("params", json::object());
  if (!params.is_object()) bad("params must be an object");
  if (c.example == "example1") {
    Example1Config e;
    e.s = c.s;
    e.depth = c.depth;
    if (params.contains("M")) e.M = integer(params["M"], "params.M");
    if (params.contains("kappa")) e.kappa = number(params["kappa"], "params.kappa");
    if (params.contains("ratio")) e.ratio = number(params["ratio"], "params.ratio");
    if (params.contains("theta1")) e.theta1 = number(params["theta1"], "params.theta1");
    if (params.contains("phi_scale")) e.phi.scale = number(params["phi_scale"], "params.phi_scale");
    if (params.contains("phi_base")) e.phi.base = number(params["phi_base"], "params.phi_base");
    auto ex = build_example1_group(e);
    st.group = ex.group;
    st.target = ex.zeta;
    st.certificate = ex.certificate;
    json br = json::array();
    double tsum = 0.0;
    std::vector<double> phis;
    for (int i = 0; i < ex.group.rank(); ++i) {
      const double phi = e.phi(i + 1);
      phis.push_back(phi);
      tsum += std::pow(4.0 / phi, 2.0 * e.s);
      const auto& lb = ex.certificate.letter_bounds;
      br.push_back({{"generator", i},
                    {"phi", phi},
                    {"bound", std::max(lb[static_cast<std::size_t>(2 * i)], lb[static_cast<std::size_t>(2 * i + 1)])},
                    {"closed_bound", std::pow(4.0 / phi, 2.0)}});
    }
    const auto tail = example1_tail_bound(phis, e.s, e.depth + 1);
    st.example_report = {{"admissibility_sum", e.phi.admissibility_sum(e.s)},
                         {"truncated_sum", tsum},
                         {"branches", br},
                         {"closed_tail", tail ? json(*tail) : json()}};
  } else if (c.example == "example2") {
    Example2Config e;
    if (params.contains("g1")) e.g1 = arcs(params["g1"], "params.g1");
    if (params.contains("g2")) e.g2 = arcs(params["g2"], "params.g2");
    const int ti = params.contains("target_index") ? integer(params["target_index"], "params.target_index") : 0;
    if (ti < 0 || ti > 1) bad("params.target_index must be 0 or 1");
    auto ex = build_example2_group(e);
    st.group = ex.group;
    st.target = ex.zeta[static_cast<std::size_t>(ti)];
    st.kernel = ex.quotient;
  } else if (c.example == "example3") {
    Example3Config e;
    if (params.contains("tau")) e.tau = number(params["tau"], "params.tau");
    if (params.contains("zeta_angle")) e.zeta_angle = number(params["zeta_angle"], "params.zeta_angle");
    if (params.contains("g1")) e.g1 = arcs(params["g1"], "params.g1");
    auto ex = build_example3_group(e);
    st.group = ex.group;
    st.target = ex.zeta;
    st.stabilizer = ex.stabilizer;
    st.section = ex.quotient;
    st.example_report = {{"hypothesis", "convergence type of G unverified"}};
  } else {
    st.group = c.doc.contains("group") ? custom_group(c.doc["group"]) : SchottkyGroup::trivial(1);
  }

  if (c.doc.contains("target")) {
    const json& t = c.doc["target"];
    if (!t.is_object()) bad("target must be an object");
    if (t.contains("fixed_point_of")) {
      const int i = integer(t["fixed_point_of"], "target.fixed_point_of");
      if (i < 0 || i >= st.group.rank()) bad("target.fixed_point_of out of range");
      const auto cls = classify(st.group.generators()[static_cast<std::size_t>(i)].transform);
      const std::size_t k = t.value("which", std::string("attracting")) == "repelling" ? 1 : 0;
      if (k >= cls.fixed_points.size()) bad("generator has no such fixed point");
      st.target = cls.fixed_points[k];
    } else {
      st.target = boundary(t, "target");
    }
    if (st.group.dim() == 1 && std::abs(st.target->coords()[2]) > 1e-12) bad("target must lie on the circle for dim 1");
  }
  if (c.doc.contains("interior")) {
    const Vec3 x = vec3(c.doc["interior"], "interior");
    if (!(norm(x) < 1.0)) bad("interior point must lie in the open ball");
    st.interior = InteriorPoint::from_euclidean(x);
  }
  if (c.doc.contains("stabilizer")) {
    const json& s = c.doc["stabilizer"];
    if (s == "undeclared") st.stabilizer = StabilizerSpec::undeclared();
    else if (s.is_array()) {
      std::vector<int> g;
      for (const auto& v : s) {
        const int i = integer(v, "stabilizer entry");
        if (i < 0 || i >= st.group.rank()) bad("stabilizer generator out of range");
        g.push_back(i);
      }
      st.stabilizer = g.empty() ? StabilizerSpec::trivial() : StabilizerSpec::of(g);
    } else bad("stabilizer must be \"undeclared\" or an array of generator indices");
  }
  return st;
}

SeriesOptions series_options(const RunConfig& c, const Setup& st) {
  SeriesOptions o;
  o.node_budget = c.node_budget;
  o.threads = c.threads;
  o.extended = c.extended;
  o.allow_truncation = true;
  o.certificate = st.certificate;
  o.section = st.section;
  return o;
}

}  // namespace kleinian::cli
