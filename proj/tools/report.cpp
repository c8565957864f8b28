#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cli.hpp"

namespace kleinian::cli {

json to_json(const SeriesResult& r) {
  return {{"s", r.s},
          {"requested_depth", r.requested_depth},
          {"depth", r.depth},
          {"partial_sum", r.partial_sum},
          {"tail_bound", r.tail_bound ? json(*r.tail_bound) : json()},
          {"verdict", to_string(r.verdict)},
          {"evidence", to_string(r.evidence)},
          {"ratio", r.ratio},
          {"level_sums", r.level_sums},
          {"level_max", r.level_max},
          {"nodes", r.nodes},
          {"budget_hit", r.budget_hit},
          {"incomplete_cosets", r.incomplete_cosets}};
}

json to_json(const AtomicityVerdict& v) {
  json j = {{"stabilizer_check", to_string(v.stabilizer_check)},
            {"witness", v.witness},
            {"witness_value", v.witness_value},
            {"conclusion", to_string(v.conclusion)},
            {"transcript", v.transcript}};
  j["series"] = v.series ? to_json(*v.series) : json();
  j["unreduced"] = v.unreduced ? to_json(*v.unreduced) : json();
  return j;
}

json to_json(const DeltaEstimate& d) {
  json probes = json::array();
  for (const auto& p : d.transcript)
    probes.push_back({{"depth", p.depth}, {"s", p.s}, {"evidence", to_string(p.evidence)}, {"ratio", p.ratio}});
  json per = json::array();
  for (const auto& [lo, hi] : d.per_depth) per.push_back({lo, hi});
  return {{"lo", d.lo}, {"hi", d.hi}, {"certified", d.certified}, {"budget_hit", d.budget_hit},
          {"per_depth", per}, {"transcript", probes}};
}

Histogram histogram(const AtomicMeasure& mu, int bins) {
  Histogram h;
  h.dim = mu.dim;
  if (mu.dim == 1) {
    h.lat = 1;
    h.lon = bins;
  } else {
    h.lon = std::max(2, bins);
    h.lat = std::max(1, h.lon / 2);
  }
  h.mass.assign(static_cast<std::size_t>(h.lat * h.lon), 0.0);
  for (const auto& a : mu.atoms) {
    const Vec3& p = a.point;
    const double r = norm(p);
    double phi = std::atan2(p[1], p[0]);
    if (phi < 0) phi += 2 * pi();
    int j = std::min(h.lon - 1, static_cast<int>(phi / (2 * pi()) * h.lon));
    int i = 0;
    if (mu.dim == 2) {
      const double z = r > 0 ? std::clamp(p[2] / r, -1.0, 1.0) : 0.0;
      i = std::min(h.lat - 1, static_cast<int>(std::acos(z) / pi() * h.lat));
    }
    if (r == 0.0) j = 0;
    h.mass[static_cast<std::size_t>(i * h.lon + j)] += a.weight;
  }
  return h;
}

std::string histogram_csv(const Histogram& h) {
  std::string out = h.dim == 1 ? "bin,angle_lo,angle_hi,mass\n" : "lat_bin,lon_bin,mass\n";
  char buf[128];
  for (int i = 0; i < h.lat; ++i)
    for (int j = 0; j < h.lon; ++j) {
      const double m = h.mass[static_cast<std::size_t>(i * h.lon + j)];
      if (h.dim == 1)
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", j, 2 * pi() * j / h.lon, 2 * pi() * (j + 1) / h.lon, m);
      else
        std::snprintf(buf, sizeof buf, "%d,%d,%.17g\n", i, j, m);
      out += buf;
    }
  return out;
}

namespace {

// black -> red -> yellow -> white
void shade(double t, unsigned char* px) {
  t = std::clamp(t, 0.0, 1.0);
  px[0] = static_cast<unsigned char>(std::lround(255 * std::min(1.0, 3 * t)));
  px[1] = static_cast<unsigned char>(std::lround(255 * std::clamp(3 * t - 1, 0.0, 1.0)));
  px[2] = static_cast<unsigned char>(std::lround(255 * std::clamp(3 * t - 2, 0.0, 1.0)));
}

}  // namespace

std::string render_ppm(const Histogram& h, int size) {
  const int W = size, H = h.dim == 1 ? size : size / 2;
  const double top = *std::max_element(h.mass.begin(), h.mass.end());
  auto level = [&](double m) { return top > 0 && m > 0 ? std::sqrt(m / top) : 0.0; };
  std::string out = "P6\n" + std::to_string(W) + " " + std::to_string(H) + "\n255\n";
  const std::size_t head = out.size();
  out.resize(head + static_cast<std::size_t>(3 * W * H), '\0');
  auto* px = reinterpret_cast<unsigned char*>(&out[head]);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      unsigned char* p = px + 3 * (y * W + x);
      if (h.dim == 1) {
        const double u = (x + 0.5) / W * 2 - 1, v = 1 - (y + 0.5) / H * 2;
        const double r = std::hypot(u, v);
        if (r < 0.7 || r > 0.95) {
          p[0] = p[1] = p[2] = r < 0.7 && r > 0.69 ? 60 : 0;
          continue;
        }
        double phi = std::atan2(v, u);
        if (phi < 0) phi += 2 * pi();
        const int j = std::min(h.lon - 1, static_cast<int>(phi / (2 * pi()) * h.lon));
        shade(level(h.mass[static_cast<std::size_t>(j)]), p);
      } else {
        const int j = std::min(h.lon - 1, x * h.lon / W), i = std::min(h.lat - 1, y * h.lat / H);
        shade(level(h.mass[static_cast<std::size_t>(i * h.lon + j)]), p);
      }
    }
  return out;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace kleinian::cli
