#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cli.hpp"
#include "kleinian/simd/kernels.hpp"

namespace kleinian::cli {

namespace fs = std::filesystem;

namespace {

struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_file(const fs::path& p, const std::string& bytes) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw IoFailure("cannot open " + p.string() + " for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoFailure("write failed: " + p.string());
}

struct Context {
  RunConfig cfg;
  Setup setup;
  fs::path out;
  std::string command;
};

json envelope(const Context& c, json result) {
  return {{"schema_version", kSchemaVersion},
          {"library", {{"version", kLibraryVersion}, {"simd", simd::to_string(simd::active_isa())}}},
          {"command", c.command},
          {"config", c.cfg.doc},
          {"result", std::move(result)}};
}

void write_report(const Context& c, const std::string& name, json result) {
  write_file(c.out / name, envelope(c, std::move(result)).dump(2) + "\n");
}

const char* stabilizer_check(const Setup& st) {
  if (st.stabilizer.kind == StabilizerSpec::Kind::Undeclared) return to_string(StabilizerCheck::NoStabilizerDeclared);
  for (int gi : st.stabilizer.generators)
    if (std::abs(st.group.letter(static_cast<Letter>(2 * gi)).derivative(*st.target) - 1.0) > 1e-9)
      return to_string(StabilizerCheck::DerivativeNotOne);
  return to_string(StabilizerCheck::AllDerivativesOne);
}

const BoundaryPoint& need_target(const Setup& st) {
  if (!st.target) throw Error(ErrorCode::InvalidConfig, "this command needs a target point");
  return *st.target;
}

AtomicMeasure build_measure(const Context& c) {
  const auto& st = c.setup;
  MeasureOptions mo;
  mo.series = series_options(c.cfg, st);
  mo.kernel = st.kernel;
  mo.check_domain = !st.kernel;
  if (c.cfg.source == "orbit") return orbit_measure(st.group, st.interior, c.cfg.s, c.cfg.depth, mo);
  return ending_measure(st.group, need_target(st), c.cfg.s, c.cfg.depth, st.stabilizer, mo);
}

int cmd_series(const Context& c) {
  const auto& st = c.setup;
  const auto& G = st.group;
  const auto opt = series_options(c.cfg, st);
  SeriesResult r;
  std::string kind;
  if (st.kernel) {
    kind = "kernel_poincare";
    r = kernel_poincare_partial(G, *st.kernel, st.interior, c.cfg.s, c.cfg.depth, opt);
  } else if (st.target && !st.stabilizer.is_trivial()) {
    kind = "reduced_horospherical";
    r = reduced_horospherical_partial(G, *st.target, c.cfg.s, c.cfg.depth, st.stabilizer, opt);
  } else if (st.target) {
    kind = "horospherical";
    r = horospherical_partial(G, *st.target, c.cfg.s, c.cfg.depth, opt);
  } else {
    kind = "poincare";
    r = poincare_partial(G, st.interior, c.cfg.s, c.cfg.depth, opt);
  }
  write_report(c, "series.json", {{"kind", kind}, {"series", to_json(r)}, {"example", st.example_report}});
  return r.budget_hit ? BudgetError : Ok;
}

json measure_summary(const Context& c, const AtomicMeasure& mu) {
  const auto& st = c.setup;
  json j = {{"source", to_string(mu.source)},
            {"atoms", mu.atoms.size()},
            {"total", mu.total()},
            {"max_weight", mu.max_weight()},
            {"shell_mass", mu.shell_mass(mu.depth)},
            {"series", mu.series ? to_json(*mu.series) : json()}};
  if (mu.source == MeasureSource::Ending) {
    j["stabilizer_check"] = stabilizer_check(st);
    if (!st.kernel && st.stabilizer.is_trivial()) {
      json res = json::array();
      for (int l = 0; l < st.group.num_letters(); ++l)
        res.push_back({{"letter", st.group.letter_label(static_cast<Letter>(l))},
                       {"residual", conformality_residual(mu, st.group.letter(static_cast<Letter>(l)), c.cfg.s, c.cfg.cells)}});
      j["conformality_residual"] = res;
    }
  }
  return j;
}

int cmd_measure(const Context& c) {
  const auto mu = build_measure(c);
  write_file(c.out / "atoms.csv", atoms_csv(mu));
  write_report(c, "measure.json", {{"measure", measure_summary(c, mu)}, {"example", c.setup.example_report}});
  return mu.series && mu.series->budget_hit ? BudgetError : Ok;
}

int cmd_classify(const Context& c) {
  const auto& st = c.setup;
  const auto& zeta = need_target(st);
  auto opt = series_options(c.cfg, st);
  opt.allow_truncation = false;
  const auto v = classify_atomicity(st.group, zeta, c.cfg.s, c.cfg.depth, st.stabilizer, opt);
  bool budget = false;
  for (const auto& t : v.transcript) budget = budget || t.find("BudgetExceeded") != std::string::npos;
  json result = {{"atomicity", to_json(v)}, {"jorgensen", jorgensen_test(st.group, zeta)}, {"example", st.example_report}};
  LimitOptions lo{c.cfg.node_budget, c.cfg.threads};
  try {
    const auto p = radial_profile(st.group, zeta, default_t_grid(), c.cfg.depth, lo);
    json samples = json::array();
    for (const auto& [t, d] : p.samples) samples.push_back({t, d});
    result["radial_profile"] = {{"samples", samples}, {"slope", p.slope}, {"evidence", to_string(p.evidence)}};
    json scan = json::array();
    for (double cl : default_c_grid()) scan.push_back({{"c", cl}, {"witnesses", horoball_entry(st.group, zeta, cl, c.cfg.depth, lo).size()}});
    result["horoball_scan"] = scan;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BudgetExceeded) throw;
    budget = true;
    result["radial_profile"] = e.what();
  }
  write_report(c, "classify.json", result);
  return budget ? BudgetError : Ok;
}

int cmd_render(const Context& c) {
  const auto mu = build_measure(c);
  const auto h = histogram(mu, c.cfg.bins);
  const std::string img = render_ppm(h, c.cfg.image_size);
  write_file(c.out / "render.ppm", img);
  write_file(c.out / "bins.csv", histogram_csv(h));
  int nonzero = 0;
  for (double m : h.mass) nonzero += m > 0;
  write_report(c, "render.json",
               {{"measure", measure_summary(c, mu)}, {"bins", {{"lat", h.lat}, {"lon", h.lon}, {"nonzero", nonzero}}}});
  return mu.series && mu.series->budget_hit ? BudgetError : Ok;
}

int exit_for(ErrorCode code) {
  if (code == ErrorCode::BudgetExceeded) return BudgetError;
  if (code == ErrorCode::Io) return IoError;
  return ConfigError;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Schottky group series, conformal measures and boundary renders"};
  app.require_subcommand(1, 1);
  std::string config_path, out_dir = "out";
  std::optional<int> depth, threads;
  std::optional<double> exponent;
  std::optional<std::string> precision;
  for (const char* name : {"series", "measure", "classify", "render"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--depth", depth, "word length L");
    sub->add_option("--exponent", exponent, "exponent s");
    sub->add_option("--threads", threads, "worker threads");
    sub->add_option("--precision", precision, "double or extended")->check(CLI::IsMember({"double", "extended"}));
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return ConfigError;
  }

  Context c;
  c.command = app.get_subcommands().front()->get_name();
  c.out = out_dir;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    std::ifstream f(config_path);
    if (!f) throw IoFailure("cannot read config " + config_path);
    json doc;
    try {
      doc = json::parse(f);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
    }
    c.cfg = resolve_config(doc, depth, exponent, threads, precision);
    c.setup = build_setup(c.cfg);
    std::error_code ec;
    fs::create_directories(c.out, ec);
    if (ec) throw IoFailure("cannot create " + c.out.string() + ": " + ec.message());

    int rc = Ok;
    if (c.command == "series") rc = cmd_series(c);
    else if (c.command == "measure") rc = cmd_measure(c);
    else if (c.command == "classify") rc = cmd_classify(c);
    else rc = cmd_render(c);

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_file(c.out / (c.command + ".timing.json"),
               json{{"threads", c.cfg.threads}, {"elapsed_seconds", secs}}.dump(2) + "\n");
    if (rc == BudgetError) std::cerr << "node budget exhausted, partial report written\n";
    return rc;
  } catch (const IoFailure& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return IoError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e.code());
  } catch (const json::exception& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return ConfigError;
  }
}

}  // namespace kleinian::cli
