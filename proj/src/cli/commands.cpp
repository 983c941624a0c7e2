#include "distdim/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "distdim/errors.hpp"
#include "distdim/io.hpp"
#include "distdim/projections.hpp"
#include "distdim/sequence.hpp"

namespace distdim::cli {

using nlohmann::json;

namespace {

constexpr std::uint64_t kEnumerateLimit = 1'000'000;
constexpr std::size_t kDefaultSample = 100'000;

/// Raised for bad flag combinations detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- parsing helpers ------------------------------------------------------

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(s);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::pair<std::int64_t, std::int64_t> parse_range(const std::string& text, const char* flag) {
  auto parts = split(text, ':');
  if (parts.size() != 2) throw UsageError(std::string(flag) + " expects \"a:b\"");
  try {
    std::int64_t a = std::stoll(parts[0]), b = std::stoll(parts[1]);
    if (a < 0 || b < a) throw UsageError(std::string(flag) + " needs 0 <= a <= b");
    return {a, b};
  } catch (const std::logic_error&) {
    throw UsageError(std::string(flag) + " expects integers \"a:b\"");
  }
}

Window parse_window(const std::string& text) {
  Window w;
  if (text.empty()) return w;
  auto parts = split(text, ',');
  if (parts.size() != 2) throw UsageError("--window expects \"delta_max,delta_min\"");
  if (!parts[0].empty()) w.delta_max = parse_rational(parts[0]);
  if (!parts[1].empty()) w.delta_min = parse_rational(parts[1]);
  return w;
}

std::vector<RVec> parse_pins(const std::string& text, std::size_t d) {
  std::vector<RVec> pins;
  std::string normalized = text;
  std::replace_if(normalized.begin(), normalized.end(), [](char ch) { return ch == ' ' || ch == '\t'; }, ';');
  for (const auto& item : split(normalized, ';')) {
    if (item.empty()) continue;
    RVec p;
    for (const auto& c : split(item, ',')) p.push_back(parse_rational(c));
    if (p.size() != d) throw UsageError("pin \"" + item + "\" does not have " + std::to_string(d) + " coordinates");
    pins.push_back(std::move(p));
  }
  return pins;
}

std::string window_text(const Window& w) {
  return (w.delta_max ? to_string(*w.delta_max) : std::string("-")) + "," +
         (w.delta_min ? to_string(*w.delta_min) : std::string("-"));
}

json estimate_json(const DimensionEstimate& e) {
  json j;
  j["slope"] = e.slope;
  j["exact_slope"] = e.exact_slope ? json(to_string(*e.exact_slope)) : json(nullptr);
  j["delta_max"] = to_string(e.delta_max);
  j["delta_min"] = to_string(e.delta_min);
  j["scale_sequence"] = e.scale_sequence;
  j["mode"] = to_string(e.mode);
  j["residual"] = e.residual;
  j["entries_used"] = e.used;
  return j;
}

// ---- set resolution ---------------------------------------------------------

struct SetSource {
  std::optional<BlockSchedule> schedule;
  std::optional<DigitFractal> fractal;
  PointCloud cloud;
  std::string origin;
  bool complete = false;  // every point of the depth-D set is present
};

BlockSchedule resolve_schedule(const RunConfig& c) {
  Rational rho;
  try {
    rho = parse_rational(c.rho);
  } catch (const ParseError& e) {
    throw UsageError(std::string("--rho: ") + e.what());
  }
  if (rho < 0 || rho > 1) throw UsageError("--rho must lie in [0, 1], got " + c.rho);
  if (!c.schedule_file.empty()) {
    auto rule = c.relaxed ? BlockSchedule::GrowthRule::relaxed : BlockSchedule::GrowthRule::required;
    return io::parse_schedule(io::read_file(c.schedule_file), rho, c.q, rule);
  }
  if (c.blocks < 1) throw UsageError("--blocks must be at least 1");
  if (c.q < 2) throw UsageError("--q must be at least 2");
  return schedule_for_density(rho, c.blocks, c.q);
}

SetSource resolve_set(const RunConfig& c) {
  SetSource s;
  if (!c.cloud_file.empty()) {
    s.cloud = io::parse_cloud_csv(io::read_file(c.cloud_file));
    s.origin = "file " + std::filesystem::path(c.cloud_file).filename().string();
    if (s.cloud.empty()) throw UsageError("cloud file holds no points");
    if (!c.schedule_file.empty()) s.schedule = resolve_schedule(c);
    return s;
  }
  if (c.d < 1) throw UsageError("--d must be at least 1");
  s.schedule = resolve_schedule(c);
  const std::int64_t depth = c.depth.value_or(s.schedule->blocks().back().M);
  if (depth < 1) throw UsageError("--depth must be at least 1");
  s.fractal.emplace(*s.schedule, depth, c.d);
  const BigInt total = s.fractal->point_count();
  if (c.points) {
    s.cloud = sample_points(*s.fractal, *c.points, c.seed);
    s.origin = "sampled(n=" + std::to_string(*c.points) + ", seed=" + std::to_string(c.seed) + ")";
  } else if (total <= kEnumerateLimit) {
    s.cloud = enumerate_points(*s.fractal);
    s.origin = "enumerated";
    s.complete = true;
  } else {
    s.cloud = sample_points(*s.fractal, kDefaultSample, c.seed);
    s.origin = "sampled(n=" + std::to_string(kDefaultSample) + ", seed=" + std::to_string(c.seed) + ")";
  }
  return s;
}

struct Scales {
  std::vector<Rational> deltas;
  std::vector<std::int64_t> levels;
  std::string label;
};

Scales resolve_scales(const RunConfig& c, const SetSource& s) {
  Scales out;
  if (!c.levels.empty()) {
    auto [a, b] = parse_range(c.levels, "--levels");
    for (auto m = a; m <= b; ++m) out.levels.push_back(m);
    out.label = "q-adic levels " + std::to_string(a) + ".." + std::to_string(b) + " (q=" + std::to_string(c.q) + ")";
  } else if (s.fractal) {
    out.levels = checkpoint_levels(*s.schedule, s.fractal->depth());
    out.label = "checkpoint q^-M_k (q=" + std::to_string(c.q) + ")";
  } else {
    throw UsageError("--levels is required when the set comes from a cloud file");
  }
  if (out.levels.size() < 2) throw UsageError("need at least two scales; widen --levels or --depth");
  out.deltas = q_adic_scales(c.q, out.levels);
  return out;
}

NormSpec resolve_norm(const RunConfig& c) {
  if (c.norm_file.empty()) throw UsageError("--norm <file> is required");
  return io::parse_norm(io::read_file(c.norm_file));
}

// ---- output ---------------------------------------------------------------

std::string utc_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

class Output {
 public:
  Output(const RunConfig& c, double tol) : config_(c), tol_(tol) {
    if (!c.out.empty()) std::filesystem::create_directories(c.out);
  }

  /// Comment lines naming the command, seed and tolerance.
  std::string header() const {
    std::string h = "# distdim " + config_.command + "\n# seed=" + std::to_string(config_.seed) + "\n";
    std::ostringstream t;
    t << std::setprecision(17) << tol_;
    h += "# tol=" + t.str() + "\n";
    if (!config_.no_timestamp) h += "# timestamp=" + utc_now() + "\n";
    return h;
  }

  void data(const std::string& name, const std::string& body) const {
    if (config_.out.empty()) return;
    io::write_file((std::filesystem::path(config_.out) / name).string(), header() + body);
  }

  json report(json constants, json result, bool pass) const {
    json r;
    r["command"] = config_.command;
    r["seed"] = config_.seed;
    r["tolerance"] = tol_;
    if (!config_.no_timestamp) r["timestamp"] = utc_now();
    r["constants"] = std::move(constants);
    r["result"] = std::move(result);
    r["pass"] = pass;
    return r;
  }

  int finish(std::ostream& out, const json& report) const {
    const std::string text = report.dump(2) + "\n";
    out << text;
    if (!config_.out.empty()) io::write_file((std::filesystem::path(config_.out) / "report.json").string(), text);
    return report.at("pass").get<bool>() ? exit_pass : exit_math;
  }

 private:
  const RunConfig& config_;
  double tol_;
};

io::NumberFormat format_of(const RunConfig& c) { return c.decimal ? io::NumberFormat::decimal : io::NumberFormat::exact; }

json schedule_json(const BlockSchedule& s, std::int64_t depth) {
  json blocks = json::array();
  for (const auto& b : s.blocks()) blocks.push_back({b.m, b.M});
  json density = json::array();
  for (auto M : checkpoint_levels(s, depth)) density.push_back({{"M", M}, {"density", to_string(density_profile(s, M))}});
  return {{"blocks", blocks}, {"checkpoint_density", density}, {"target_density", to_string(s.target_density())},
          {"growth_rule", s.growth_rule() == BlockSchedule::GrowthRule::required ? "required" : "relaxed"}};
}

json set_constants(const RunConfig& c, const SetSource& s) {
  json k;
  k["origin"] = s.origin;
  k["points"] = s.cloud.size();
  k["d"] = s.cloud.dim();
  if (s.schedule) {
    k["q"] = s.schedule->base();
    k["rho"] = to_string(s.schedule->target_density());
  }
  if (s.fractal) k["depth"] = s.fractal->depth();
  (void)c;
  return k;
}

// ---- subcommands ----------------------------------------------------------

int cmd_build_set(const RunConfig& c, std::ostream& out) {
  Output o(c, 0.0);
  auto s = resolve_set(c);
  auto bad = first_invalid_point(*s.fractal, s.cloud);
  o.data("schedule.txt", io::schedule_to_text(*s.schedule));
  o.data("cloud.csv", io::cloud_to_csv(s.cloud, format_of(c)));
  json result = schedule_json(*s.schedule, s.fractal->depth());
  result["point_count_of_set"] = to_string(s.fractal->point_count());
  result["digit_structure_valid"] = !bad.has_value();
  return o.finish(out, o.report(set_constants(c, s), result, !bad.has_value()));
}

int cmd_covering_profile(const RunConfig& c, std::ostream& out) {
  Output o(c, c.tol.value_or(0.1));
  auto s = resolve_set(c);
  auto sc = resolve_scales(c, s);
  auto window = parse_window(c.window);
  auto profile = grid_profile(s.cloud, sc.deltas, sc.label);
  o.data("profile.csv", io::profile_to_csv(profile));
  json result;
  auto reg = dimension_slope(profile, window, SlopeMode::regression, c.q);
  auto top = dimension_slope(profile, window, SlopeMode::max_two_point, c.q);
  result["regression"] = estimate_json(reg);
  result["max_two_point"] = estimate_json(top);
  json anchor = json::array();
  for (const auto& a : profile.anchor()) anchor.push_back(to_string(a));
  result["anchor"] = anchor;
  bool pass = reg.in_sanity_band(s.cloud.dim()) && top.in_sanity_band(s.cloud.dim());
  if (s.fractal) {
    std::vector<ProfileEntry> exact;
    for (auto m : sc.levels) exact.push_back({Rational(1) / Rational(ipow(c.q, m)), exact_covering_count(*s.fractal, m), Provenance::exact});
    CoveringProfile ep(exact, sc.label);
    o.data("exact_profile.csv", io::profile_to_csv(ep));
    result["exact"] = estimate_json(dimension_slope(ep, window, SlopeMode::regression, c.q));
    if (s.complete) {
      bool agree = true;
      for (std::size_t i = 0; i < exact.size(); ++i) agree = agree && exact[i].count == profile.entries()[i].count;
      result["oracle_agreement"] = agree;
      pass = pass && agree;
    }
  }
  json k = set_constants(c, s);
  k["scale_sequence"] = sc.label;
  k["window"] = window_text(window);
  k["sanity_band"] = "[0, d + 0.1]";
  return o.finish(out, o.report(k, result, pass));
}

int cmd_distance_profile(const RunConfig& c, std::ostream& out) {
  Output o(c, c.tol.value_or(0.0));
  auto s = resolve_set(c);
  auto norm = resolve_norm(c);
  auto sc = resolve_scales(c, s);
  DistanceOptions opt;
  opt.seed = c.seed;
  opt.sample_pairs = c.pairs;
  DistanceCloud dist;
  auto pins = parse_pins(c.pins, s.cloud.dim());
  if (pins.size() > 1) throw UsageError("distance-profile takes at most one pin");
  dist = pins.empty() ? distance_set(s.cloud, norm, opt) : pinned_distance_set(s.cloud, norm, pins[0], opt);
  o.data("distances.csv", io::cloud_to_csv(dist.values, format_of(c)));
  json result;
  result["source"] = dist.source.describe();
  result["distinct_values"] = dist.values.size();
  bool pass = true;
  if (dist.values.size() >= 1) {
    auto profile = grid_profile(dist.values, sc.deltas, sc.label);
    o.data("profile.csv", io::profile_to_csv(profile));
    if (dist.values.size() >= 2) result["regression"] = estimate_json(dimension_slope(profile, parse_window(c.window)));
  }
  json k = set_constants(c, s);
  k["norm"] = describe(norm);
  k["scale_sequence"] = sc.label;
  if (const auto* poly = std::get_if<PolyhedralNorm>(&norm); poly && s.fractal && dist.values.is_exact()) {
    auto env = digit_envelope(*s.schedule, c.q, s.cloud.dim(), *poly);
    auto check = verify_envelope(dist, env, c.q, s.fractal->depth());
    k["pad"] = env.pad;
    k["lead"] = env.lead;
    k["shift"] = env.shift;
    json blocks = json::array();
    for (const auto& b : env.blocks) blocks.push_back({b.m, b.M});
    result["envelope"] = {{"blocks", blocks}, {"checked", check.checked}, {"pass", check.pass}};
    if (check.counterexample) result["envelope"]["counterexample"] = to_string(*check.counterexample);
    pass = check.pass;
  }
  return o.finish(out, o.report(k, result, pass));
}

int cmd_verify_bound(const RunConfig& c, std::ostream& out) {
  const double tol = c.tol.value_or(0.1);
  Output o(c, tol);
  auto s = resolve_set(c);
  auto norm = resolve_norm(c);
  auto sc = resolve_scales(c, s);
  auto run = verify_bound(s.cloud, norm, sc.deltas, c.pin_count, c.seed, tol, sc.label);
  std::string pins_csv = "index,slope\n";
  json pins = json::array();
  for (std::size_t i = 0; i < run.pin_indices.size(); ++i) {
    std::ostringstream row;
    row << std::setprecision(17) << run.pin_indices[i] << "," << run.pin_estimates[i].slope << "\n";
    pins_csv += row.str();
    pins.push_back({{"index", run.pin_indices[i]}, {"slope", run.pin_estimates[i].slope}});
  }
  o.data("pins.csv", pins_csv);
  json result;
  result["set"] = estimate_json(run.set_estimate);
  result["pins"] = pins;
  result["best_pin"] = run.pin_indices[run.best];
  result["best_pinned"] = estimate_json(run.pin_estimates[run.best]);
  result["threshold"] = run.threshold;
  result["margin"] = run.pin_estimates[run.best].slope - run.threshold - (-tol);
  json k = set_constants(c, s);
  k["norm"] = describe(norm);
  k["scale_sequence"] = sc.label;
  k["pin_count"] = c.pin_count;
  k["threshold_rule"] = "set_slope / d - tol";
  k["dimension_surrogate"] = "box-count slope along the declared scale sequence";
  return o.finish(out, o.report(k, result, run.pass));
}

int cmd_verify_sharpness(const RunConfig& c, std::ostream& out) {
  const double tol = c.tol.value_or(0.05);
  Output o(c, tol);
  if (!c.cloud_file.empty()) throw UsageError("verify-sharpness builds its set from the schedule; drop --cloud");
  auto sched = resolve_schedule(c);
  auto norm = resolve_norm(c);
  const auto* poly = std::get_if<PolyhedralNorm>(&norm);
  if (!poly) throw UsageError("verify-sharpness needs a polyhedral norm");
  const std::int64_t depth = c.depth.value_or(sched.blocks().back().M);
  auto window = parse_window(c.window);
  auto run = verify_sharpness(sched, *poly, c.d, depth, window, tol, c.pad);
  o.data("upper.csv", io::profile_to_csv(run.upper));
  o.data("lower.csv", io::profile_to_csv(run.lower));
  json result;
  result["certified"] = run.certificate.certified;
  result["carry_states"] = run.certificate.states;
  if (!run.certificate.certified) {
    json x = json::array(), y = json::array();
    for (const auto& v : run.certificate.x) x.push_back(to_string(v));
    for (const auto& v : run.certificate.y) y.push_back(to_string(v));
    result["witness"] = {{"facet", run.certificate.facet}, {"x", x}, {"y", y}, {"value", to_string(run.certificate.value)}};
  }
  result["upper"] = estimate_json(run.upper_estimate);
  result["lower"] = estimate_json(run.lower_estimate);
  result["upper_max_two_point"] = estimate_json(run.upper_peak);
  result["target"] = to_string(run.target);
  json k;
  k["q"] = c.q;
  k["d"] = c.d;
  k["depth"] = depth;
  k["norm"] = describe(norm);
  k["pad"] = run.envelope.pad;
  k["pad_overridden"] = c.pad.has_value();
  k["lead"] = run.envelope.lead;
  k["shift"] = run.envelope.shift;
  k["window"] = window_text(window);
  k["schedule"] = schedule_json(sched, depth);
  k["scale_sequence"] = "checkpoint q^-M_k";
  k["slope_mode"] = "regression (bracket); max-two-point reported";
  return o.finish(out, o.report(k, result, run.pass));
}

int cmd_jarvenpaa(const RunConfig& c, std::ostream& out) {
  const double tol = c.tol.value_or(0.05);
  Output o(c, tol);
  auto s = resolve_set(c);
  auto sc = resolve_scales(c, s);
  auto window = parse_window(c.window);
  auto r = jarvenpaa_check(s.cloud, c.n, sc.deltas, window, tol, c.q, sc.label);
  json subsets = json::array();
  std::string csv = "indices,slope\n";
  for (const auto& sub : r.subsets) {
    std::string idx;
    for (auto i : sub.indices) idx += (idx.empty() ? "" : " ") + std::to_string(i + 1);
    subsets.push_back({{"indices", idx}, {"estimate", estimate_json(sub.estimate)}});
    std::ostringstream row;
    row << std::setprecision(17) << idx << "," << sub.estimate.slope << "\n";
    csv += row.str();
  }
  o.data("subsets.csv", csv);
  json result;
  result["set"] = estimate_json(r.set_estimate);
  result["subsets"] = subsets;
  result["best"] = subsets[r.best]["indices"];
  result["margin"] = r.margin;
  result["exact_margin"] = r.exact_margin ? json(to_string(*r.exact_margin)) : json(nullptr);
  json k = set_constants(c, s);
  k["n"] = c.n;
  k["scale_sequence"] = sc.label;
  k["window"] = window_text(window);
  return o.finish(out, o.report(k, result, r.pass));
}

std::vector<Vec> double_pins(const std::vector<RVec>& pins) {
  std::vector<Vec> out;
  for (const auto& p : pins) out.push_back(to_double(p));
  return out;
}

int cmd_transversality_report(const RunConfig& c, std::ostream& out) {
  Output o(c, c.tol.value_or(0.0));
  auto norm = resolve_norm(c);
  const std::size_t d = dimension(norm);
  auto pins = double_pins(parse_pins(c.pins, d));
  if (pins.empty()) throw UsageError("--pins is required");
  PointCloud cloud;
  std::string origin;
  if (!c.cloud_file.empty()) {
    cloud = io::parse_cloud_csv(io::read_file(c.cloud_file));
    origin = "file " + std::filesystem::path(c.cloud_file).filename().string();
  } else {
    if (d != 2) throw UsageError("the default grid cloud is planar; pass --cloud for d != 2");
    cloud = unit_grid(std::min<std::size_t>(c.grid, 400));
    origin = "grid " + std::to_string(std::min<std::size_t>(c.grid, 400)) + "^2 on [0,1]^2";
  }
  ProjectionFamily family(norm, pins);
  double min_volume = std::numeric_limits<double>::infinity();
  std::size_t worst = 0, skipped = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    try {
      double v = transversality_volume(norm, cloud.point_double(i), pins);
      if (v < min_volume) {
        min_volume = v;
        worst = i;
      }
    } catch (const GradientUndefined&) {
      ++skipped;
    }
  }
  json k;
  k["norm"] = describe(norm);
  k["k"] = pins.size();
  k["d"] = d;
  k["cloud"] = origin;
  k["points"] = cloud.size();
  k["linf_bound"] = linf_bound(norm);
  json result;
  result["min_volume"] = min_volume;
  result["worst_point"] = worst;
  result["points_on_pins_or_ridges"] = skipped;
  const bool transversal = min_volume > 0.0 && std::isfinite(min_volume);
  result["L"] = transversal ? min_volume : 0.0;
  if (transversal) k["C_L"] = neighbourhood_constant(pins.size(), min_volume);
  if (const auto* smooth = std::get_if<SmoothNorm>(&norm)) {
    k["Lambda"] = direction_constant(*smooth);
    k["eta"] = direction_aperture(*smooth);
    json h = json::object();
    for (double eps : {0.5, 0.25, 0.125, 0.0625}) {
      std::ostringstream key;
      key << eps;
      h[key.str()] = modulus_h(*smooth, eps);
    }
    result["modulus_h"] = h;
    double worst_residual = 0.0;
    for (const auto& z : sphere_sample(d, 1000)) {
      auto rep = duality_check(*smooth, z, 1e-9);
      worst_residual = std::max({worst_residual, rep.pairing_residual, rep.norm_residual});
    }
    result["duality_max_residual"] = worst_residual;
  }
  return o.finish(out, o.report(k, result, transversal));
}

int cmd_fiber_scan(const RunConfig& c, std::ostream& out) {
  const double tol = c.tol.value_or(0.15);
  Output o(c, tol);
  auto norm = resolve_norm(c);
  const std::size_t d = dimension(norm);
  auto pins = double_pins(parse_pins(c.pins, d));
  if (pins.empty()) throw UsageError("--pins is required");
  PointCloud cloud;
  std::string origin;
  if (!c.cloud_file.empty()) {
    cloud = io::parse_cloud_csv(io::read_file(c.cloud_file));
    origin = "file " + std::filesystem::path(c.cloud_file).filename().string();
  } else {
    if (d != 2) throw UsageError("the default grid cloud is planar; pass --cloud for d != 2");
    cloud = unit_grid(c.grid);
    origin = "grid " + std::to_string(c.grid) + "^2 on [0,1]^2";
  }
  auto [a, b] = parse_range(c.deltas, "--deltas");
  std::vector<double> deltas;
  for (auto j = a; j <= b; ++j) deltas.push_back(std::ldexp(1.0, -static_cast<int>(j)));
  ProjectionFamily family(norm, pins);
  FiberIndex index(family, cloud);
  auto xis = xi_samples(family, cloud, c.xi_count, c.seed);
  auto scan = weak_transversality_scan(index, deltas, xis, c.radius);
  std::string csv = "delta,max_m,worst_xi\n";
  json rows = json::array();
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    std::ostringstream row;
    row << std::setprecision(17) << deltas[i] << "," << scan.max_m[i] << "," << scan.worst_xi[i] << "\n";
    csv += row.str();
    rows.push_back({{"delta", deltas[i]}, {"max_m", scan.max_m[i]}, {"worst_xi", scan.worst_xi[i]}});
  }
  o.data("scan.csv", csv);
  json k;
  k["norm"] = describe(norm);
  k["k"] = pins.size();
  k["cloud"] = origin;
  k["xi_samples"] = xis.size();
  k["radius_factor"] = c.radius;
  k["scale_sequence"] = "dyadic 2^-" + std::to_string(a) + "..2^-" + std::to_string(b);
  json result;
  result["scales"] = rows;
  result["exponent"] = scan.exponent;
  result["residual"] = scan.residual;
  result["all_certified"] = scan.all_certified;
  return o.finish(out, o.report(k, result, scan.all_certified && scan.exponent <= tol));
}

}  // namespace

// ---- shared analysis ------------------------------------------------------

std::vector<std::int64_t> checkpoint_levels(const BlockSchedule& schedule, std::int64_t depth) {
  std::vector<std::int64_t> out;
  for (auto M : schedule.checkpoints())
    if (M <= depth) out.push_back(M);
  return out;
}

PointCloud unit_grid(std::size_t n) {
  if (n == 0) throw std::invalid_argument("grid needs at least one cell per side");
  Vec flat;
  flat.reserve(2 * n * n);
  const double h = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      flat.push_back((static_cast<double>(i) + 0.5) * h);
      flat.push_back((static_cast<double>(j) + 0.5) * h);
    }
  return PointCloud::approximate_flat(2, std::move(flat));
}

BoundRun verify_bound(const PointCloud& cloud, const NormSpec& norm, const std::vector<Rational>& scales,
                      std::size_t pin_count, std::uint64_t seed, double tol, const std::string& scale_sequence) {
  if (pin_count == 0) throw std::invalid_argument("need at least one candidate pin");
  if (cloud.empty()) throw std::invalid_argument("empty cloud");
  BoundRun run;
  run.tol = tol;
  run.set_estimate = dimension_slope(grid_profile(cloud, scales, scale_sequence));
  run.threshold = run.set_estimate.slope / static_cast<double>(cloud.dim()) - tol;
  CounterRng rng(seed);
  for (std::size_t i = 0; i < pin_count; ++i) {
    std::size_t idx = static_cast<std::size_t>(rng.below(cloud.size(), 0x9e11, i));
    run.pin_indices.push_back(idx);
    DistanceCloud dist = cloud.is_exact() ? pinned_distance_set(cloud, norm, cloud.point(idx))
                                          : pinned_distance_set(cloud, norm, cloud.point_double(idx));
    run.pin_estimates.push_back(dimension_slope(grid_profile(dist.values, scales, scale_sequence)));
    if (run.pin_estimates.back().slope > run.pin_estimates[run.best].slope) run.best = i;
  }
  run.pass = run.pin_estimates[run.best].slope >= run.threshold;
  return run;
}

SharpnessRun verify_sharpness(const BlockSchedule& schedule, const PolyhedralNorm& norm, std::size_t d,
                              std::int64_t depth, const Window& window, double tol,
                              std::optional<std::int64_t> pad_override) {
  if (norm.dim() != d) throw std::invalid_argument("norm dimension differs from --d");
  SharpnessRun run;
  run.tol = tol;
  run.target = schedule.target_density();
  run.envelope = digit_envelope(schedule, schedule.base(), d, norm);
  if (pad_override) {
    if (*pad_override < 0) throw std::invalid_argument("pad must be nonnegative");
    for (std::size_t k = 0; k < run.envelope.blocks.size(); ++k)
      run.envelope.blocks[k].M = schedule.blocks()[k].M + *pad_override;
    run.envelope.pad = *pad_override;
  }
  run.certificate = certify_envelope(schedule, norm, run.envelope, depth);
  auto levels = checkpoint_levels(schedule, depth);
  run.upper = distance_upper_profile(schedule, norm, depth, levels);
  run.lower = distance_lower_profile(schedule, norm, depth, levels);
  run.upper_estimate = dimension_slope(run.upper, window, SlopeMode::regression);
  run.lower_estimate = dimension_slope(run.lower, window, SlopeMode::regression);
  run.upper_peak = dimension_slope(run.upper, window, SlopeMode::max_two_point);
  const double target = to_double(run.target);
  run.pass = run.certificate.certified && run.upper_estimate.slope <= target + tol &&
             run.lower_estimate.slope >= target - tol;
  return run;
}

// ---- entry ----------------------------------------------------------------

int dispatch(const RunConfig& c, std::ostream& out) {
  if (c.command == "build-set") return cmd_build_set(c, out);
  if (c.command == "covering-profile") return cmd_covering_profile(c, out);
  if (c.command == "distance-profile") return cmd_distance_profile(c, out);
  if (c.command == "verify-bound") return cmd_verify_bound(c, out);
  if (c.command == "verify-sharpness") return cmd_verify_sharpness(c, out);
  if (c.command == "jarvenpaa") return cmd_jarvenpaa(c, out);
  if (c.command == "transversality-report") return cmd_transversality_report(c, out);
  if (c.command == "fiber-scan") return cmd_fiber_scan(c, out);
  throw UsageError("unknown command \"" + c.command + "\"");
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"distdim: covering numbers, distance sets and projections of digit fractals"};
  app.require_subcommand(1);
  RunConfig c;

  auto add_set = [&c](CLI::App* s) {
    s->add_option("--q", c.q, "digit base q")->capture_default_str();
    s->add_option("--rho", c.rho, "target density in [0,1], e.g. 1/2")->capture_default_str();
    s->add_option("--blocks", c.blocks, "number of blocks K")->capture_default_str();
    s->add_option("--schedule", c.schedule_file, "schedule file of \"k m M\" lines");
    s->add_flag("--relaxed", c.relaxed, "accept schedule files that break the growth rule");
    s->add_option("--depth", c.depth, "digit depth D (default: last M_K)");
    s->add_option("--d", c.d, "ambient dimension")->capture_default_str();
    s->add_option("--points", c.points, "sample this many points instead of enumerating");
    s->add_option("--cloud", c.cloud_file, "read the set from a CSV cloud instead");
  };
  auto add_common = [&c](CLI::App* s) {
    s->add_option("--seed", c.seed, "seed for every deterministic sample")->capture_default_str();
    s->add_option("--tol", c.tol, "tolerance of the pass/fail check");
    s->add_option("--out", c.out, "output directory for data files and report.json");
    s->add_flag("--no-timestamp", c.no_timestamp, "omit timestamps so reruns are byte-identical");
    s->add_flag("--decimal", c.decimal, "write clouds as decimals instead of p/q");
  };
  auto add_scales = [&c](CLI::App* s) {
    s->add_option("--levels", c.levels, "q-adic levels a:b (default: checkpoints M_k)");
    s->add_option("--window", c.window, "scale window \"delta_max,delta_min\"");
  };
  auto add_norm = [&c](CLI::App* s) { s->add_option("--norm", c.norm_file, "norm JSON file")->required(); };

  auto* build = app.add_subcommand("build-set", "build a digit set: schedule and cloud");
  add_set(build);
  add_common(build);
  auto* cover = app.add_subcommand("covering-profile", "grid covering profile and slope of a set");
  add_set(cover);
  add_common(cover);
  add_scales(cover);
  auto* dist = app.add_subcommand("distance-profile", "distance set, its profile and digit envelope");
  add_set(dist);
  add_common(dist);
  add_scales(dist);
  add_norm(dist);
  dist->add_option("--pin", c.pins, "pin \"x,y\" for a pinned distance set");
  dist->add_option("--pairs", c.pairs, "sample this many pairs instead of all");
  auto* bound = app.add_subcommand("verify-bound", "pinned distance slope versus set slope / d");
  add_set(bound);
  add_common(bound);
  add_scales(bound);
  add_norm(bound);
  bound->add_option("--pin-count", c.pin_count, "candidate pins")->capture_default_str();
  auto* sharp = app.add_subcommand("verify-sharpness", "certified slope brackets for a polyhedral norm");
  add_set(sharp);
  add_common(sharp);
  add_norm(sharp);
  sharp->add_option("--window", c.window, "scale window \"delta_max,delta_min\"");
  sharp->add_option("--pad", c.pad, "override the envelope pad");
  auto* jar = app.add_subcommand("jarvenpaa", "max coordinate projection slope");
  add_set(jar);
  add_common(jar);
  add_scales(jar);
  jar->add_option("--n", c.n, "projection rank")->capture_default_str();
  auto* trans = app.add_subcommand("transversality-report", "gradient volumes and norm constants");
  add_common(trans);
  add_norm(trans);
  trans->add_option("--pins", c.pins, "pins \"x,y;x,y\"")->required();
  trans->add_option("--cloud", c.cloud_file, "evaluation cloud (default: grid on [0,1]^2)");
  trans->add_option("--grid", c.grid, "grid cells per side (capped at 400)")->capture_default_str();
  auto* fiber = app.add_subcommand("fiber-scan", "fiber cover exponent of a pinned distance family");
  add_common(fiber);
  add_norm(fiber);
  fiber->add_option("--pins", c.pins, "pins \"x,y;x,y\"")->required();
  fiber->add_option("--cloud", c.cloud_file, "cloud (default: grid on [0,1]^2)");
  fiber->add_option("--grid", c.grid, "grid cells per side")->capture_default_str();
  fiber->add_option("--deltas", c.deltas, "dyadic exponents a:b, delta = 2^-j")->capture_default_str();
  fiber->add_option("--xi-count", c.xi_count, "sampled fiber targets")->capture_default_str();
  fiber->add_option("--radius", c.radius, "cover radius in units of delta")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_pass;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_pass;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return exit_usage;
  }
  c.command = app.get_subcommands().front()->get_name();
  try {
    return dispatch(c, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"distdim"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace distdim::cli
