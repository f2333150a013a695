#include "aztec/experiments.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "aztec/airy.hpp"
#include "aztec/continuum.hpp"
#include "aztec/finite.hpp"
#include "aztec/sampler.hpp"
#include "aztec/tacnode.hpp"
#include "aztec/walk.hpp"

namespace aztec {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class T>
T get(const json& j, const char* key, T def) {
  if (!j.contains(key) || j.at(key).is_null()) return def;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

template <class T>
T need(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) throw ConfigError(std::string("missing field '") + key + "'");
  return get<T>(j, key, T{});
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

std::string read_text(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string csv_table(const std::vector<std::pair<double, double>>& rows) {
  std::ostringstream os;
  os.precision(15);
  os << "level,probability\n";
  for (auto [a, b] : rows) os << a << ',' << b << '\n';
  return os.str();
}

// g - t^2 linear on each piece: {"pieces": [{"a": -1, "b": 0, "h0": 0.2, "h1": 1.0}, ...]}.
BarrierSpec tilted_linear(const json& j) {
  BarrierSpec s;
  for (const auto& p : need<json>(j, "pieces")) {
    const double a = need<double>(p, "a"), b = need<double>(p, "b");
    const double h0 = need<double>(p, "h0"), h1 = need<double>(p, "h1");
    if (!(a < b)) throw ConfigError("tilted_linear piece needs a < b");
    s.pieces.push_back({a, b, [=](double t) { return t * t + h0 + (h1 - h0) * (t - a) / (b - a); }});
  }
  return s;
}

}  // namespace

BarrierSpec barrier_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("barrier must be a JSON object");
  const std::string kind = need<std::string>(j, "kind");
  BarrierSpec g;
  if (kind == "none") {
    g = BarrierSpec::none();
  } else if (kind == "parabola") {
    g = BarrierSpec::parabola(need<double>(j, "R"), need<double>(j, "L"), need<double>(j, "M"));
  } else if (kind == "point") {
    g = BarrierSpec::point(need<double>(j, "t0"), need<double>(j, "value"));
  } else if (kind == "step_down") {
    g = BarrierSpec::step_down(need<double>(j, "R"), need<double>(j, "drop"), need<double>(j, "t0"),
                               need<double>(j, "L"), need<double>(j, "M"));
  } else if (kind == "v_shape") {
    g = BarrierSpec::v_shape(need<double>(j, "c"), need<double>(j, "slope"), need<double>(j, "L"),
                             need<double>(j, "M"));
  } else if (kind == "parabola_with_point") {
    g = BarrierSpec::parabola_with_point(need<double>(j, "R"), need<double>(j, "u"), need<double>(j, "t0"),
                                         need<double>(j, "L"), need<double>(j, "M"));
  } else if (kind == "tilted_linear") {
    g = tilted_linear(j);
  } else {
    throw ConfigError("unknown barrier kind '" + kind + "'");
  }
  if (j.contains("pinned")) {
    const json& p = j.at("pinned");
    g.pinned = true;
    g.R = need<double>(p, "R");
    g.t1 = need<double>(p, "t1");
    g.t2 = need<double>(p, "t2");
  }
  try {
    g.check();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("barrier: ") + e.what());
  }
  return g;
}

json load_config(const std::string& path, const std::vector<std::string>& overrides) {
  json cfg = json::object();
  if (!path.empty()) {
    try {
      cfg = json::parse(read_text(path));
    } catch (const json::parse_error& e) {
      throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
  }
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + kv + "' is not key=value");
    const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    json v;
    try {
      v = json::parse(val);
    } catch (const json::parse_error&) {
      v = val;
    }
    cfg[key] = v;
  }
  return cfg;
}

json tiling_to_json(const Tiling& t) {
  AztecDomain dom(t.n);
  json ds = json::array();
  for (const auto& d : t.dominoes)
    ds.push_back({{"x", d.x},
                  {"y", d.y},
                  {"orient", d.orient == Orientation::Horizontal ? "h" : "v"},
                  {"class", class_name(classify_domino(d, dom))}});
  return {{"n", t.n}, {"dominoes", ds}};
}

Tiling tiling_from_json(const json& j) {
  Tiling t;
  t.n = need<int>(j, "n");
  for (const auto& d : need<json>(j, "dominoes")) {
    const std::string o = need<std::string>(d, "orient");
    if (o != "h" && o != "v") throw ConfigError("domino orient must be 'h' or 'v'");
    t.dominoes.push_back({need<int>(d, "x"), need<int>(d, "y"),
                          o == "h" ? Orientation::Horizontal : Orientation::Vertical});
  }
  if (!validate_tiling(t).ok) throw ConfigError("tiling does not cover the Aztec diamond exactly");
  return t;
}

std::string render_svg(const Tiling& t, const RenderOptions& o) {
  const int n = t.n;
  const double c = o.cell, half = (n + 2) * c;
  AztecDomain dom(n);
  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << -half << ' ' << -half << ' '
     << 2 * half << ' ' << 2 * half << "\" width=\"" << 2 * half << "\" height=\"" << 2 * half << "\">\n";
  // Lattice y points up; the rotated view turns the diamond into a square.
  os << "<g transform=\"" << (o.rotate45 ? "rotate(-45) " : "") << "scale(" << c << ',' << -c << ")\">\n";
  static const std::map<DominoClass, const char*> fill = {{DominoClass::N, "#d62728"},
                                                          {DominoClass::S, "#1f77b4"},
                                                          {DominoClass::W, "#2ca02c"},
                                                          {DominoClass::E, "#ffbf00"}};
  for (const auto& d : t.dominoes) {
    const bool h = d.orient == Orientation::Horizontal;
    os << "<rect class=\"domino " << class_name(classify_domino(d, dom)) << "\" x=\"" << d.x << "\" y=\"" << d.y
       << "\" width=\"" << (h ? 2 : 1) << "\" height=\"" << (h ? 1 : 2) << "\" fill=\""
       << fill.at(classify_domino(d, dom)) << "\" stroke=\"black\" stroke-width=\"0.05\"/>\n";
  }
  if (o.lines) {
    LineEnsemble le = tiling_to_lines(t);
    for (std::size_t i = 0; i < le.paths.size(); ++i) {
      os << "<polyline class=\"line\" fill=\"none\" stroke=\"" << (i == 0 ? "black" : "#444")
         << "\" stroke-width=\"" << (i == 0 ? 0.2 : 0.1) << "\" points=\"";
      for (auto [x2, y2] : le.paths[i].pts2) os << x2 / 2.0 << ',' << y2 / 2.0 << ' ';
      os << "\"/>\n";
    }
  }
  if (o.cut && std::isfinite(o.R)) {
    const double r = ScalingMap{n, o.R}.r();
    os << "<line class=\"cut\" x1=\"" << -(n + 1) << "\" y1=\"" << r << "\" x2=\"" << n + 1 << "\" y2=\"" << r
       << "\" stroke=\"magenta\" stroke-width=\"0.15\" stroke-dasharray=\"0.5,0.3\"/>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

json fredholm_json(const FredholmResult& r, const json& params) {
  return {{"value", r.value},     {"raw", r.raw},   {"error_estimate", r.error_estimate},
          {"nodes", r.nodes},     {"X_max", r.x_max}, {"slices", r.slices},
          {"clamped", r.clamped}, {"route", r.route}, {"params", params}};
}

// ---------------------------------------------------------------- finite-n and MC arms

FiniteTacnode finite_tacnode(int n, double R, double t, double u) {
  if (u > R) throw DomainError("finite_tacnode needs u <= R");
  ScalingMap sm{n, 0.0};
  FiniteTacnode f;
  f.L = std::max(-6.0, sm.tau_of_time(2));
  f.M = sm.tau_of_time(2.0 * n - 2);
  if (!(t > f.L && t < f.M)) throw DomainError("finite_tacnode: time outside the lattice window");
  f.joint = stay_below_prob_finite(n, BarrierSpec::parabola_with_point(R, u, t, f.L, f.M), f.L, f.M).value;
  f.restriction = stay_below_prob_finite(n, BarrierSpec::parabola(R, f.L, f.M), f.L, f.M).value;
  if (!(f.restriction > 0)) throw InvariantError("finite_tacnode: restriction has probability 0");
  f.value = f.joint / f.restriction;
  return f;
}

AcceptanceEstimate restricted_acceptance(int n, double R, long samples, std::uint64_t seed) {
  AcceptanceEstimate a;
  const auto t0 = Clock::now();
  const int cap = RestrictionParams{R}.cap(n);
  for (long i = 0; i < samples; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    if (satisfies_restriction(top_curve(sample_uniform(n, rng)), cap)) ++a.accepted;
  }
  a.samples = samples;
  a.p = samples ? double(a.accepted) / samples : 0;
  a.se = samples ? std::sqrt(std::max(a.p * (1 - a.p), 1.0 / samples) / samples) : 0;
  a.seconds = seconds_since(t0);
  return a;
}

McConditional mc_tacnode(int n, double R, double t, double u, long samples, std::uint64_t seed) {
  McConditional m;
  const int cap = RestrictionParams{R}.cap(n);
  long hits = 0;
  for (long i = 0; i < samples; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    TopCurveX x = top_curve(sample_uniform(n, rng));
    if (!satisfies_restriction(x, cap)) continue;
    ++m.accepted;
    if (rescale_X(x, R, n, t) <= u) ++hits;
  }
  if (m.accepted) {
    m.p = double(hits) / m.accepted;
    m.se = std::sqrt(std::max(m.p * (1 - m.p), 1.0 / m.accepted) / m.accepted);
  }
  return m;
}

// ---------------------------------------------------------------- commands

json cmd_sample(const json& cfg) {
  const int n = need<int>(cfg, "n");
  if (n < 1) throw ConfigError("n must be >= 1");
  const long replicas = get<long>(cfg, "replicas", 1);
  const auto seed = get<std::uint64_t>(cfg, "seed", 1);
  const double R = cfg.contains("R") && !cfg["R"].is_null() ? cfg["R"].get<double>()
                                                            : std::numeric_limits<double>::infinity();
  const std::string out = get<std::string>(cfg, "out", "");
  const std::string svg = get<std::string>(cfg, "svg", "");
  const long svg_count = get<long>(cfg, "svg_count", 1);
  const auto budget = get<std::uint64_t>(cfg, "budget", 1000000);
  RenderOptions ro;
  ro.rotate45 = !get<bool>(cfg, "debug_axes", false);
  ro.lines = get<bool>(cfg, "lines", true);
  ro.R = R;

  std::ofstream jl;
  if (!out.empty()) {
    jl.open(out);
    if (!jl) throw std::runtime_error("cannot open '" + out + "' for writing");
  }
  json report = {{"command", "sample"}, {"config", cfg}, {"ok", true}};
  long accepted = 0;
  std::uint64_t attempts = 0;
  std::vector<std::string> svgs;
  for (long i = 0; i < replicas; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    Tiling t;
    std::uint64_t att = 1;
    bool ok = true;
    if (std::isfinite(R)) {
      RestrictedSample rs = sample_restricted(n, RestrictionParams{R}, rng, budget);
      att = rs.attempts;
      ok = rs.accepted;
      t = std::move(rs.tiling);
    } else {
      t = sample_uniform(n, rng);
    }
    attempts += att;
    if (!ok) continue;
    ++accepted;
    TopCurveX x = top_curve(t);
    if (jl.is_open())
      jl << json{{"seed", seed}, {"stream", i}, {"n", n}, {"R", std::isfinite(R) ? json(R) : json(nullptr)},
                 {"attempts", att}, {"top_curve", x.x}, {"tiling", tiling_to_json(t)}}
                .dump()
         << '\n';
    if (!svg.empty() && static_cast<long>(svgs.size()) < svg_count) {
      std::string path = svg;
      if (svg_count > 1) {
        const auto dot = path.rfind(".svg");
        path = path.substr(0, dot) + "_" + std::to_string(i) + ".svg";
      }
      write_text(path, render_svg(t, ro));
      svgs.push_back(path);
    }
  }
  if (jl.is_open() && !jl) throw std::runtime_error("write failed for '" + out + "'");
  report["records"] = accepted;
  report["attempts"] = attempts;
  report["svg"] = svgs;
  if (!out.empty()) report["out"] = out;
  if (accepted < replicas) {
    report["ok"] = false;
    report["note"] = "restricted sampler budget exhausted for some replicas";
  }
  return report;
}

json cmd_dist(const json& cfg) {
  const int n = need<int>(cfg, "n");
  const std::string mode = get<std::string>(cfg, "mode", "joint_cdf");
  json report = {{"command", "dist"}, {"config", cfg}, {"ok", true}};
  auto finite_json = [](const FiniteDet& d, const std::string& route) {
    return json{{"value", d.value},        {"raw", d.raw},   {"stability_delta", d.stability_delta},
                {"size", d.size},          {"clamped", d.clamped}, {"route", route}};
  };
  std::function<json(const json&)> eval;
  std::string scan_key;
  if (mode == "joint_cdf" || mode == "path_integral") {
    eval = [&, n](const json& c) {
      auto times = need<std::vector<int>>(c, "times");
      auto levels = need<std::vector<long>>(c, "levels");
      if (times.size() != levels.size() || times.empty()) throw ConfigError("times and levels must match");
      if (mode == "joint_cdf") return finite_json(joint_cdf_Y(n, times, levels), "fredholm");
      auto p = joint_cdf_Y_pathintegral(n, times, levels);
      json j = finite_json(p.det, "path-integral");
      j["path_weight_discrepancy"] = p.path_weight_discrepancy;
      return j;
    };
  } else if (mode == "stay_below") {
    eval = [&, n](const json& c) {
      BarrierSpec g = barrier_from_json(need<json>(c, "g"));
      return finite_json(stay_below_prob_finite(n, g, need<double>(c, "L"), need<double>(c, "M")),
                         "hitting-kernel");
    };
  } else if (mode == "restricted") {
    eval = [&, n](const json& c) {
      FiniteTacnode f = finite_tacnode(n, need<double>(c, "R"), get<double>(c, "t", 0.0), need<double>(c, "u"));
      return json{{"value", f.value}, {"joint", f.joint}, {"restriction", f.restriction},
                  {"L", f.L}, {"M", f.M}, {"route", "hitting-kernel ratio"}};
    };
  } else {
    throw ConfigError("unknown dist mode '" + mode + "'");
  }
  try {
    report["result"] = eval(cfg);
    if (cfg.contains("scan")) {
      // {"scan": {"key": "u", "from": -3, "to": 1, "step": 0.5}} or {"key": "levels", "index": 0, ...}
      const json& s = cfg["scan"];
      const std::string key = need<std::string>(s, "key");
      const double a = need<double>(s, "from"), b = need<double>(s, "to"), h = need<double>(s, "step");
      if (!(h > 0) || b < a) throw ConfigError("scan needs from <= to and step > 0");
      std::vector<std::pair<double, double>> rows;
      for (double v = a; v <= b + 1e-9 * h; v += h) {
        json c = cfg;
        if (c.contains(key) && c[key].is_array())
          c[key][get<std::size_t>(s, "index", 0)] = std::lround(v);
        else
          c[key] = v;
        rows.emplace_back(v, eval(c)["value"].get<double>());
      }
      const std::string csv = get<std::string>(cfg, "csv", "");
      if (!csv.empty()) write_text(csv, csv_table(rows));
      report["table"] = rows;
    }
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return report;
}

namespace {

ContinuumOptions continuum_options(const json& cfg) {
  ContinuumOptions o;
  o.engine.dt_max = get<double>(cfg, "dt_max", o.engine.dt_max);
  o.engine.npp = get<int>(cfg, "engine_npp", o.engine.npp);
  o.x_npp = get<int>(cfg, "x_npp", o.x_npp);
  o.x_max = get<double>(cfg, "x_max", o.x_max);
  o.error_estimate = get<bool>(cfg, "error_estimate", true);
  return o;
}

TacnodeOptions tacnode_options(const json& cfg) {
  TacnodeOptions o;
  o.npp = get<int>(cfg, "npp", o.npp);
  o.engine.npp = get<int>(cfg, "engine_npp", o.engine.npp);
  o.engine.dt_max = get<double>(cfg, "dt_max", o.engine.dt_max);
  o.error_estimate = get<bool>(cfg, "error_estimate", true);
  return o;
}

json tacnode_eval(const json& c) {
  const std::string q = need<std::string>(c, "quantity");
  if (q == "gue" || q == "goe") {
    const double s = need<double>(c, "s");
    return fredholm_json(tracy_widom(q == "gue" ? TWKind::GUE : TWKind::GOE, s, get<int>(c, "npp", 12)), {{"s", s}});
  }
  if (q == "flat") {
    const double R = need<double>(c, "R");
    return fredholm_json(flat_cut_closed_form(R, get<double>(c, "alpha", 0.0)), {{"R", R}});
  }
  if (q == "hitting" || q == "cqr") {
    BarrierSpec g = barrier_from_json(need<json>(c, "g"));
    const double L = need<double>(c, "L"), M = need<double>(c, "M");
    ContinuumOptions o = continuum_options(c);
    if (q == "cqr") return fredholm_json(airy2_below_g_cqr(g, L, M, o), {{"L", L}, {"M", M}});
    const double alpha = get<double>(c, "alpha", 0.5 * (L + M));
    return fredholm_json(airy2_below_g_hitting(g, L, M, alpha, o), {{"L", L}, {"M", M}, {"alpha", alpha}});
  }
  if (q == "tacnode_findim") {
    const double R = need<double>(c, "R");
    auto times = need<std::vector<double>>(c, "times");
    auto levels = need<std::vector<double>>(c, "levels");
    return fredholm_json(tacnode_findim(R, times, levels, tacnode_options(c)), {{"R", R}});
  }
  if (q == "tacnode_continuum" || q == "tacnode_ratio") {
    const double R = need<double>(c, "R");
    BarrierSpec g = barrier_from_json(need<json>(c, "g"));
    TacnodeOptions o = tacnode_options(c);
    return fredholm_json(q == "tacnode_ratio" ? tacnode_ratio(R, g, o) : tacnode_continuum(R, g, o), {{"R", R}});
  }
  throw ConfigError("unknown quantity '" + q + "'");
}

}  // namespace

json cmd_tacnode(const json& cfg) {
  json report = {{"command", "tacnode"}, {"config", cfg}, {"ok", true}};
  try {
    report["result"] = tacnode_eval(cfg);
    if (cfg.contains("scan")) {
      const json& s = cfg["scan"];
      const std::string key = need<std::string>(s, "key");
      const double a = need<double>(s, "from"), b = need<double>(s, "to"), h = need<double>(s, "step");
      if (!(h > 0) || b < a) throw ConfigError("scan needs from <= to and step > 0");
      std::vector<std::pair<double, double>> rows;
      for (double v = a; v <= b + 1e-9 * h; v += h) {
        json c = cfg;
        // Dotted keys reach into the barrier, e.g. "g.value".
        const auto dot = key.find('.');
        if (dot == std::string::npos)
          c[key] = v;
        else
          c[key.substr(0, dot)][key.substr(dot + 1)] = v;
        rows.emplace_back(v, tacnode_eval(c)["value"].get<double>());
      }
      const std::string csv = get<std::string>(cfg, "csv", "");
      if (!csv.empty()) write_text(csv, csv_table(rows));
      report["table"] = rows;
    }
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return report;
}

json cmd_convergence(const json& cfg) {
  const auto t0 = Clock::now();
  const auto ns = need<std::vector<int>>(cfg, "ns");
  const double R = need<double>(cfg, "R");
  const double t = get<double>(cfg, "t", 0.0);
  const auto us = need<std::vector<double>>(cfg, "levels");
  const long samples = get<long>(cfg, "samples", 0);
  const auto mc_ns = get<std::vector<int>>(cfg, "mc_ns", {});
  const auto seed = get<std::uint64_t>(cfg, "seed", 1);
  const double budget = get<double>(cfg, "budget_seconds", 1e9);
  const json tol = get<json>(cfg, "tolerances", json::object());
  const double final_gap = get<double>(tol, "final_gap", 0.05);
  const double mc_sigmas = get<double>(tol, "mc_sigmas", 3.0);
  if (ns.empty() || us.empty()) throw ConfigError("ns and levels must be nonempty");

  json report = {{"command", "convergence"}, {"config", cfg}, {"ok", true}, {"partial", false}};
  json arms = json::array();
  bool ok = true;
  for (double u : us) {
    if (u > R) throw ConfigError("levels must satisfy u <= R");
    json block = {{"u", u}};
    BarrierSpec g = BarrierSpec::parabola_with_point(R, u, t, t - 1, t + 1);
    FredholmResult target = tacnode_findim(R, {t}, {u});
    block["target"] = fredholm_json(target, {{"R", R}, {"t", t}, {"u", u}});
    block["target_continuum"] = fredholm_json(tacnode_continuum(R, g), {{"R", R}, {"t", t}, {"u", u}});
    json rows = json::array();
    std::vector<double> gaps;
    for (int n : ns) {
      if (seconds_since(t0) > budget) {
        report["partial"] = true;
        break;
      }
      json row = {{"n", n}};
      try {
        FiniteTacnode f = finite_tacnode(n, R, t, u);
        row["finite"] = {{"value", f.value}, {"joint", f.joint}, {"restriction", f.restriction},
                         {"route", "hitting-kernel ratio"}};
        row["finite_gap"] = std::abs(f.value - target.value);
        gaps.push_back(std::abs(f.value - target.value));
        if (samples > 0 && std::find(mc_ns.begin(), mc_ns.end(), n) != mc_ns.end()) {
          McConditional m = mc_tacnode(n, R, t, u, samples, seed + static_cast<std::uint64_t>(n));
          const double d = std::abs(m.p - f.value);
          const bool pass = d <= mc_sigmas * m.se;
          row["mc"] = {{"p", m.p}, {"se", m.se}, {"accepted", m.accepted}, {"route", "restricted samples"}};
          row["mc_gap_target"] = std::abs(m.p - target.value);
          row["mc_vs_finite"] = {{"discrepancy", d}, {"tolerance", mc_sigmas * m.se}, {"pass", pass}};
          ok = ok && pass;
        }
      } catch (const DomainError& e) {
        row["error"] = e.what();
        ok = false;
      }
      row["seconds"] = seconds_since(t0);
      rows.push_back(row);
    }
    bool mono = true;
    for (std::size_t i = 1; i < gaps.size(); ++i) mono = mono && gaps[i] <= gaps[i - 1];
    const bool fin = !gaps.empty() && gaps.back() < final_gap;
    block["rows"] = rows;
    block["trend"] = {{"monotone", mono}, {"final_gap", gaps.empty() ? json(nullptr) : json(gaps.back())},
                      {"final_gap_tolerance", final_gap}, {"pass", mono && fin}};
    ok = ok && mono && fin;
    arms.push_back(block);
  }
  report["levels"] = arms;
  report["ok"] = ok && !report["partial"].get<bool>();
  report["seconds"] = seconds_since(t0);
  return report;
}

json cmd_render(const json& cfg) {
  const std::string in = need<std::string>(cfg, "input");
  const std::string out = need<std::string>(cfg, "out");
  const long index = get<long>(cfg, "index", 0);
  std::ifstream f(in);
  if (!f) throw ConfigError("cannot open '" + in + "'");
  std::string line;
  json rec;
  long i = 0;
  if (in.size() > 6 && in.substr(in.size() - 6) == ".jsonl") {
    while (std::getline(f, line))
      if (!line.empty() && i++ == index) {
        rec = json::parse(line);
        break;
      }
    if (rec.is_null()) throw ConfigError("record " + std::to_string(index) + " not found in '" + in + "'");
  } else {
    rec = json::parse(read_text(in));
  }
  Tiling t = tiling_from_json(rec.contains("tiling") ? rec["tiling"] : rec);
  RenderOptions ro;
  ro.rotate45 = !get<bool>(cfg, "debug_axes", false);
  ro.lines = get<bool>(cfg, "lines", true);
  if (cfg.contains("R") && !cfg["R"].is_null())
    ro.R = cfg["R"].get<double>();
  else if (rec.contains("R") && !rec["R"].is_null())
    ro.R = rec["R"].get<double>();
  write_text(out, render_svg(t, ro));
  return {{"command", "render"}, {"config", cfg}, {"ok", true}, {"out", out}, {"dominoes", t.dominoes.size()}};
}

// ---------------------------------------------------------------- selftest

namespace {

struct Check {
  std::string name;
  double tol;
  std::function<double()> run;  // returns the measured deviation
};

std::vector<Check> selftest_suite(bool quick) {
  std::vector<Check> s;
  const int nmax = quick ? 3 : 4;
  s.push_back({"lattice.tiling_counts", 0, [nmax] {
                 double worst = 0;
                 for (int n = 1; n <= nmax; ++n)
                   worst = std::max(worst, std::abs(double(enumerate_tilings(n).size()) - std::ldexp(1.0, n * (n + 1) / 2)));
                 return worst;
               }});
  s.push_back({"lattice.event_dictionary", 0, [] {
                 double bad = 0;
                 for (int n = 1; n <= 3; ++n)
                   for (const auto& t : enumerate_tilings(n)) {
                     TopCurveX x = top_curve(t);
                     TopCurveY y = x_to_y(x, n);
                     if (!y_step_law_ok(y) || !north_polar_region_ok(t, x)) ++bad;
                     for (int tt = -n; tt <= n; ++tt)
                       for (int v = -2 * n; v <= 2 * n; ++v) {
                         const int sidx = tt + v + n;
                         if (sidx < 0 || sidx > 2 * n) continue;
                         if ((x.at(tt) <= v) != (y.at(sidx) <= v)) ++bad;
                       }
                   }
                 return bad;
               }});
  s.push_back({"sampler.exact_cover", 0, [quick] {
                 double bad = 0;
                 for (int i = 0; i < (quick ? 5 : 20); ++i) {
                   RngStream r(99, i);
                   if (!validate_tiling(sample_uniform(12, r)).ok) ++bad;
                 }
                 return bad;
               }});
  s.push_back({"sampler.chi_square_n2", 0, [quick] {
                 auto all = enumerate_tilings(2);
                 std::map<std::string, int> idx;
                 for (std::size_t i = 0; i < all.size(); ++i) idx[tiling_key(all[i])] = static_cast<int>(i);
                 const long N = quick ? 4000 : 20000;
                 std::vector<long> cnt(all.size(), 0);
                 for (long i = 0; i < N; ++i) {
                   RngStream r(5, i);
                   ++cnt[idx.at(tiling_key(sample_uniform(2, r)))];
                 }
                 const double e = double(N) / all.size();
                 double chi = 0;
                 for (long c : cnt) chi += (c - e) * (c - e) / e;
                 boost::math::chi_squared dist(double(all.size() - 1));
                 const double p = boost::math::cdf(boost::math::complement(dist, chi));
                 return p > 1e-3 ? 0.0 : 1.0;
               }});
  s.push_back({"walk.transition_identity", 1e-12, [] {
                 double w = 0;
                 for (long d = -40; d <= 40; ++d) w = std::max(w, transition_identity_residual(0, d));
                 return w;
               }});
  s.push_back({"walk.moments", 1e-10, [] {
                 return std::max(std::abs(StepLaw::mean()), std::abs(StepLaw::variance() - kSqrt2));
               }});
  s.push_back({"walk.rate_legendre", 1e-8, [] {
                 double w = std::abs(rate_I(0));
                 for (int i = 1; i <= 9; ++i) w = std::max(w, std::abs(rate_I(i / 10.0) - rate_I_legendre(i / 10.0)));
                 return w;
               }});
  s.push_back({"finite.shift_identity", 1e-10, [] {
                 double w = 0;
                 for (int n = 1; n <= 8; ++n) {
                   ShiftResidual r = shift_identity_residual(n);
                   w = std::max({w, r.q_side, r.p_side});
                 }
                 return w;
               }});
  s.push_back({"finite.enumeration", 1e-10, [] {
                 double w = 0;
                 for (int n = 2; n <= 3; ++n) {
                   auto all = enumerate_tilings(n);
                   for (int l = 1; l <= n - 1; ++l)
                     for (long v = -1; v <= n; ++v) {
                       long c = 0;
                       for (const auto& t : all) c += x_to_y(top_curve(t), n).at(2 * l) <= v;
                       w = std::max(w, std::abs(joint_cdf_Y(n, {2 * l}, {v}).value - double(c) / all.size()));
                     }
                 }
                 return w;
               }});
  s.push_back({"finite.formula_triangle", 1e-8, [] {
                 double w = 0;
                 for (long a = 0; a <= 2; ++a)
                   for (long b = 0; b <= 2; ++b) {
                     const double j = joint_cdf_Y(3, {2, 4}, {a, b}).value;
                     w = std::max(w, std::abs(j - joint_cdf_Y_pathintegral(3, {2, 4}, {a, b}).det.value));
                     w = std::max(w, std::abs(j - stay_below_caps(3, 1, {a, b}).value));
                   }
                 return w;
               }});
  s.push_back({"continuum.airy_zero", 1e-14, [] {
                 return std::abs(airy_ai(0) - 1 / (std::pow(3.0, 2.0 / 3) * std::tgamma(2.0 / 3)));
               }});
  s.push_back({"continuum.point_barrier_gue", 1e-6, [quick] {
                 double w = 0;
                 for (double a : quick ? std::vector<double>{0.0} : std::vector<double>{-2.0, 0.0, 2.0})
                   w = std::max(w, std::abs(airy2_below_g_hitting(BarrierSpec::point(0, a), -1, 1, 0).value -
                                            tracy_widom(TWKind::GUE, a).value));
                 return w;
               }});
  s.push_back({"continuum.flat_cut_goe", 1e-6, [] {
                 double w = 0;
                 for (double R : {-1.0, 0.0, 1.0})
                   w = std::max(w, std::abs(flat_cut_closed_form(R).value -
                                            tracy_widom(TWKind::GOE, std::pow(2.0, 2.0 / 3) * R).value));
                 return w;
               }});
  s.push_back({"continuum.heat_identity", 1e-8, [] {
                 double w = 0;
                 for (double s0 : {-1.0, 0.0})
                   for (double t1 : {0.5, 1.0})
                     for (double x : {-1.0, 0.0, 1.0})
                       for (double y : {-0.5, 0.5}) w = std::max(w, heat_identity_residual(s0, t1, x, y));
                 return w;
               }});
  s.push_back({"continuum.reflection", 1e-10, [] {
                 double w = 0;
                 const BarrierSpec g = BarrierSpec::parabola(0.4, -2, 2);
                 for (double x : {-1.0, 0.0, 0.3})
                   for (double y : {-2.0, -0.5, 0.2})
                     w = std::max(w, std::abs(barrier_transition(g, -1, 1, x, y, 1e-12) - reflection_T(2, x, y, 0.4)));
                 return w;
               }});
  s.push_back({"tacnode.compatibility", 1e-6, [] {
                 CompatibilityResidual r = compatibility_residual(1, -0.3, 0.4, {0, 0.5, 2}, {-0.1, -1, -3});
                 return std::max(r.phi_side, r.psi_side);
               }});
  s.push_back({"tacnode.findim_vs_continuum", 1e-3, [] {
                 TacnodeOptions o;
                 o.error_estimate = false;
                 return std::abs(tacnode_findim(1, {0}, {0}, o).value -
                                 tacnode_continuum(1, BarrierSpec::parabola_with_point(1, 0, 0, -0.5, 0.5), o).value);
               }});
  if (!quick) {
    s.push_back({"tacnode.ratio_identity", 1e-3, [] {
                   TacnodeOptions o;
                   o.error_estimate = false;
                   return std::abs(tacnode_findim(1, {0}, {0}, o).value -
                                   tacnode_ratio(1, BarrierSpec::parabola_with_point(1, 0, 0, -0.5, 0.5), o).value);
                 }});
    s.push_back({"continuum.cqr_vs_hitting_flat", 1e-4, [] {
                   const BarrierSpec g = BarrierSpec::parabola(0, -1, 1);
                   return std::abs(airy2_below_g_cqr(g, -1, 1).value - airy2_below_g_hitting(g, -1, 1, 0).value);
                 }});
    s.push_back({"continuum.hitting_conservation", 1e-6, [] {
                   double w = 0;
                   for (const BarrierSpec& g : {BarrierSpec::parabola(0.5, -1, 1),
                                                BarrierSpec::step_down(0.5, 0.5, 0, -1, 1)})
                     w = std::max(w, std::abs(hitting_density(-0.5, -1, g, 1).total() - 1));
                   return w;
                 }});
  }
  return s;
}

}  // namespace

json cmd_selftest(const json& cfg) {
  const auto t0 = Clock::now();
  const bool quick = get<bool>(cfg, "quick", false);
  const json tol = get<json>(cfg, "tolerances", json::object());
  if (cfg.contains("corrupt_q")) {
    const json& c = cfg["corrupt_q"];
    krawtchouk_mutable(need<int>(c, "n")).corrupt_q(need<int>(c, "s"), need<long>(c, "y"), get<double>(c, "delta", 1e-6));
  }
  json checks = json::array();
  bool ok = true;
  for (const Check& c : selftest_suite(quick)) {
    const auto t1 = Clock::now();
    const double limit = get<double>(tol, c.name.c_str(), c.tol);
    json row = {{"name", c.name}, {"tolerance", limit}};
    try {
      const double v = c.run();
      const bool pass = std::isfinite(v) && v <= limit;
      row["deviation"] = v;
      row["pass"] = pass;
      ok = ok && pass;
    } catch (const std::exception& e) {
      row["error"] = e.what();
      row["pass"] = false;
      ok = false;
    }
    row["seconds"] = seconds_since(t1);
    checks.push_back(row);
  }
  return {{"command", "selftest"}, {"config", cfg}, {"ok", ok}, {"checks", checks}, {"seconds", seconds_since(t0)}};
}

}  // namespace aztec
