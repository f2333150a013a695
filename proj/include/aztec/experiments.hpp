#pragma once

#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "aztec/lattice.hpp"
#include "aztec/quadrature.hpp"

namespace aztec {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Barrier from JSON, e.g. {"kind": "parabola", "R": 1, "L": -1, "M": 1}.
// Kinds: none, parabola, point, step_down, v_shape, parabola_with_point, tilted_linear.
BarrierSpec barrier_from_json(const json& j);

// Reads a config file; flags given as "key=value" pairs override top-level fields.
json load_config(const std::string& path, const std::vector<std::string>& overrides = {});

json tiling_to_json(const Tiling& t);
Tiling tiling_from_json(const json& j);

struct RenderOptions {
  bool rotate45 = true;  // false: axis-aligned debug view
  bool lines = true;     // overlay the line ensemble
  bool cut = true;       // draw the cut line y = r when R is finite
  double R = std::numeric_limits<double>::infinity();
  double cell = 8;       // pixels per unit square
};
std::string render_svg(const Tiling& t, const RenderOptions& o = {});

json fredholm_json(const FredholmResult& r, const json& params);

// Each command returns a JSON report. Reports always contain "config" and "ok".
json cmd_sample(const json& cfg);
json cmd_dist(const json& cfg);
json cmd_tacnode(const json& cfg);
json cmd_convergence(const json& cfg);
json cmd_render(const json& cfg);
json cmd_selftest(const json& cfg);

// Finite-n restricted law P(X^{R,resc}(t) <= u | restriction) via determinants on [L, M].
struct FiniteTacnode {
  double joint = 0;        // restriction and point constraint
  double restriction = 0;  // restriction only
  double value = 0;        // joint / restriction
  double L = 0, M = 0;
};
FiniteTacnode finite_tacnode(int n, double R, double t, double u);

// Fraction of uniform samples satisfying the restriction, with its standard error.
struct AcceptanceEstimate {
  long samples = 0, accepted = 0;
  double p = 0, se = 0;
  double seconds = 0;
};
AcceptanceEstimate restricted_acceptance(int n, double R, long samples, std::uint64_t seed);

// MC estimate of P(X^{R,resc}(t) <= u | restriction) from restricted samples.
struct McConditional {
  long accepted = 0;
  double p = 0, se = 0;
};
McConditional mc_tacnode(int n, double R, double t, double u, long samples, std::uint64_t seed);

}  // namespace aztec
