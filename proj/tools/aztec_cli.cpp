#include <CLI11.hpp>
#include <iostream>

#include "aztec/experiments.hpp"

using aztec::json;

namespace {

void emit(const json& report, const std::string& out) {
  const std::string text = report.dump(2);
  if (out.empty()) {
    std::cout << text << '\n';
    return;
  }
  std::ofstream f(out);
  if (!f || !(f << text << '\n')) throw std::runtime_error("cannot write report to '" + out + "'");
  std::cerr << "report written to " << out << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aztec diamond tilings, barrier determinants and the hard-edge tacnode"};
  app.require_subcommand(1);

  std::string config, report_out;
  std::vector<std::string> sets;
  auto common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config, "JSON config file");
    sub->add_option("-s,--set", sets, "override a config field: key=value (value parsed as JSON)");
    sub->add_option("-o,--report", report_out, "write the JSON report here instead of stdout");
  };

  auto* sample = app.add_subcommand("sample", "draw uniform or restricted tilings");
  common(sample);
  auto* dist = app.add_subcommand("dist", "finite-n probabilities of the top curve");
  common(dist);
  auto* tac = app.add_subcommand("tacnode", "continuum Fredholm determinants");
  common(tac);
  auto* conv = app.add_subcommand("convergence", "finite-n and Monte Carlo arms against the tacnode limit");
  common(conv);
  auto* render = app.add_subcommand("render", "SVG of a stored tiling");
  common(render);
  auto* self = app.add_subcommand("selftest", "built-in consistency checks");
  common(self);
  bool quick = false;
  self->add_flag("--quick", quick, "reduced check set");

  CLI11_PARSE(app, argc, argv);

  try {
    json cfg = aztec::load_config(config, sets);
    if (quick) cfg["quick"] = true;
    json report;
    if (*sample) report = aztec::cmd_sample(cfg);
    else if (*dist) report = aztec::cmd_dist(cfg);
    else if (*tac) report = aztec::cmd_tacnode(cfg);
    else if (*conv) report = aztec::cmd_convergence(cfg);
    else if (*render) report = aztec::cmd_render(cfg);
    else report = aztec::cmd_selftest(cfg);
    emit(report, report_out);
    return report.value("ok", false) ? 0 : 1;
  } catch (const aztec::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const aztec::DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const aztec::InvariantError& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
