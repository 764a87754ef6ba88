#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "gqw/harness.hpp"

namespace {

constexpr int kExitFail = 1;
constexpr int kExitLoad = 2;

const std::string kDefaultSystem = std::string(GQW_SYSTEMS_DIR) + "/appendix_a.spec";

struct CommonOptions {
  std::string system = kDefaultSystem;
  gqw::SpecOverrides overrides;
  bool no_validate = false;
};

void add_system_options(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--system", o.system, "system spec file")->check(CLI::ExistingFile);
  cmd->add_option("--samples", o.overrides.samples, "sample points per equality check")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", o.overrides.epsilon, "equality tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.overrides.seed, "sampling seed");
  cmd->add_option("--hbar", o.overrides.hbar, "value bound to hbar")->check(CLI::PositiveNumber);
  cmd->add_flag("--no-validate", o.no_validate, "skip the d(beta) = omega check at load");
}

void print(const gqw::Report& r, const std::string& format, bool timing) {
  if (format == "json")
    std::cout << gqw::to_json(r, timing).dump(2) << '\n';
  else
    std::cout << gqw::to_text(r, timing);
}

int poisson_command(const gqw::System& sys, const std::string& fs, const std::string& gs, const std::string& format) {
  gqw::Expr f = sys.chart().parse(fs);
  gqw::Expr g = sys.chart().parse(gs);
  gqw::Expr fg = gqw::poisson(f, g, sys.symplectic);
  gqw::EqualityResult routes = gqw::check_poisson_routes(f, g, sys.symplectic);
  if (format == "json") {
    nlohmann::ordered_json j;
    j["f"] = gqw::to_string(f);
    j["g"] = gqw::to_string(g);
    j["bracket"] = gqw::to_string(fg);
    j["xi_f"] = gqw::to_string(gqw::hamiltonian_vf(f, sys.symplectic));
    j["routes_agree"] = routes.equal;
    j["routes_residual"] = routes.residual;
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "{f,g} = " << gqw::to_string(fg) << '\n'
              << "xi_f  = " << gqw::to_string(gqw::hamiltonian_vf(f, sys.symplectic)) << '\n'
              << "routes " << (routes.equal ? "agree" : "DISAGREE") << " (residual " << routes.residual << ")\n";
  }
  return routes.equal ? 0 : kExitFail;
}

int demo_command(const gqw::System& sys, const std::string& which, const std::string& angle_text, bool timing) {
  gqw::Expr angle = gqw::parse_expr(angle_text, std::vector<std::string>{});
  if (which == "a2") (void)gqw::require_rotation_angle(angle);
  gqw::Report all = gqw::counterexample_suite(sys, angle);
  gqw::Report r{"counterexamples/" + which};
  for (const auto& c : all.checks)
    if (c.id.starts_with(which + ".")) r.checks.push_back(c);
  if (which == "a1") {
    std::cout << "K(m, [h, exp(2 pi i t)]) = (m, [h mu(2t), exp(2 pi i t)]), mu the lift of R(4 pi s).\n"
                 "K preserves gamma, yet Sigma o K varies along a fiber: no frame map K' fits.\n\n";
  } else {
    std::cout << "K(m, a) = (T m, a), T the rotation by " << angle_text << ".\n"
                 "T^* beta = beta, so K preserves gamma, but K moves no frames while T does: K' != K~''.\n\n";
  }
  std::cout << gqw::to_text(r, timing);
  return r.passed() ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gqw: property checks for prequantization and metaplectic-c prequantization"};
  app.require_subcommand(1);

  CommonOptions check_opts;
  std::string suite = "all";
  std::string format = "text";
  bool timing = false;
  auto* check = app.add_subcommand("check", "run a property suite against a system");
  add_system_options(check, check_opts);
  check->add_option("--suite", suite, "suite name")->check(CLI::IsMember(gqw::suite_names()));
  check->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
  check->add_flag("--timing", timing, "include elapsed times (breaks byte-identical output)");

  CommonOptions poisson_opts;
  std::string f_text, g_text, poisson_format = "text";
  auto* poisson = app.add_subcommand("poisson", "Poisson bracket of two expressions");
  add_system_options(poisson, poisson_opts);
  poisson->add_option("-f", f_text, "first expression")->required();
  poisson->add_option("-g", g_text, "second expression")->required();
  poisson->add_option("--format", poisson_format, "text or json")->check(CLI::IsMember({"text", "json"}));

  CommonOptions demo_opts;
  std::string which;
  std::string angle = "pi/2";
  auto* demo = app.add_subcommand("demo", "the two counterexamples on the punctured plane");
  add_system_options(demo, demo_opts);
  demo->add_option("example", which, "a1 or a2")->required()->check(CLI::IsMember({"a1", "a2"}));
  demo->add_option("--angle", angle, "rotation angle for a2 (expression)");

  std::string group_action;
  std::uint64_t group_seed = 42;
  std::string group_format = "text";
  auto* group = app.add_subcommand("group", "Mp^c group checks");
  group->add_option("action", group_action, "selftest")->required()->check(CLI::IsMember({"selftest"}));
  group->add_option("--seed", group_seed, "sampling seed");
  group->add_option("--format", group_format, "text or json")->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitLoad;
  }

  auto load = [](const CommonOptions& o) { return gqw::load_system(o.system, o.overrides, !o.no_validate); };

  try {
    if (*check) {
      gqw::System sys = load(check_opts);
      gqw::Report r = gqw::run_suite(sys, suite);
      print(r, format, timing);
      return r.passed() ? 0 : kExitFail;
    }
    if (*poisson) return poisson_command(load(poisson_opts), f_text, g_text, poisson_format);
    if (*demo) return demo_command(load(demo_opts), which, angle, false);
    if (*group) {
      gqw::Report r = gqw::group_suite(group_seed);
      print(r, group_format, false);
      return r.passed() ? 0 : kExitFail;
    }
  } catch (const gqw::Error& e) {
    std::cerr << "gqw: " << e.what() << '\n';
    return kExitLoad;
  }
  return 0;
}
