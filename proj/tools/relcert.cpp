// relcert: run scenarios, verify stored certificates, print optimum curves and
// export LPs. Exit codes: 0 completed (whatever the verdict), 1 other
// execution error, 2 configuration or input error, 3 resource cap, 4 internal
// invariant breach.

#include <iostream>

#include <CLI11.hpp>

#include "relcert/relcert.hpp"

using namespace relcert;

namespace {

int guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const ResourceLimit& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 3;
  } catch (const InvariantError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  } catch (const FormatError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const SyntaxError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const SpecError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-window certificates of relative property A and relative amenability"};
  app.require_subcommand(1);

  std::string config;
  auto* run = app.add_subcommand("run", "Run a scenario and write its report and artifacts");
  run->add_option("config", config, "Scenario TOML file")->required();

  std::string cert_path, space_path, eps, convention;
  std::optional<std::size_t> R, S, window;
  auto* ver = app.add_subcommand("verify", "Verify a certificate file against a coset-space file");
  ver->add_option("certificate", cert_path)->required();
  ver->add_option("space", space_path)->required();
  ver->add_option("--R", R, "Pairs at distance 1..R are compared");
  ver->add_option("--eps", eps, "Variation bound, e.g. 3/5 or 0.6");
  ver->add_option("--S", S, "Support radius bound");
  ver->add_option("--window", window, "x ranges over ball(window)");
  ver->add_option("--convention", convention, "reiter-centered or identity-centered");

  auto* curve = app.add_subcommand("curve", "Print the optimum curve of a scenario as CSV");
  curve->add_option("config", config)->required();

  std::string lp_out;
  auto* lp = app.add_subcommand("export-lp", "Print the LP of a scenario in CPLEX LP format");
  lp->add_option("config", config)->required();
  lp->add_option("-o,--output", lp_out, "Write to a file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*run)
    return guarded([&] {
      auto report = run_scenario(load_scenario(config));
      std::cout << dump(report.to_json());
    });

  if (*ver)
    return guarded([&] {
      auto cs = coset_space_from_text(read_file(space_path));
      auto file = certificate_from_text(read_file(cert_path), cs.group());
      if (!file.params && (!R || eps.empty() || !S || !window))
        throw FormatError("certificate has no params; pass --R, --eps, --S and --window");
      auto p = file.params.value_or(CertParams{});
      if (R) p.R = *R;
      if (!eps.empty()) p.epsilon = parse_rational(eps);
      if (S) p.S = *S;
      if (window) p.window = *window;
      p.validate();
      std::optional<Convention> conv;
      if (!convention.empty()) conv = parse_convention(convention);
      std::cout << dump(to_json(verify(file.certificate, cs, p, conv), cs.group()));
    });

  if (*curve) return guarded([&] { std::cout << scenario_curve(load_scenario(config)).csv(); });

  return guarded([&] {
    auto text = scenario_lp(load_scenario(config));
    if (lp_out.empty())
      std::cout << text;
    else
      write_file(lp_out, text);
  });
}
