#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>

#include "commands.hpp"
#include "config.hpp"
#include "rlab/error.hpp"
#include "rlab/metric_spec.hpp"

namespace rlab::cli {

namespace {

void add_common(CLI::App* sub, RunConfig& c, bool needs_metric) {
  auto* m = sub->add_option("--metric", c.metric_spec, "Metric specification: " + std::string(kMetricSpecGrammar));
  if (needs_metric) m->required();
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv", "pretty"}));
  sub->add_option("--out", c.out, "Write the report to this file instead of stdout");
  sub->add_option("--seed", c.seed, "Random seed (recorded in the report)");
  sub->add_flag("--timing", c.timing, "Include wall-clock times in the report");
  sub->add_option("--tol", c.tol, "Tolerance for the command's residual check")->check(CLI::PositiveNumber);
}

void add_point(CLI::App* sub, RunConfig& c) {
  sub->add_option("--point", c.point, "Chart point, comma separated")->delimiter(',');
}

void add_grid(CLI::App* sub, RunConfig& c) {
  sub->add_option("--center", c.center, "Grid center, comma separated (default: chart center)")->delimiter(',');
  sub->add_option("--half-width", c.half_width, "Grid half-width per axis")->check(CLI::NonNegativeNumber);
  sub->add_option("--points-per-axis", c.points_per_axis, "Grid points per axis")->check(CLI::PositiveNumber);
}

std::string render_report(const CommandResult& r, const std::string& format) {
  const OutputFormat f = parse_output_format(format);
  if (f == OutputFormat::Csv) {
    if (const Json* rows = r.report.find("rows"); rows && rows->is_array()) return render_csv(*rows);
  }
  return render(r.report, f);
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Curvature laboratory for coordinate-chart metrics in dimension up to 4", "riemann-lab"};
  app.require_subcommand(1);
  app.footer("Config files: --config FILE with 'key = value' lines using the flag names; flags win.\n"
             "Exit codes: 0 success, 1 user error, 2 numerical check failed, 3 internal error.");
  app.add_option("--config", "Read 'key = value' lines (flag names without dashes)");

  auto* curvature = app.add_subcommand("curvature", "Full curvature report at a point");
  add_common(curvature, c, true);
  add_point(curvature, c);

  auto* pf = app.add_subcommand("pf", "Pfaffian by the norm identity and in an orthonormal frame");
  add_common(pf, c, true);
  add_point(pf, c);

  auto* gbc = app.add_subcommand("gbc", "Euler characteristic by quadrature of the Pfaffian");
  add_common(gbc, c, true);
  gbc->add_option("--nodes", c.nodes, "Midpoint nodes per axis")->check(CLI::Range(4, 1 << 16));
  gbc->add_flag("--richardson", c.richardson, "Extrapolate over halved grids");

  auto* frame = app.add_subcommand("frame", "Curvature-minimizing orthonormal frame");
  add_common(frame, c, true);
  add_point(frame, c);

  auto* classify = app.add_subcommand("classify", "Ricci classification at a point or on a grid");
  add_common(classify, c, true);
  add_point(classify, c);
  add_grid(classify, c);
  classify->add_option("--eps-deg", c.eps_deg, "Eigenvalue threshold for degeneracy")->check(CLI::PositiveNumber);
  classify->add_option("--eps-gap", c.eps_gap, "Minimal spectral gap")->check(CLI::PositiveNumber);

  auto* variation = app.add_subcommand("variation", "Analytic vs finite-difference first variation of curvature");
  add_common(variation, c, false);
  variation->add_option("--cases", c.cases, "Number of random cases")->check(CLI::PositiveNumber);
  variation->add_option("--step", c.h, "Finite-difference step")->check(CLI::PositiveNumber);

  auto* factcheck = app.add_subcommand("factcheck", "Randomized determinant-derivative property run");
  add_common(factcheck, c, false);
  factcheck->add_option("--draws", c.draws, "Number of random draws")->check(CLI::PositiveNumber);

  auto* foliate = app.add_subcommand("foliate", "Eigenfield, shape operator, leaf and divergence checks on a grid");
  add_common(foliate, c, true);
  add_grid(foliate, c);
  foliate->add_option("--step", c.h, "Finite-difference step")->check(CLI::PositiveNumber);
  foliate->add_flag("--no-richardson", c.no_richardson, "Plain central differences");

  auto* selftest = app.add_subcommand("selftest", "Run the full acceptance suite");
  add_common(selftest, c, false);

  try {
    std::vector<std::string> args = merge_config(raw_args, {"richardson", "timing", "no-richardson"});
    std::reverse(args.begin(), args.end());
    app.parse(args);
    for (CLI::App* sub : app.get_subcommands()) c.command = sub->get_name();

    const CommandResult result = run_command(c, err);
    const std::string text = render_report(result, c.format);
    if (c.out.empty()) {
      out << text;
      out.flush();
    } else {
      std::ofstream file(c.out, std::ios::binary);
      if (!file) throw InvalidArgument("cannot write '" + c.out + "'");
      file << text;
      if (!file) throw InvalidArgument("failed writing '" + c.out + "'");
    }
    if (!result.checks_passed) {
      err << "riemann-lab: numerical check failed\n";
      return kCheckFailed;
    }
    return kOk;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "riemann-lab: " << e.what() << '\n';
    return kUserError;
  } catch (const PreconditionError& e) {
    err << "riemann-lab: " << e.what() << '\n';
    return kCheckFailed;
  } catch (const ConvergenceError& e) {
    err << "riemann-lab: " << e.what() << '\n';
    return kCheckFailed;
  } catch (const InvalidArgument& e) {
    err << "riemann-lab: " << e.what() << '\n';
    return kUserError;
  } catch (const MetricError& e) {
    err << "riemann-lab: " << e.what() << '\n';
    return kUserError;
  } catch (const DomainError& e) {
    err << "riemann-lab: " << e.what() << '\n';
    return kUserError;
  } catch (const std::exception& e) {
    err << "riemann-lab: internal error: " << e.what() << '\n';
    return kInternalError;
  }
}

}  // namespace rlab::cli
