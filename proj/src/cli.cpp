#include "fkrank/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "fkrank/harness.hpp"
#include "fkrank/random.hpp"

namespace fkrank {

namespace {

using io::json;

/// Rounds every number in j to 15 significant digits.
void round_numbers(json& j)
{
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::isfinite(v))
      j = std::stod(io::format_number(v));
  } else if (j.is_structured()) {
    for (auto& e : j)
      round_numbers(e);
  }
}

void emit(std::ostream& out, json j)
{
  round_numbers(j);
  out << j.dump(2) << '\n';
}

json spectrum_json(const std::vector<Complex>& zs)
{
  json a = json::array();
  for (const Complex z : zs)
    a.push_back(io::to_json_complex(z));
  return a;
}

json verdict_json(const char* check, const Verdict& v)
{
  json j = {{"check", check},
            {"pass", v.pass},
            {"detail", v.detail},
            {"probe_seed", v.seed},
            {"probes_checked", v.probes_checked},
            {"worst", v.worst}};
  j["witness"] = v.witness ? io::to_json(*v.witness) : json(nullptr);
  if (v.witness_pair)
    j["witness_pair"] = io::to_json(*v.witness_pair);
  return j;
}

Complex parse_complex(const std::string& s)
{
  double re = 0.0, im = 0.0;
  char tail = 0;
  if (std::sscanf(s.c_str(), "%lf,%lf%c", &re, &im, &tail) != 2)
    throw UsageError("expected a complex number as re,im: " + s);
  return {re, im};
}

JordanKind parse_jordan(const std::string& s)
{
  if (s == "identity")
    return JordanKind::identity;
  if (s == "transpose")
    return JordanKind::transpose;
  throw UsageError("jordan must be identity or transpose");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Fuglede-Kadison determinants, Brown measures and rank-metric isometries on M_n"};
  app.require_subcommand(1);

  std::string in1, in2, mode = "rank", check, family, config_path, output, center = "0,0", jordan = "identity";
  double tol = -1.0, half_width = -1.0, cond = 1e2, eps = 1e-2;
  bool grid = false, conjugated = false, unital = false, inject = false;
  Index cells = 64, n = 4, k = -1, probes = 64, trials = -1;
  std::uint64_t seed = 0;
  std::vector<Index> n_values;

  auto* det = app.add_subcommand("det", "normalized Fuglede-Kadison determinant |det x|^(1/n)");
  det->add_option("matrix", in1, "matrix JSON")->required();
  det->add_option("--tol", tol, "relative rank tolerance");

  auto* brown = app.add_subcommand("brown", "Brown measure (atoms, or grid mass with --grid)");
  brown->add_option("matrix", in1, "matrix JSON")->required();
  brown->add_flag("--grid", grid, "Laplacian of log det on a grid, as CSV");
  brown->add_option("--cells", cells, "grid cells per side");
  brown->add_option("--half-width", half_width, "grid half width (default: spectral radius + 1)");
  brown->add_option("--center", center, "grid center re,im");
  brown->add_option("--output", output, "write to file instead of stdout");

  auto* hsproj = app.add_subcommand("hsproj", "Haagerup-Schultz projection for a region");
  hsproj->add_option("matrix", in1, "matrix JSON")->required();
  hsproj->add_option("region", in2, "region JSON")->required();

  auto* rank = app.add_subcommand("rank", "ranks, rank norms and rank distance");
  rank->add_option("a", in1, "matrix JSON")->required();
  rank->add_option("b", in2, "matrix JSON")->required();
  rank->add_option("--tol", tol, "relative rank tolerance");

  auto* decomp = app.add_subcommand("decompose", "canonical form x -> a J(x) b");
  decomp->add_option("map", in1, "map JSON")->required();
  decomp->add_option("--mode", mode, "det or rank")->check(CLI::IsMember({"det", "rank"}));
  decomp->add_option("--probes", probes, "random probes");
  decomp->add_option("--seed", seed, "probe seed");

  auto* verify = app.add_subcommand("verify", "check a map property");
  verify->add_option("map", in1, "map JSON")->required();
  verify->add_option("--check", check, "rank, det, mult or brown")
      ->required()
      ->check(CLI::IsMember({"rank", "det", "mult", "brown"}));
  verify->add_option("--probes", probes, "random probes");
  verify->add_option("--seed", seed, "probe seed");

  auto* gen = app.add_subcommand("gen", "deterministic instance generator");
  gen->add_option("family", family, "family name")->required();
  gen->add_option("--n", n, "order")->required();
  gen->add_option("--seed", seed, "seed")->required();
  gen->add_option("--k", k, "rank for random_projection and random_idempotent");
  gen->add_option("--cond", cond, "condition bound");
  gen->add_option("--eps", eps, "perturbation size for perturbed_form");
  gen->add_option("--jordan", jordan, "identity or transpose");
  gen->add_flag("--conjugated", conjugated, "conjugate-linear form");
  gen->add_flag("--unital", unital, "b = a^-1");

  auto* suite = app.add_subcommand("suite", "run a property suite");
  suite->add_option("name", family, "suite name")->required();
  suite->add_option("--config", config_path, "SuiteConfig JSON");
  suite->add_option("--trials", trials, "trials per property and n");
  suite->add_option("--seed", seed, "master seed");
  suite->add_option("--n", n_values, "n values");
  suite->add_option("--output", output, "JSON report path");
  suite->add_flag("--inject-mutant", inject, "replace the det-preserving control map with x -> 2 f(x)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*det) {
      const CMatrix x = io::matrix_from_json(io::read_json_file(in1));
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.15f", tol > 0.0 ? fk_det(x, tol) : fk_det(x));
      out << buf << '\n';
      return 0;
    }
    if (*brown) {
      const CMatrix x = io::matrix_from_json(io::read_json_file(in1));
      std::ofstream file;
      if (!output.empty()) {
        file.open(output);
        if (!file)
          throw IoError("cannot write " + output);
      }
      std::ostream& sink = output.empty() ? out : file;
      if (grid) {
        GridSpec spec;
        spec.center = parse_complex(center);
        spec.cells = cells;
        spec.half_width = half_width > 0.0 ? half_width : spectral_radius(x) + 1.0;
        const GridMeasure g = brown_from_grid(x, spec);
        io::write_grid_csv(sink, g);
        err << "total mass " << io::format_number(g.total) << ", clipped " << io::format_number(g.clipped) << '\n';
      } else {
        emit(sink, io::to_json(brown_measure(x)));
      }
      return 0;
    }
    if (*hsproj) {
      const CMatrix x = io::matrix_from_json(io::read_json_file(in1));
      const RegionPredicate region = io::region_from_json(io::read_json_file(in2));
      const HSProjectionResult r = hs_projection(x, region);
      emit(out, {{"p", io::to_json(r.p.matrix())},
                 {"selected", r.selected},
                 {"order", r.order},
                 {"trace_p", r.trace_p},
                 {"mu_b", r.mu_b},
                 {"invariance_residual", r.invariance_residual},
                 {"inside_spectrum", spectrum_json(r.inside_spectrum)},
                 {"outside_spectrum", spectrum_json(r.outside_spectrum)},
                 {"inside_ok", r.inside_ok},
                 {"outside_ok", r.outside_ok}});
      return r.inside_ok && r.outside_ok ? 0 : 1;
    }
    if (*rank) {
      const CMatrix a = io::matrix_from_json(io::read_json_file(in1));
      const CMatrix b = io::matrix_from_json(io::read_json_file(in2));
      require_same_order(a, b, "rank");
      const double t = tol > 0.0 ? tol : default_rank_tol<double>(a.rows());
      emit(out, {{"rank_a", numerical_rank(a, t)},
                 {"rank_b", numerical_rank(b, t)},
                 {"rank_norm_a", rank_norm(a, t)},
                 {"rank_norm_b", rank_norm(b, t)},
                 {"rank_distance", rank_metric(a, b, t)}});
      return 0;
    }
    ProbeSet probe_set;
    probe_set.random_count = probes;
    probe_set.seed = seed;
    if (*decomp) {
      const MatrixMap f = io::map_from_json(io::read_json_file(in1));
      const DecompositionResult r =
          decompose(f, mode == "det" ? DecomposeMode::det_preserving : DecomposeMode::rank_isometry, probe_set);
      emit(out, io::to_json(r));
      return r.classification == Classification::isomorphism ||
                     r.classification == Classification::anti_isomorphism
                 ? 0
                 : 1;
    }
    if (*verify) {
      const MatrixMap f = io::map_from_json(io::read_json_file(in1));
      if (check == "rank") {
        if (!f.is_bijective()) {
          emit(out, {{"check", "rank"}, {"pass", false}, {"detail", "map is not bijective"}});
          return 1;
        }
        const Verdict v = is_rank_isometry(f, probe_set);
        emit(out, verdict_json("rank", v));
        return v.pass ? 0 : 1;
      }
      if (check == "det") {
        const Verdict v = is_det_preserving(f, probe_set, true);
        emit(out, verdict_json("det", v));
        return v.pass ? 0 : 1;
      }
      if (check == "mult") {
        const MultiplicativityReport m = is_multiplicative(f, probe_set);
        json j = {{"check", "mult"},
                  {"classification", to_string(m.classification)},
                  {"pass", m.classification != Multiplicativity::neither},
                  {"iso_residual", m.iso_residual},
                  {"anti_residual", m.anti_residual},
                  {"probe_seed", m.seed}};
        if (m.classification == Multiplicativity::neither && m.witness_x) {
          j["witness"] = io::to_json(*m.witness_x);
          j["witness_pair"] = io::to_json(*m.witness_y);
        }
        emit(out, j);
        return m.classification == Multiplicativity::neither ? 1 : 0;
      }
      // brown: atom matching on Ginibre probes
      Verdict v;
      v.seed = seed;
      const Stream base(seed);
      for (Index r = 0; r < probes && v.pass; ++r) {
        Stream rng = base.child(static_cast<std::uint64_t>(r));
        const CMatrix x = ginibre(f.order(), rng);
        const double d = matching_distance(brown_measure(f.apply(x)), brown_measure(x));
        ++v.probes_checked;
        v.worst = std::max(v.worst, std::isfinite(d) ? d : 1.0);
        if (!(d <= 1e-6)) {
          v.pass = false;
          v.witness = x;
          v.detail = "atom displacement " + io::format_number(d);
        }
      }
      emit(out, verdict_json("brown", v));
      return v.pass ? 0 : 1;
    }
    if (*gen) {
      FamilySpec spec;
      spec.name = family;
      spec.k = k;
      spec.cond_max = cond;
      spec.eps = eps;
      spec.jordan = parse_jordan(jordan);
      spec.conjugated = conjugated;
      spec.unital = unital;
      emit(out, to_json(generate(spec, n, seed)));
      return 0;
    }
    if (*suite) {
      SuiteConfig config;
      if (!config_path.empty())
        config = config_from_json(io::read_json_file(config_path));
      if (!config.suite.empty() && config.suite != family)
        throw UsageError("config names suite \"" + config.suite + "\" but \"" + family + "\" was requested");
      config.suite = family;
      if (trials >= 0)
        config.trials = trials;
      if (suite->count("--seed") > 0)
        config.seed = seed;
      if (!n_values.empty())
        config.n_values = n_values;
      if (!output.empty())
        config.output = output;
      config.inject_mutant = config.inject_mutant || inject;
      apply_environment(config);
      const Report report = run_suite(config);
      out << report.to_text();
      if (!config.output.empty())
        io::write_json_file(config.output, report.to_json());
      return report.exit_code();
    }
  } catch (const NonBijective& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace fkrank
