#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fkrank/cli.hpp"
#include "fkrank/harness.hpp"
#include "fkrank/io.hpp"

using namespace fkrank;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir()
  {
    path = std::filesystem::temp_directory_path() /
           ("fkrank-test-" + std::to_string(reinterpret_cast<std::uintptr_t>(this)) + "-" +
            std::to_string(std::rand()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name, const io::json& j) const
  {
    const std::string p = (path / name).string();
    io::write_json_file(p, j);
    return p;
  }
};

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args)
{
  args.insert(args.begin(), "fkrank");
  std::vector<const char*> argv;
  for (const std::string& a : args)
    argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_SUITE("io")
{
  TEST_CASE("matrix and map round trips")
  {
    Stream rng(1);
    const CMatrix x = ginibre(3, rng);
    CHECK((io::matrix_from_json(io::to_json(x)) - x).norm() == 0.0);
    const MatrixMap f = from_form(random_form(2, rng, JordanKind::transpose, true, 10, false));
    const MatrixMap g = io::map_from_json(io::to_json(f));
    CHECK(g.kind() == f.kind());
    CHECK((g.op() - f.op()).norm() == 0.0);
    const MapForm form = random_form(2, rng, JordanKind::transpose, false, 10, true);
    const MapForm back = io::form_from_json(io::to_json(form));
    CHECK(back.jordan == JordanKind::transpose);
    CHECK((back.a - form.a).norm() == 0.0);
    CHECK_THROWS_AS(io::matrix_from_json(io::json{{"n", 2}, {"data", io::json::array()}}), UsageError);
  }

  TEST_CASE("region and measure round trips")
  {
    const io::json disk = {{"kind", "disk"}, {"center", {1.0, 0.0}}, {"radius", 0.5}};
    const RegionPredicate r = io::region_from_json(disk);
    CHECK(r(Complex(1.2, 0.0)));
    CHECK_FALSE(r(Complex(2.0, 0.0)));
    const io::json inter = {{"kind", "intersection"},
                            {"children", {disk, {{"kind", "halfplane"}, {"normal", {1.0, 0.0}}, {"offset", 1.0}}}}};
    const RegionPredicate ri = io::region_from_json(inter);
    CHECK(ri(Complex(1.2, 0.0)));
    CHECK_FALSE(ri(Complex(0.8, 0.0)));
    CHECK_THROWS_AS(io::region_from_json(io::json{{"kind", "square"}}), UsageError);

    const BrownMeasure mu({{0.0, 1, 3}, {Complex(1, 1), 2, 3}});
    const BrownMeasure back = io::measure_from_json(io::to_json(mu));
    CHECK(matching_distance(mu, back) == 0.0);
    CHECK(io::format_number(0.1 + 0.2) == "0.3");
  }
}

TEST_SUITE("harness")
{
  TEST_CASE("generators are deterministic")
  {
    for (const std::string& name : family_names()) {
      FamilySpec spec;
      spec.name = name;
      const io::json a = to_json(generate(spec, 4, 7));
      const io::json b = to_json(generate(spec, 4, 7));
      CHECK_MESSAGE(a == b, name);
      if (name != "example53_discretization")
        CHECK_MESSAGE(a != to_json(generate(spec, 4, 8)), name);
    }
    FamilySpec bad;
    bad.name = "wishart";
    CHECK_THROWS_AS(generate(bad, 4, 1), UsageError);
    FamilySpec p;
    p.name = "random_projection";
    p.k = 5;
    CHECK_THROWS_AS(generate(p, 4, 1), UsageError);
  }

  TEST_CASE("generated families have the advertised structure")
  {
    FamilySpec spec;
    spec.name = "nilpotent_upper";
    const CMatrix nil = std::get<CMatrix>(generate(spec, 5, 3));
    CHECK(nil.triangularView<Eigen::Lower>().toDenseMatrix().norm() == 0.0);
    spec.name = "random_projection";
    spec.k = 2;
    CHECK(std::get<Projection>(generate(spec, 5, 3)).rank() == 2);
    spec.name = "canonical_form";
    spec.unital = true;
    const MatrixMap f = std::get<MatrixMap>(generate(spec, 3, 3));
    CHECK((f.apply(CMatrix::Identity(3, 3)) - CMatrix::Identity(3, 3)).norm() < 1e-10);
    spec.name = "example53_discretization";
    CHECK((std::get<CMatrix>(generate(spec, 8, 0)) - example53_discretization(8)).norm() == 0.0);
  }

  TEST_CASE("config parsing")
  {
    const io::json j = {{"suite", "rank-axioms"},
                        {"n", {2, 3}},
                        {"trials", 5},
                        {"seed", 9},
                        {"tolerances", {{"rank-tol", 1e-8}}}};
    const SuiteConfig c = config_from_json(j);
    CHECK(c.suite == "rank-axioms");
    CHECK(c.n_values == std::vector<Index>{2, 3});
    CHECK(c.trials == 5);
    CHECK(c.seed == 9);
    CHECK(c.tolerance("rank-tol", 1.0) == 1e-8);
    CHECK(c.tolerance("other", 0.5) == 0.5);
    CHECK(config_from_json(to_json(c)).seed == 9);
    CHECK(config_from_json(to_json(c)).n_values == c.n_values);
    io::json typo = j;
    typo["trails"] = 3;
    CHECK_THROWS_AS(config_from_json(typo), UsageError);
  }

  TEST_CASE("every suite is registered with anchors")
  {
    for (const std::string& s : suite_names()) {
      CHECK_FALSE(default_n_values(s).empty());
      bool any = false;
      for (const PropertyInfo& p : registry())
        if (p.suite == s) {
          any = true;
          CHECK_FALSE(p.anchor.empty());
        }
      CHECK_MESSAGE(any, s);
    }
    SuiteConfig c;
    c.suite = "no-such-suite";
    CHECK_THROWS_AS(run_suite(c), UsageError);
    c.suite = "rank-axioms";
    c.properties = {"no-such-property"};
    CHECK_THROWS_AS(run_suite(c), UsageError);
  }

  TEST_CASE("zero trials pass vacuously")
  {
    SuiteConfig c;
    c.suite = "fk-axioms";
    c.trials = 0;
    const Report r = run_suite(c);
    CHECK(r.exit_code() == 0);
    for (const PropertyRecord& p : r.properties)
      CHECK(p.trials == 0);
  }

  TEST_CASE("reports are reproducible")
  {
    SuiteConfig c;
    c.suite = "rank-axioms";
    c.trials = 3;
    c.n_values = {2, 3};
    const Report a = run_suite(c);
    const Report b = run_suite(c);
    CHECK(a.failures() == 0);
    CHECK(a.to_json(false).dump() == b.to_json(false).dump());
    CHECK(a.to_json(true).contains("timing"));
    CHECK_FALSE(a.to_json(false).contains("timing"));
    c.seed += 1;
    CHECK(run_suite(c).to_json(false).dump() != a.to_json(false).dump());
    const std::string text = a.to_text();
    CHECK(std::count(text.begin(), text.end(), '\n') >= static_cast<long>(a.properties.size()));
  }

  TEST_CASE("mutant control is caught")
  {
    SuiteConfig c;
    c.suite = "fk-axioms";
    c.trials = 3;
    c.n_values = {2, 4};
    c.properties = {"det-preservation-control"};
    CHECK(run_suite(c).failures() == 0);
    c.inject_mutant = true;
    const Report r = run_suite(c);
    REQUIRE(r.properties.size() == 1);
    CHECK(r.properties[0].failures > 0);
    CHECK_FALSE(r.properties[0].witnesses.empty());
    CHECK(r.exit_code() == 1);
  }

  TEST_CASE("environment overrides")
  {
    SuiteConfig c;
    c.suite = "rank-axioms";
    setenv("FKRANK_SEED", "77", 1);
    setenv("FKRANK_TOL_RANK_TOL", "1e-7", 1);
    apply_environment(c);
    unsetenv("FKRANK_SEED");
    unsetenv("FKRANK_TOL_RANK_TOL");
    CHECK(c.seed == 77);
    CHECK(c.tolerance("rank-tol", 0.0) == 1e-7);
    CHECK(c.env_overrides.size() == 2);
  }
}

TEST_SUITE("cli")
{
  TEST_CASE("det")
  {
    TempDir dir;
    CMatrix x = CMatrix::Zero(2, 2);
    x(0, 0) = 1.0;
    x(1, 1) = 4.0;
    const CliRun r = cli({"det", dir.file("x.json", io::to_json(x))});
    CHECK(r.code == 0);
    CHECK(r.out == "2.000000000000000\n");
    CHECK(cli({"det", (dir.path / "missing.json").string()}).code == 2);
  }

  TEST_CASE("decompose and verify")
  {
    TempDir dir;
    const std::string t = dir.file("t.json", io::to_json(MatrixMap::transpose(3)));
    const CliRun d = cli({"decompose", t});
    CHECK(d.code == 0);
    CHECK(d.out.find("anti-isomorphism") != std::string::npos);
    CHECK(io::json::parse(d.out)["classification"] == "anti-isomorphism");

    const std::string twice =
        dir.file("2x.json", io::to_json(MatrixMap(2, MapKind::linear, 2.0 * CMatrix::Identity(4, 4))));
    CHECK(cli({"verify", twice, "--check", "det"}).code == 1);
    CHECK(cli({"verify", t, "--check", "rank"}).code == 0);
    CHECK(cli({"verify", t, "--check", "mult"}).code == 0);

    CMatrix e11 = CMatrix::Zero(2, 2);
    e11(0, 0) = 1.0;
    const std::string sing = dir.file("s.json", io::to_json(MatrixMap::left_multiplication(e11)));
    CHECK(cli({"verify", sing, "--check", "rank"}).code == 1);
  }

  TEST_CASE("rank, brown and hsproj")
  {
    TempDir dir;
    CMatrix x = CMatrix::Zero(2, 2);
    x(0, 1) = 2.0;
    const std::string xs = dir.file("x.json", io::to_json(x));
    const std::string zs = dir.file("z.json", io::to_json(CMatrix(CMatrix::Zero(2, 2))));
    const CliRun r = cli({"rank", xs, zs});
    REQUIRE(r.code == 0);
    CHECK(io::json::parse(r.out)["rank_distance"].get<double>() == doctest::Approx(0.5));

    const CliRun b = cli({"brown", xs});
    REQUIRE(b.code == 0);
    CHECK(io::measure_from_json(io::json::parse(b.out)).atoms().size() == 1);

    CMatrix u = CMatrix::Zero(2, 2);
    u << 1.0, 5.0, 0.0, 3.0;
    const io::json disk = {{"kind", "disk"}, {"center", {1.0, 0.0}}, {"radius", 0.5}};
    const CliRun h = cli({"hsproj", dir.file("u.json", io::to_json(u)), dir.file("r.json", disk)});
    CHECK(h.code == 0);
    CHECK(io::json::parse(h.out)["trace_p"].get<double>() == doctest::Approx(0.5));

    const std::string csv = (dir.path / "grid.csv").string();
    CHECK(cli({"brown", xs, "--grid", "--cells", "16", "--output", csv}).code == 0);
    std::ifstream in(csv);
    Index lines = 0;
    for (std::string line; std::getline(in, line);)
      ++lines;
    CHECK(lines >= 16 * 16);
  }

  TEST_CASE("gen and suite")
  {
    const CliRun g = cli({"gen", "ginibre", "--n", "3", "--seed", "5"});
    REQUIRE(g.code == 0);
    CHECK(io::matrix_from_json(io::json::parse(g.out)).rows() == 3);
    CHECK(g.out == cli({"gen", "ginibre", "--n", "3", "--seed", "5"}).out);

    TempDir dir;
    const std::string report = (dir.path / "report.json").string();
    const CliRun s = cli({"suite", "rank-axioms", "--trials", "2", "--n", "2", "--output", report});
    CHECK(s.code == 0);
    const io::json j = io::read_json_file(report);
    CHECK(j["suite"] == "rank-axioms");

    CHECK(cli({"suite", "fk-axioms", "--trials", "2", "--n", "2", "--inject-mutant"}).code == 1);
  }

  TEST_CASE("usage errors")
  {
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({}).code == 2);
    CHECK(cli({"gen", "ginibre"}).code == 2);
    CHECK(cli({"suite", "no-such-suite"}).code == 2);
    CHECK(cli({"--help"}).code == 0);
  }
}
