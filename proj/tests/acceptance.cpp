// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "fkrank/fkdet.hpp"
#include "fkrank/harness.hpp"
#include "fkrank/random.hpp"
#include "oracles.hpp"

using namespace fkrank;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct SuiteRun {
  Index trials = 0;
  Index failures = 0;
  double worst = 0.0;
  double seconds = 0.0;
  std::string failing;
};

SuiteRun run(const std::string& suite, std::vector<Index> ns, Index trials, std::vector<std::string> properties)
{
  SuiteConfig c;
  c.suite = suite;
  c.n_values = std::move(ns);
  c.trials = trials;
  c.properties = std::move(properties);
  const Report r = run_suite(c);
  SuiteRun out;
  out.seconds = r.wall_clock;
  for (const PropertyRecord& p : r.properties) {
    out.trials += p.trials;
    out.failures += p.failures;
    out.worst = std::max(out.worst, p.worst_residual);
    if (p.failures > 0)
      out.failing += (out.failing.empty() ? "" : ",") + p.name;
  }
  return out;
}

void merge(SuiteRun& a, const SuiteRun& b)
{
  a.trials += b.trials;
  a.failures += b.failures;
  a.worst = std::max(a.worst, b.worst);
  a.seconds += b.seconds;
  if (!b.failing.empty())
    a.failing += (a.failing.empty() ? "" : ",") + b.failing;
}

Outcome judge(const SuiteRun& r, Index min_trials, double time_limit)
{
  char buf[256];
  std::snprintf(buf, sizeof buf, "trials=%ld failures=%ld worst=%.3g time=%.2fs", static_cast<long>(r.trials),
                static_cast<long>(r.failures), r.worst, r.seconds);
  std::string detail = buf;
  if (!r.failing.empty())
    detail += " failing=" + r.failing;
  const bool ok = r.failures == 0 && r.trials >= min_trials && (time_limit <= 0.0 || r.seconds < time_limit);
  return {ok, detail};
}

Outcome criterion1()
{
  const auto t0 = Clock::now();
  const CMatrix x = example53_discretization(512);
  const CMatrix eye = CMatrix::Identity(512, 512);
  double worst = 0.0;
  for (const double lambda : {0.0, 0.25, 0.5, 0.75}) {
    const double expected = lambda == 0.0 ? std::exp(-1.0)
                                          : std::exp(-1.0) * std::pow(lambda, lambda) *
                                                std::pow(1.0 - lambda, 1.0 - lambda);
    worst = std::max(worst, std::abs(fk_det(CMatrix(x - lambda * eye)) - expected));
  }
  const double integral = oracle::simpson([](double t) { return std::log(2.0 - t); }, 0.0, 1.0, 2000);
  const double off = std::abs(fk_logdet(CMatrix(x - 2.0 * eye)) - integral);
  const SuiteRun suite = run("example53", {512}, 1, {});
  const double elapsed = seconds_since(t0);
  char buf[256];
  std::snprintf(buf, sizeof buf, "curve_err=%.3g offsupport_err=%.3g suite_failures=%ld time=%.2fs", worst, off,
                static_cast<long>(suite.failures), elapsed);
  return {worst <= 1e-2 && off <= 1e-3 && suite.failures == 0 && elapsed < 5.0, buf};
}

}  // namespace

int main()
{
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"C1 determinant curve of the multiplication operator", criterion1},
      {"C2 Fuglede-Kadison axioms",
       [] {
         return judge(run("fk-axioms", {2, 4, 8, 16}, 125,
                          {"det-multiplicative", "det-adjoint", "det-scalar", "det-contraction"}),
                      4 * 500, 30.0);
       }},
      {"C3 log-determinant atom sum",
       [] { return judge(run("brown-identities", {2, 4, 8, 16}, 25, {"ldet-atom-sum"}), 100, 0.0); }},
      {"C4 invariant projections for regions",
       [] { return judge(run("hs-projections", {2, 4, 8, 16}, 50, {"hs-projection-properties"}), 200, 0.0); }},
      {"C5 Brown measure splitting",
       [] { return judge(run("brown-identities", {2, 4, 8, 16}, 25, {"brown-decomposition"}), 100, 0.0); }},
      {"C6 rank metric and regular ring identities",
       [] {
         SuiteRun r = run("rank-axioms", {2, 4, 8}, 100, {});
         merge(r, run("regring-identities", {2, 4, 8}, 100, {}));
         return judge(r, 17 * 300, 20.0);
       }},
      {"C7 canonical form round trip",
       [] {
         SuiteRun r = run("decomposition-roundtrip", {2, 3, 4, 6, 8}, 40, {"roundtrip"});
         merge(r, run("decomposition-roundtrip", {2, 3, 4, 6, 8}, 20, {"perturbed-rejection"}));
         return judge(r, 300, 60.0);
       }},
      {"C8 unital determinant preservers",
       [] {
         return judge(run("hk-theorem", {2, 3, 4, 5}, 25,
                          {"det-mode-unital-form", "polar-chain-identity", "brown-preservation"}),
                      300, 0.0);
       }},
      {"C9 isometry lemmas", [] { return judge(run("isometry-lemmas", {2, 4, 6}, 50, {}), 150, 0.0); }},
      {"C10 L0 norm limit",
       [] { return judge(run("rank-axioms", {2, 4, 8, 16}, 25, {"l0-rank-limit"}), 100, 0.0); }},
  };

  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
