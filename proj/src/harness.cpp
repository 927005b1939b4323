#include "fkrank/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>

#include "fkrank/decomp.hpp"
#include "fkrank/fkdet.hpp"
#include "fkrank/random.hpp"
#include "fkrank/region.hpp"

extern char** environ;

namespace fkrank {

// ---------------------------------------------------------------------------
// Generators

const std::vector<std::string>& family_names()
{
  static const std::vector<std::string> names = {
      "ginibre",      "haar_unitary",      "random_projection",       "random_invertible",
      "nilpotent_upper", "random_idempotent", "positive_diag", "example53_discretization",
      "canonical_form", "perturbed_form"};
  return names;
}

MapForm random_form(Index n, Stream& rng, JordanKind jordan, bool conjugated, double cond_max, bool unital)
{
  MapForm form;
  form.a = random_invertible(n, cond_max, rng);
  form.b = unital ? CMatrix(form.a.inverse()) : random_invertible(n, cond_max, rng);
  form.jordan = jordan;
  form.conjugated = conjugated;
  return form;
}

MatrixMap perturb(const MatrixMap& f, double eps, Stream& rng)
{
  const Index m = f.order() * f.order();
  const CMatrix g = ginibre(m, rng);
  return MatrixMap(f.order(), f.kind(), f.op() + (eps * f.op().norm() / g.norm()) * g);
}

Generated generate(const FamilySpec& family, Index n, std::uint64_t seed)
{
  if (n < 1)
    throw UsageError("generate: n must be positive");
  Stream rng(seed);
  const Index k = family.k < 0 ? n / 2 : family.k;
  const std::string& name = family.name;
  if (name == "ginibre")
    return ginibre(n, rng);
  if (name == "haar_unitary")
    return haar_unitary(n, rng);
  if (name == "random_projection") {
    if (k > n)
      throw UsageError("random_projection: k exceeds n");
    return Projection::from_matrix(random_projection(n, k, rng));
  }
  if (name == "random_invertible")
    return random_invertible(n, family.cond_max, rng);
  if (name == "nilpotent_upper")
    return nilpotent_upper(n, rng);
  if (name == "random_idempotent") {
    if (k > n)
      throw UsageError("random_idempotent: k exceeds n");
    return random_idempotent(n, k, rng);
  }
  if (name == "positive_diag")
    return positive_diag(n, rng);
  if (name == "example53_discretization")
    return example53_discretization(n);
  if (name == "canonical_form" || name == "perturbed_form") {
    if (!(family.cond_max >= 1.0))
      throw UsageError(name + ": cond_max must be >= 1");
    const MatrixMap f =
        from_form(random_form(n, rng, family.jordan, family.conjugated, family.cond_max, family.unital));
    if (name == "canonical_form")
      return f;
    if (!(family.eps > 0.0) || !std::isfinite(family.eps))
      throw UsageError("perturbed_form: eps must be positive");
    return perturb(f, family.eps, rng);
  }
  throw UsageError("unknown family \"" + name + "\"");
}

io::json to_json(const Generated& g)
{
  return std::visit(
      [](const auto& v) -> io::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Projection>)
          return io::to_json(v.matrix());
        else
          return io::to_json(v);
      },
      g);
}

// ---------------------------------------------------------------------------
// Config

double SuiteConfig::tolerance(const std::string& key, double fallback) const
{
  const auto it = tolerances.find(key);
  return it == tolerances.end() ? fallback : it->second;
}

namespace {

template <typename T>
T integer_field(const io::json& v, const char* key)
{
  if (!v.is_number_integer())
    throw UsageError(std::string("config: \"") + key + "\" must be an integer");
  return v.get<T>();
}

}  // namespace

SuiteConfig config_from_json(const io::json& j)
{
  if (!j.is_object())
    throw UsageError("config: expected an object");
  SuiteConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "suite") {
      if (!v.is_string())
        throw UsageError("config: \"suite\" must be a string");
      c.suite = v.get<std::string>();
    } else if (key == "n") {
      if (!v.is_array())
        throw UsageError("config: \"n\" must be an array");
      for (const auto& e : v) {
        const auto n = integer_field<long long>(e, "n");
        if (n < 1)
          throw UsageError("config: n values must be positive");
        c.n_values.push_back(static_cast<Index>(n));
      }
    } else if (key == "trials") {
      const auto t = integer_field<long long>(v, "trials");
      if (t < 0)
        throw UsageError("config: trials must be nonnegative");
      c.trials = static_cast<Index>(t);
    } else if (key == "seed") {
      if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<long long>() < 0))
        throw UsageError("config: \"seed\" must be a nonnegative integer");
      c.seed = v.get<std::uint64_t>();
    } else if (key == "tolerances") {
      if (!v.is_object())
        throw UsageError("config: \"tolerances\" must be an object");
      for (const auto& [name, t] : v.items()) {
        if (!t.is_number() || !(t.get<double>() > 0.0))
          throw UsageError("config: tolerance \"" + name + "\" must be a positive number");
        c.tolerances[name] = t.get<double>();
      }
    } else if (key == "output") {
      if (!v.is_string())
        throw UsageError("config: \"output\" must be a string");
      c.output = v.get<std::string>();
    } else if (key == "properties") {
      if (!v.is_array())
        throw UsageError("config: \"properties\" must be an array");
      for (const auto& e : v) {
        if (!e.is_string())
          throw UsageError("config: property names must be strings");
        c.properties.push_back(e.get<std::string>());
      }
    } else if (key == "inject_mutant") {
      if (!v.is_boolean())
        throw UsageError("config: \"inject_mutant\" must be a boolean");
      c.inject_mutant = v.get<bool>();
    } else if (key == "env_overrides") {
      if (!v.is_array())
        throw UsageError("config: \"env_overrides\" must be an array");
      for (const auto& e : v) {
        if (!e.is_string())
          throw UsageError("config: env_overrides entries must be strings");
        c.env_overrides.push_back(e.get<std::string>());
      }
    } else {
      throw UsageError("config: unknown key \"" + key + "\"");
    }
  }
  return c;
}

io::json to_json(const SuiteConfig& c)
{
  io::json j = {{"suite", c.suite},
                {"n", c.n_values},
                {"trials", c.trials},
                {"seed", c.seed},
                {"tolerances", c.tolerances},
                {"properties", c.properties},
                {"inject_mutant", c.inject_mutant},
                {"env_overrides", c.env_overrides}};
  if (!c.output.empty())
    j["output"] = c.output;
  return j;
}

void apply_environment(SuiteConfig& c)
{
  if (const char* s = std::getenv("FKRANK_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (end == s || *end != '\0')
      throw UsageError("FKRANK_SEED must be an unsigned integer");
    c.seed = v;
    c.env_overrides.push_back(std::string("FKRANK_SEED=") + s);
  }
  static const std::string prefix = "FKRANK_TOL_";
  std::vector<std::string> entries;
  for (char** e = environ; e && *e; ++e)
    if (std::string(*e).rfind(prefix, 0) == 0)
      entries.emplace_back(*e);
  std::sort(entries.begin(), entries.end());
  for (const std::string& entry : entries) {
    const auto eq = entry.find('=');
    std::string key = entry.substr(prefix.size(), eq - prefix.size());
    for (char& ch : key)
      ch = ch == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    const std::string value = entry.substr(eq + 1);
    char* end = nullptr;
    const double t = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0' || !(t > 0.0))
      throw UsageError(entry.substr(0, eq) + " must be a positive number");
    c.tolerances[key] = t;
    c.env_overrides.push_back(entry);
  }
}

// ---------------------------------------------------------------------------
// Property registry

namespace {

constexpr double kPropertyRankTol = 1e-10;
constexpr std::size_t kMaxWitnesses = 3;

struct Outcome {
  bool ok = true;
  double residual = 0.0;
  io::json witness = io::json::object();
};

struct Trial {
  const SuiteConfig& config;
  const std::string& property;
  Index n;
  Index index;
  Stream rng;

  double tol(double fallback) const { return config.tolerance(property, fallback); }
  double rank_tol() const { return config.tolerance("rank-tol", kPropertyRankTol); }
  Index rank(const CMatrix& x) const { return numerical_rank(x, rank_tol()); }
};

using Body = std::function<Outcome(Trial&)>;

struct Property {
  std::string suite;
  std::string name;
  std::string anchor;
  Body body;
  Index min_n = 1;
  Index max_n = 0;      // 0: unbounded
  Index trial_cap = 0;  // 0: config.trials
};

Outcome bounded(double residual, double tol)
{
  Outcome o;
  o.residual = residual;
  o.ok = residual <= tol;
  return o;
}

Outcome exact(Index lhs, Index rhs)
{
  Outcome o;
  o.residual = std::abs(static_cast<double>(lhs - rhs));
  o.ok = lhs == rhs;
  o.witness["lhs"] = lhs;
  o.witness["rhs"] = rhs;
  return o;
}

Outcome holds(bool condition, double residual = 0.0)
{
  Outcome o;
  o.ok = condition;
  o.residual = condition ? residual : std::max(residual, 1.0);
  return o;
}

Outcome& with(Outcome& o, const char* key, const CMatrix& x)
{
  o.witness[key] = io::to_json(x);
  return o;
}

CMatrix eye(Index n) { return CMatrix::Identity(n, n); }

Complex random_scalar(Stream& rng)
{
  const double mag = std::exp(rng.uniform(std::log(1e-3), std::log(1e3)));
  const double arg = rng.uniform(0.0, 2.0 * M_PI);
  return std::polar(mag, arg);
}

/// Projection onto the span of the columns of m.
Projection span_of(const CMatrix& m, Index n)
{
  Eigen::HouseholderQR<CMatrix> qr(m);
  const CMatrix q = qr.householderQ() * CMatrix::Identity(n, m.cols());
  return Projection::onto_orthonormal(q, n);
}

JordanKind pick_jordan(Stream& rng) { return rng.coin() ? JordanKind::identity : JordanKind::transpose; }

/// Random disk or half-plane whose boundary stays at least margin away from
/// the spectrum; resamples until the spectrum is split when possible.
RegionPredicate random_region(const CVector& spectrum, double margin, Stream& rng)
{
  const auto acceptable = [&](const RegionPredicate& r, bool need_split) {
    Index inside = 0;
    for (Index i = 0; i < spectrum.size(); ++i) {
      if (r.boundary_distance(spectrum(i)) < margin)
        return false;
      inside += r.contains(spectrum(i)) ? 1 : 0;
    }
    return !need_split || (inside > 0 && inside < spectrum.size());
  };
  for (int attempt = 0; attempt < 400; ++attempt) {
    const bool need_split = attempt < 200 && spectrum.size() > 1;
    RegionPredicate r = rng.coin()
                            ? RegionPredicate::disk(spectrum(rng.uniform_index(0, spectrum.size() - 1)) +
                                                        0.3 * rng.complex_normal(),
                                                    rng.uniform(0.1, 1.2))
                            : RegionPredicate::halfplane(std::polar(1.0, rng.uniform(0.0, 2.0 * M_PI)),
                                                         rng.uniform(-0.8, 0.8));
    if (acceptable(r, need_split))
      return r;
  }
  throw Degeneracy("random_region: no region with the requested boundary margin");
}

double relative(double value, double reference) { return std::abs(value - reference) / std::max(1.0, std::abs(reference)); }

// -- rank-axioms -------------------------------------------------------------

Index random_rank(Trial& t, Index lo = 0) { return t.rng.uniform_index(lo, t.n); }

std::vector<Property> rank_axioms()
{
  const std::string s = "rank-axioms";
  return {
      {s, "rank-norm-zero", "||x||_S = 0 <=> x = 0",
       [](Trial& t) {
         const CMatrix x = conditioned_low_rank(t.n, random_rank(t), t.rng);
         const bool zero = x.norm() == 0.0;
         Outcome o = holds((rank_norm(x, t.rank_tol()) == 0.0) == zero);
         return with(o, "x", x);
       }},
      {s, "rank-norm-triangle", "||x + y||_S <= ||x||_S + ||y||_S",
       [](Trial& t) {
         const CMatrix x = conditioned_low_rank(t.n, random_rank(t), t.rng);
         const CMatrix y = conditioned_low_rank(t.n, random_rank(t), t.rng);
         Outcome o = holds(t.rank(x + y) <= t.rank(x) + t.rank(y));
         with(o, "x", x);
         return with(o, "y", y);
       }},
      {s, "rank-norm-submultiplicative", "||xy||_S <= min{||x||_S, ||y||_S}",
       [](Trial& t) {
         const CMatrix x = conditioned_low_rank(t.n, random_rank(t), t.rng);
         const CMatrix y = conditioned_low_rank(t.n, random_rank(t), t.rng);
         const Index rx = t.rank(x), ry = t.rank(y);
         // The product of generic factors attains the bound, so equality is asserted too.
         Outcome o = exact(t.rank(x * y), std::min(rx, ry));
         with(o, "x", x);
         return with(o, "y", y);
       }},
      {s, "rank-norm-orthogonal-additivity", "||p + q||_S = ||p||_S + ||q||_S",
       [](Trial& t) {
         const CMatrix u = haar_unitary(t.n, t.rng);
         const Index k1 = t.rng.uniform_index(0, t.n);
         const Index k2 = t.rng.uniform_index(0, t.n - k1);
         const CMatrix p = u.leftCols(k1) * u.leftCols(k1).adjoint();
         const CMatrix q = u.middleCols(k1, k2) * u.middleCols(k1, k2).adjoint();
         Outcome o = exact(t.rank(p + q), t.rank(p) + t.rank(q));
         with(o, "p", p);
         return with(o, "q", q);
       }},
      {s, "rank-scalar-invariance", "||lambda x||_S = ||x||_S",
       [](Trial& t) {
         const CMatrix x = conditioned_low_rank(t.n, random_rank(t), t.rng);
         const Complex lambda = random_scalar(t.rng);
         Outcome o = exact(t.rank(lambda * x), t.rank(x));
         o.witness["lambda"] = io::to_json_complex(lambda);
         return with(o, "x", x);
       }},
      {s, "rank-metric-triangle", "d_S(x, z) <= d_S(x, y) + d_S(y, z)",
       [](Trial& t) {
         const CMatrix x = conditioned_low_rank(t.n, random_rank(t), t.rng);
         const CMatrix y = conditioned_low_rank(t.n, random_rank(t), t.rng);
         const CMatrix z = conditioned_low_rank(t.n, random_rank(t), t.rng);
         const Index lhs = t.rank(x - z);
         Outcome o = holds(lhs <= t.rank(x - y) + t.rank(y - z));
         with(o, "x", x);
         with(o, "y", y);
         return with(o, "z", z);
       }},
      {s, "rank-monotone", "||axb||_S <= ||x||_S",
       [](Trial& t) {
         const CMatrix a = conditioned_low_rank(t.n, random_rank(t), t.rng);
         const CMatrix x = conditioned_low_rank(t.n, random_rank(t), t.rng);
         const CMatrix b = conditioned_low_rank(t.n, random_rank(t), t.rng);
         Outcome o = holds(t.rank(a * x * b) <= t.rank(x));
         with(o, "a", a);
         with(o, "x", x);
         return with(o, "b", b);
       }},
      {s, "l0-rank-limit", "lim ||lambda x||_L0 = tau(r(x)) = ||x||_S",
       [](Trial& t) {
         const CMatrix x = conditioned_low_rank(t.n, random_rank(t), t.rng, 1e-3, 1.0);
         const double gap = std::abs(l0_norm(1e8 * x) - rank_norm(x));
         Outcome o = bounded(gap, t.tol(1e-6));
         return with(o, "x", x);
       }},
  };
}

// -- regring-identities ------------------------------------------------------

std::vector<Property> regring_identities()
{
  const std::string s = "regring-identities";
  return {
      {s, "partial-inverse-identities", "xi(x) = l(x), i(x)x = r(x), xi(x)x = x, i(x)l(x) = i(x), r(x)i(x) = i(x)",
       [](Trial& t) {
         const CMatrix x = conditioned_low_rank(t.n, random_rank(t), t.rng);
         const CMatrix i = partial_inverse(x, t.rank_tol());
         const Supports sp = supports(x, t.rank_tol());
         const CMatrix& l = sp.left.matrix();
         const CMatrix& r = sp.right.matrix();
         const double res = std::max({(x * i - l).norm(), (i * x - r).norm(), (x * i * x - x).norm(),
                                      (i * l - i).norm(), (r * i - i).norm()});
         Outcome o = bounded(res, t.tol(1e-10));
         return with(o, "x", x);
       }},
      {s, "support-normalizers", "xa = l(x), bx = r(x)",
       [](Trial& t) {
         const CMatrix x = conditioned_low_rank(t.n, random_rank(t, 1), t.rng);
         const SupportNormalizers nb = support_normalizers(x, t.rank_tol());
         const Supports sp = supports(x, t.rank_tol());
         const double res = std::max((x * nb.a - sp.left.matrix()).norm(), (nb.b * x - sp.right.matrix()).norm());
         Outcome o = bounded(res, t.tol(1e-10));
         if (numerical_rank(nb.a, t.rank_tol()) != t.n || numerical_rank(nb.b, t.rank_tol()) != t.n)
           o.ok = false;
         return with(o, "x", x);
       }},
      {s, "support-invariance", "l(xb) = l(x), r(ax) = r(x)",
       [](Trial& t) {
         const CMatrix x = conditioned_low_rank(t.n, random_rank(t), t.rng);
         const CMatrix a = random_invertible(t.n, 1e2, t.rng);
         const CMatrix b = random_invertible(t.n, 1e2, t.rng);
         const Supports sx = supports(x, t.rank_tol());
         const double res = std::max(projection_distance(supports(x * b, t.rank_tol()).left, sx.left),
                                     projection_distance(supports(a * x, t.rank_tol()).right, sx.right));
         Outcome o = bounded(res, t.tol(1e-8));
         with(o, "x", x);
         with(o, "a", a);
         return with(o, "b", b);
       }},
      {s, "rank-invertible-invariance", "||axb||_S = ||x||_S",
       [](Trial& t) {
         const CMatrix x = conditioned_low_rank(t.n, random_rank(t), t.rng);
         const CMatrix a = random_invertible(t.n, 1e2, t.rng);
         const CMatrix b = random_invertible(t.n, 1e2, t.rng);
         Outcome o = exact(t.rank(a * x * b), t.rank(x));
         with(o, "x", x);
         with(o, "a", a);
         return with(o, "b", b);
       }},
      {s, "block-rank", "l(ai(c)b)",
       [](Trial& t) {
         const Index m = t.n / 2;
         const Index c_order = t.n - m;
         const Index ka = t.rng.uniform_index(0, std::min(m, c_order));
         const Index kb = t.rng.uniform_index(0, std::min(m, c_order));
         const CMatrix a = ka == 0 ? CMatrix::Zero(m, c_order)
                                   : CMatrix(ginibre(m, ka, t.rng) * ginibre(ka, c_order, t.rng));
         const CMatrix b = kb == 0 ? CMatrix::Zero(c_order, m)
                                   : CMatrix(ginibre(c_order, kb, t.rng) * ginibre(kb, m, t.rng));
         const CMatrix c = random_invertible(c_order, 10.0, t.rng);
         CMatrix x = CMatrix::Zero(t.n, t.n);
         x.topRightCorner(m, c_order) = a;
         x.bottomLeftCorner(c_order, m) = b;
         x.bottomRightCorner(c_order, c_order) = c;
         const CMatrix schur_complement = a * c.inverse() * b;
         const Index rhs = numerical_rank(c, t.rank_tol()) +
                           (m == 0 ? 0 : numerical_rank(schur_complement, t.rank_tol()));
         Outcome o = exact(t.rank(x), rhs);
         return with(o, "x", x);
       }},
      {s, "meet-join-trace", "tau(p v q) + tau(p ^ q) = tau(p) + tau(q)",
       [](Trial& t) {
         const Index common = t.rng.uniform_index(0, t.n);
         const Index k1 = t.rng.uniform_index(0, t.n - common);
         const Index k2 = t.rng.uniform_index(0, t.n - common);
         const CMatrix shared = ginibre(t.n, common, t.rng);
         CMatrix m1(t.n, common + k1), m2(t.n, common + k2);
         m1 << shared, ginibre(t.n, k1, t.rng);
         m2 << shared, ginibre(t.n, k2, t.rng);
         const Projection p = span_of(m1, t.n);
         const Projection q = span_of(m2, t.n);
         const MeetJoin mj = proj_meet_join(p, q);
         Outcome o = exact(mj.join.rank() + mj.meet.rank(), p.rank() + q.rank());
         if (mj.ambiguous)
           o.ok = false;
         with(o, "p", p.matrix());
         return with(o, "q", q.matrix());
       }},
      {s, "idempotent-conjugator", "a e a^-1 = l(e)",
       [](Trial& t) {
         const CMatrix e = random_idempotent(t.n, random_rank(t), t.rng);
         const Conjugator c = projection_conjugator(e);
         const IdempotentSplit split = idempotent_split(e);
         const double scale = std::max(1.0, e.squaredNorm());
         const double res = std::max((c.a * e * c.a_inverse - split.p.matrix()).norm(),
                                     (c.a * c.a_inverse - eye(t.n)).norm()) /
                            scale;
         Outcome o = bounded(res, t.tol(1e-10));
         return with(o, "e", e);
       }},
      {s, "idempotent-complement-support", "r(1 - e) = 1 - l(e)",
       [](Trial& t) {
         const CMatrix e = random_idempotent(t.n, random_rank(t), t.rng);
         const Projection le = supports(e, t.rank_tol()).left;
         // Rank of 1 - e is judged at the scale of e.
         const CMatrix f = eye(t.n) - e;
         const double cut = t.rank_tol() * std::max(1.0, singular_values(e)(0));
         const double top = f.size() == 0 ? 0.0 : singular_values(f)(0);
         const Projection r1 = top <= cut ? Projection::zero(t.n) : supports(f, cut / top).right;
         Outcome o = bounded(projection_distance(r1, le.complement()), t.tol(1e-8));
         return with(o, "e", e);
       }},
      {s, "peirce-reconstruction", "x = pxp + pxq + qxp + qxq",
       [](Trial& t) {
         const CMatrix x = ginibre(t.n, t.rng);
         const Projection p = Projection::from_matrix(random_projection(t.n, random_rank(t), t.rng));
         const PeirceBlocks blocks = peirce_decompose(x, p);
         Outcome o = bounded((blocks.reconstruct() - x).norm() / std::max(1.0, x.norm()), t.tol(1e-12));
         return with(o, "x", x);
       }},
  };
}

// -- fk-axioms -------------------------------------------------------------

std::vector<Property> fk_axioms()
{
  const std::string s = "fk-axioms";
  return {
      {s, "det-multiplicative", "Delta(xy) = Delta(x)Delta(y)",
       [](Trial& t) {
         const CMatrix x = random_invertible(t.n, 1e4, t.rng);
         const CMatrix y = random_invertible(t.n, 1e4, t.rng);
         const double dx = fk_det(x), dy = fk_det(y);
         Outcome o = bounded(std::abs(fk_det(x * y) - dx * dy) / (dx * dy), t.tol(1e-8));
         with(o, "x", x);
         return with(o, "y", y);
       }},
      {s, "det-adjoint", "Delta(x*) = Delta(x)",
       [](Trial& t) {
         const CMatrix x = random_invertible(t.n, 1e4, t.rng);
         const double d = fk_det(x);
         Outcome o = bounded(std::abs(fk_det(x.adjoint()) - d) / d, t.tol(1e-8));
         return with(o, "x", x);
       }},
      {s, "det-scalar", "Delta(lambda 1) = |lambda|",
       [](Trial& t) {
         const Complex lambda = random_scalar(t.rng);
         Outcome o = bounded(std::abs(fk_det(CMatrix(lambda * eye(t.n))) - std::abs(lambda)) / std::abs(lambda),
                             t.tol(1e-8));
         o.witness["lambda"] = io::to_json_complex(lambda);
         return o;
       }},
      {s, "det-contraction", "0 <= x <= 1 => Delta(x) <= 1",
       [](Trial& t) {
         const CMatrix u = haar_unitary(t.n, t.rng);
         RVector d(t.n);
         for (Index i = 0; i < t.n; ++i)
           d(i) = std::exp(-std::log(1e4) * t.rng.uniform());
         if (t.rng.coin())
           d(0) = 1.0;
         const CMatrix x = u * d.cast<Complex>().asDiagonal() * u.adjoint();
         const double excess = std::max(0.0, fk_det(x) - 1.0);
         Outcome o = bounded(excess, t.tol(1e-8));
         return with(o, "x", x);
       }},
      {s, "det-unitary", "Delta(u) = 1",
       [](Trial& t) {
         const CMatrix u = haar_unitary(t.n, t.rng);
         Outcome o = bounded(std::abs(fk_det(u) - 1.0), t.tol(1e-8));
         return with(o, "u", u);
       }},
      {s, "det-preservation-control", "Delta(aJ(x)a^-1) = Delta(x)",
       [](Trial& t) {
         MatrixMap f = from_form(random_form(t.n, t.rng, pick_jordan(t.rng), false, 1e2, true));
         if (t.config.inject_mutant)
           f = MatrixMap(t.n, f.kind(), 2.0 * f.op());
         ProbeSet probes;
         probes.random_count = 8;
         probes.seed = t.rng.child(1).seed();
         const Verdict v = is_det_preserving(f, probes);
         Outcome o = holds(v.pass, v.worst);
         if (!v.pass) {
           o.witness["detail"] = v.detail;
           o.witness["probe_seed"] = v.seed;
           if (v.witness)
             with(o, "probe", *v.witness);
         }
         return o;
       },
       1, 0, 10},
  };
}

// -- brown-identities -----------------------------------------------------

CMatrix scaled_ginibre(Index n, Stream& rng) { return ginibre(n, rng) / std::sqrt(static_cast<double>(n)); }

std::vector<Property> brown_identities()
{
  const std::string s = "brown-identities";
  return {
      {s, "ldet-atom-sum", "L det(x - lambda) = int log|t - lambda| dmu_x(t)",
       [](Trial& t) {
         const CMatrix x = scaled_ginibre(t.n, t.rng);
         const BrownMeasure mu = brown_measure(x);
         const CVector spectrum = eigenvalues(x);
         Complex lambda = 0.0;
         for (int attempt = 0; attempt < 100; ++attempt) {
           lambda = 1.2 * t.rng.complex_normal();
           if (distance_to_spectrum(spectrum, lambda) >= 1e-3)
             break;
         }
         const double atom_sum = mu.integrate([&](Complex z) { return std::log(std::abs(z - lambda)); });
         Outcome o = bounded(std::abs(ldet_at(x, lambda) - atom_sum), t.tol(1e-8));
         o.witness["lambda"] = io::to_json_complex(lambda);
         return with(o, "x", x);
       }},
      {s, "brown-unitary-invariance", "mu_{uxu*} = mu_x",
       [](Trial& t) {
         const CMatrix x = scaled_ginibre(t.n, t.rng);
         const CMatrix u = haar_unitary(t.n, t.rng);
         const double d = matching_distance(brown_measure(u * x * u.adjoint()), brown_measure(x));
         Outcome o = bounded(d, t.tol(1e-6));
         with(o, "x", x);
         return with(o, "u", u);
       }},
      {s, "brown-decomposition", "mu_x = tau(p) mu_{xp} + tau(q) mu_{qx}",
       [](Trial& t) {
         const CMatrix x = scaled_ginibre(t.n, t.rng);
         const RegionPredicate region = random_region(eigenvalues(x), 1e-3, t.rng);
         const HSProjectionResult hs = hs_projection(x, region);
         const BrownSplit split = brown_decompose(x, hs.p);
         const BrownMeasure combined =
             BrownMeasure::combine(split.corner, split.rank, split.complement, t.n - split.rank);
         Outcome o = bounded(matching_distance(combined, brown_measure(x)), t.tol(1e-6));
         o.witness["region"] = io::to_json(region);
         return with(o, "x", x);
       },
       2},
      {s, "positive-rank-bound", "mu_x = mu_y, x >= 0 => ||x||_S <= ||y||_S",
       [](Trial& t) {
         const Index r = t.rng.uniform_index(1, t.n);
         RVector d = RVector::Zero(t.n);
         for (Index i = 0; i < r; ++i)
           d(i) = t.rng.uniform(0.5, 2.0);
         const CMatrix u = haar_unitary(t.n, t.rng);
         const CMatrix x = u * d.cast<Complex>().asDiagonal() * u.adjoint();
         // y = v [[A, B], [0, 0]] v* with A upper triangular on the nonzero diagonal of x.
         CMatrix tri = CMatrix::Zero(t.n, t.n);
         tri.topRows(r) = ginibre(r, t.n, t.rng);
         tri.topLeftCorner(r, r).triangularView<Eigen::StrictlyLower>().setZero();
         for (Index i = 0; i < r; ++i)
           tri(i, i) = d(i);
         const CMatrix v = haar_unitary(t.n, t.rng);
         const CMatrix y = v * tri * v.adjoint();
         Outcome o = holds(t.rank(x) <= t.rank(y) &&
                           measures_match(brown_measure(x), brown_measure(y), t.tol(1e-6)));
         with(o, "x", x);
         return with(o, "y", y);
       }},
      {s, "normal-quasinilpotent-zero", "x normal, quasinilpotent => x = 0",
       [](Trial& t) {
         const double tol = 1e-8;
         const bool tiny = t.rng.coin();
         CVector lambda(t.n);
         for (Index i = 0; i < t.n; ++i)
           lambda(i) = (tiny ? 1e-9 : 1.0) * t.rng.complex_normal() / std::sqrt(2.0);
         const CMatrix u = haar_unitary(t.n, t.rng);
         const CMatrix x = u * lambda.asDiagonal() * u.adjoint();
         const double res = quasinilpotent_check(x, tol) ? x.norm() / (static_cast<double>(t.n) * tol) : 0.0;
         Outcome o = bounded(res, 1.0);
         return with(o, "x", x);
       }},
      {s, "grid-total-mass", "mu_x(C) = 1",
       [](Trial& t) {
         const CMatrix x = scaled_ginibre(t.n, t.rng);
         GridSpec grid;
         grid.half_width = spectral_radius(x) + 1.0;
         grid.cells = 48;
         const GridMeasure g = brown_from_grid(x, grid);
         Outcome o = bounded(std::abs(g.total - 1.0), t.tol(5e-2));
         o.witness["total"] = g.total;
         return with(o, "x", x);
       },
       1, 4, 3},
  };
}

// -- hs-projections -------------------------------------------------------

std::vector<Property> hs_projections()
{
  const std::string s = "hs-projections";
  return {
      {s, "hs-projection-properties", "xp = pxp, tau(p) = mu_x(B)",
       [](Trial& t) {
         const CMatrix x = scaled_ginibre(t.n, t.rng);
         const RegionPredicate region = random_region(eigenvalues(x), 1e-3, t.rng);
         const HSProjectionResult hs = hs_projection(x, region);
         const double inv = hs.invariance_residual / std::max(x.norm(), 1e-300);
         const bool counts = hs.p.rank() == hs.selected &&
                             static_cast<Index>(hs.inside_spectrum.size()) == hs.selected &&
                             static_cast<Index>(hs.outside_spectrum.size()) == t.n - hs.selected &&
                             hs.trace_p == hs.mu_b;
         Outcome o = bounded(inv, t.tol(1e-8));
         o.ok = o.ok && counts && hs.inside_ok && hs.outside_ok;
         o.witness["region"] = io::to_json(region);
         return with(o, "x", x);
       }},
      {s, "hs-complement-trace", "tau(p(B)) + tau(p(C \\ B)) = 1",
       [](Trial& t) {
         const CMatrix x = scaled_ginibre(t.n, t.rng);
         const RegionPredicate region = random_region(eigenvalues(x), 1e-3, t.rng);
         const HSProjectionResult in = hs_projection(x, region);
         const HSProjectionResult out = hs_projection(x, RegionPredicate::complement(region));
         Outcome o = exact(in.p.rank() + out.p.rank(), t.n);
         o.witness["region"] = io::to_json(region);
         return with(o, "x", x);
       }},
  };
}

// -- isometry-lemmas -------------------------------------------------------

MatrixMap unital_isometry(Trial& t)
{
  return from_form(random_form(t.n, t.rng, pick_jordan(t.rng), t.rng.coin(), 1e2, true));
}

Outcome& with_map(Outcome& o, const MatrixMap& f)
{
  o.witness["map"] = io::to_json(f);
  return o;
}

std::vector<Property> isometry_lemmas()
{
  const std::string s = "isometry-lemmas";
  return {
      {s, "invertibility-preservation", "Phi(x) invertible <=> x invertible",
       [](Trial& t) {
         const MatrixMap f = from_form(random_form(t.n, t.rng, pick_jordan(t.rng), t.rng.coin(), 1e2, false));
         const double tol = t.config.tolerance("rank-tol", 1e-9);
         for (Index probe = 0; probe < 50; ++probe) {
           const Index k = probe % 2 == 0 ? t.n : t.rng.uniform_index(0, t.n - 1);
           const CMatrix x = conditioned_low_rank(t.n, k, t.rng);
           const bool before = numerical_rank(x, tol) == t.n;
           const bool after = numerical_rank(f.apply(x), tol) == t.n;
           if (before != after) {
             Outcome o = holds(false);
             with(o, "probe", x);
             return with_map(o, f);
           }
         }
         return Outcome{};
       }},
      {s, "support-order", "p <= q => phi(p) <= phi(q)",
       [](Trial& t) {
         const MatrixMap f = unital_isometry(t);
         const CMatrix u = haar_unitary(t.n, t.rng);
         const Index k2 = t.rng.uniform_index(0, t.n);
         const Index k1 = t.rng.uniform_index(0, k2);
         const Projection p = Projection::onto_orthonormal(u.leftCols(k1), t.n);
         const Projection q = Projection::onto_orthonormal(u.leftCols(k2), t.n);
         const Supports sp = support_image(f, p);
         const Supports sq = support_image(f, q);
         const double res = std::max((sp.left.matrix() - sq.left.matrix() * sp.left.matrix()).norm(),
                                     (sp.right.matrix() - sq.right.matrix() * sp.right.matrix()).norm());
         Outcome o = bounded(res, t.tol(1e-8));
         with(o, "p", p.matrix());
         with(o, "q", q.matrix());
         return with_map(o, f);
       }},
      {s, "orthogonal-meets", "pq = 0 => phi(p) ^ phi(q) = 0",
       [](Trial& t) {
         const MatrixMap f = unital_isometry(t);
         const CMatrix u = haar_unitary(t.n, t.rng);
         const Index k1 = t.rng.uniform_index(0, t.n);
         const Index k2 = t.rng.uniform_index(0, t.n - k1);
         const Projection p = Projection::onto_orthonormal(u.leftCols(k1), t.n);
         const Projection q = Projection::onto_orthonormal(u.middleCols(k1, k2), t.n);
         const MeetJoin mj = proj_meet_join(support_image(f, p).left, support_image(f, q).left);
         Outcome o = exact(mj.meet.rank(), 0);
         with(o, "p", p.matrix());
         with(o, "q", q.matrix());
         return with_map(o, f);
       }},
      {s, "idempotent-preservation", "Phi(e)^2 = Phi(e)",
       [](Trial& t) {
         const MatrixMap f = unital_isometry(t);
         const CMatrix e = random_idempotent(t.n, random_rank(t), t.rng);
         const CMatrix fe = f.apply(e);
         Outcome o = bounded(idempotency_residual(fe), t.tol(1e-8));
         with(o, "e", e);
         return with_map(o, f);
       }},
      {s, "corner-annihilation", "x = px + q, tau(l(x)) = tau(q) => pxp = 0",
       [](Trial& t) {
         const MatrixMap f = unital_isometry(t);
         const CMatrix e = random_idempotent(t.n, random_rank(t), t.rng);
         const CMatrix fe = f.apply(e);
         const Projection p = Projection::from_matrix(
             Projection::onto_orthonormal(svd(fe).u.leftCols(idempotent_rank(fe)), t.n).matrix());
         const CMatrix q = p.complement().matrix();
         const CMatrix x = f.apply(CMatrix(eye(t.n) - e));
         const double scale = std::max(1.0, x.norm());
         const double hypothesis = (x - (p.matrix() * x + q)).norm() / scale;
         Outcome o = bounded((p.matrix() * x * p.matrix()).norm() / scale, t.tol(1e-8));
         if (hypothesis > 1e-8 || idempotent_rank(x) != t.n - p.rank())
           o.ok = false;
         o.witness["hypothesis_residual"] = hypothesis;
         with(o, "e", e);
         return with_map(o, f);
       }},
      {s, "zero-product-side", "xy = 0 => Phi(x)Phi(y) = 0 or Phi(y)Phi(x) = 0",
       [](Trial& t) {
         const MatrixMap f = unital_isometry(t);
         int side = 0;  // 1: Phi(x)Phi(y) = 0, 2: Phi(y)Phi(x) = 0
         double worst = 0.0;
         for (int pair = 0; pair < 5; ++pair) {
           const CMatrix proj = random_projection(t.n, t.rng.uniform_index(1, std::max<Index>(1, t.n - 1)), t.rng);
           const CMatrix x = ginibre(t.n, t.rng) * (eye(t.n) - proj);
           const CMatrix y = proj * ginibre(t.n, t.rng);
           const CMatrix fx = f.apply(x), fy = f.apply(y);
           const double scale = std::max(fx.norm() * fy.norm(), 1e-300);
           const double xy = (fx * fy).norm() / scale;
           const double yx = (fy * fx).norm() / scale;
           const int this_side = xy <= yx ? 1 : 2;
           worst = std::max(worst, std::min(xy, yx));
           if (std::min(xy, yx) > t.tol(1e-8) || (side != 0 && side != this_side)) {
             Outcome o = holds(false, std::min(xy, yx));
             o.witness["side_changed"] = side != 0 && side != this_side;
             with(o, "x", x);
             with(o, "y", y);
             return with_map(o, f);
           }
           side = this_side;
         }
         return bounded(worst, t.tol(1e-8));
       },
       2},
      {s, "corner-images", "Phi(eSf) = pSq",
       [](Trial& t) {
         const MatrixMap f = unital_isometry(t);
         const Index k = t.rng.uniform_index(1, t.n);
         const CMatrix u1 = haar_unitary(t.n, t.rng);
         const CMatrix u2 = haar_unitary(t.n, t.rng);
         const CMatrix w = u1.leftCols(k) * u2.leftCols(k).adjoint();  // partial isometry
         const CMatrix e = w * w.adjoint();
         const CMatrix g = w.adjoint() * w;
         const double tol = t.config.tolerance("rank-tol", 1e-9);
         const Supports sw = supports(f.apply(w), tol);
         const CMatrix& p = sw.left.matrix();
         const CMatrix& q = sw.right.matrix();
         const Index m = t.n * t.n;
         CMatrix images(m, m);
         double res = 0.0;
         for (Index j = 0; j < t.n; ++j)
           for (Index i = 0; i < t.n; ++i) {
             const CMatrix y = f.apply(CMatrix(e * matrix_unit(t.n, i, j) * g));
             res = std::max(res, (y - p * y * q).norm() / std::max(1.0, y.norm()));
             images.col(i + j * t.n) = vec(y);
           }
         Outcome o = bounded(res, t.tol(1e-8));
         const Index dim = numerical_rank(images, tol);
         if (dim != sw.left.rank() * sw.right.rank() || dim != k * k)
           o.ok = false;
         o.witness["span_dimension"] = dim;
         with(o, "w", w);
         return with_map(o, f);
       },
       1, 6},
      {s, "forms-are-rank-isometries", "Phi(x) = aJ(x)b => ||Phi(x)||_S = ||x||_S",
       [](Trial& t) {
         const MatrixMap f = from_form(random_form(t.n, t.rng, pick_jordan(t.rng), t.rng.coin(), 1e2, false));
         ProbeSet probes;
         probes.random_count = 16;
         probes.seed = t.rng.child(1).seed();
         const Verdict v = is_rank_isometry(f, probes);
         Outcome o = holds(v.pass);
         if (!v.pass) {
           o.witness["detail"] = v.detail;
           if (v.witness)
             with(o, "probe", *v.witness);
         }
         return with_map(o, f);
       }},
  };
}

// -- decomposition-roundtrip ----------------------------------------------

ProbeSet trial_probes(Trial& t, Index count = 16)
{
  ProbeSet probes;
  probes.random_count = count;
  probes.seed = t.rng.child(1).seed();
  return probes;
}

std::vector<Property> decomposition_roundtrip()
{
  const std::string s = "decomposition-roundtrip";
  return {
      {s, "roundtrip", "Phi(x) = aJ(x)b",
       [](Trial& t) {
         const JordanKind jordan = t.index % 2 == 0 ? JordanKind::identity : JordanKind::transpose;
         const bool conj = (t.index / 2) % 2 == 1;
         const MapForm form = random_form(t.n, t.rng, jordan, conj, 1e3, false);
         const MatrixMap f = from_form(form);
         const DecompositionResult r = decompose(f, DecomposeMode::rank_isometry, trial_probes(t));
         const Classification expected =
             jordan == JordanKind::identity ? Classification::isomorphism : Classification::anti_isomorphism;
         Outcome o = bounded(r.residual, t.tol(1e-8));
         if (r.classification != expected || !r.form || r.form->conjugated != conj || r.form->jordan != jordan)
           o.ok = false;
         o.witness["result"] = io::to_json(r);
         o.witness["form"] = io::to_json(form);
         return o;
       },
       2},
      {s, "perturbed-rejection", "Phi(x) = aJ(x)b fails under perturbation",
       [](Trial& t) {
         const MapForm form = random_form(t.n, t.rng, pick_jordan(t.rng), t.rng.coin(), 1e3, false);
         const MatrixMap f = perturb(from_form(form), t.tol(1e-2), t.rng);
         const ProbeSet probes = trial_probes(t);
         const DecompositionResult r = decompose(f, DecomposeMode::rank_isometry, probes);
         const std::optional<CMatrix> probe = reject_probe(f, probes);
         Outcome o = holds(r.classification == Classification::not_an_isometry && r.witness && probe);
         o.witness["classification"] = to_string(r.classification);
         return with_map(o, f);
       },
       2},
      {s, "classification-exclusivity", "not (iso and anti)",
       [](Trial& t) {
         const JordanKind jordan = pick_jordan(t.rng);
         const MatrixMap f = from_form(random_form(t.n, t.rng, jordan, false, 1e2, true));
         const MultiplicativityReport m = is_multiplicative(f, trial_probes(t));
         const bool both = m.iso_residual <= kMultiplicativeTol && m.anti_residual <= kMultiplicativeTol;
         const Multiplicativity expected = jordan == JordanKind::identity ? Multiplicativity::iso : Multiplicativity::anti;
         Outcome o = holds(!both && m.classification == expected,
                           std::min(m.iso_residual, m.anti_residual));
         return with_map(o, f);
       },
       2},
  };
}

// -- hk-theorem -----------------------------------------------------------

std::vector<Property> hk_theorem()
{
  const std::string s = "hk-theorem";
  return {
      {s, "det-mode-unital-form", "Phi(x) = aJ(x)a^-1",
       [](Trial& t) {
         const JordanKind jordan = t.index % 2 == 0 ? JordanKind::identity : JordanKind::transpose;
         const MatrixMap f = from_form(random_form(t.n, t.rng, jordan, false, 1e2, true));
         const DecompositionResult r = decompose(f, DecomposeMode::det_preserving, trial_probes(t));
         const Classification expected =
             jordan == JordanKind::identity ? Classification::isomorphism : Classification::anti_isomorphism;
         if (r.classification != expected || !r.form) {
           Outcome o = holds(false);
           o.witness["result"] = io::to_json(r);
           return with_map(o, f);
         }
         const CMatrix ab = r.form->a * r.form->b;
         const Complex tau = ab.trace() / static_cast<double>(t.n);
         Outcome o = bounded((ab - tau * eye(t.n)).norm() / std::abs(tau), t.tol(1e-8));
         o.ok = o.ok && r.residual <= kReconstructionTol && !r.form->conjugated;
         o.witness["result"] = io::to_json(r);
         return with_map(o, f);
       },
       2},
      {s, "polar-chain-identity", "det(x - lambda u) = det(|x| - lambda 1)",
       [](Trial& t) {
         const CMatrix x = ginibre(t.n, t.rng);
         const auto pr = polar(x, true);
         double worst = 0.0;
         for (int k = 0; k < 20; ++k) {
           const Complex lambda = 1.5 * t.rng.complex_normal();
           const double lhs = fk_det(CMatrix(x - lambda * pr.v));
           const double rhs = fk_det(CMatrix(pr.absx - lambda * eye(t.n)));
           worst = std::max(worst, relative(lhs, rhs));
         }
         Outcome o = bounded(worst, t.tol(1e-8));
         return with(o, "x", x);
       }},
      {s, "brown-preservation", "mu_Phi(x) = mu_x",
       [](Trial& t) {
         const MatrixMap f = from_form(random_form(t.n, t.rng, pick_jordan(t.rng), false, 1e2, true));
         double worst = 0.0;
         for (int k = 0; k < 20; ++k) {
           const CMatrix x = scaled_ginibre(t.n, t.rng);
           const double d = matching_distance(brown_measure(f.apply(x)), brown_measure(x));
           worst = std::max(worst, d);
           if (!(d <= t.tol(1e-6))) {
             Outcome o = bounded(d, t.tol(1e-6));
             with(o, "x", x);
             return with_map(o, f);
           }
         }
         return bounded(worst, t.tol(1e-6));
       }},
      {s, "det-negative-control", "not det-preserving => not aJ(x)a^-1",
       [](Trial& t) {
         const MatrixMap base = from_form(random_form(t.n, t.rng, pick_jordan(t.rng), false, 1e2, true));
         const MatrixMap f = perturb(base, 1e-2, t.rng);
         const DecompositionResult r = decompose(f, DecomposeMode::det_preserving, trial_probes(t));
         Outcome o = holds(r.classification == Classification::not_an_isometry ||
                           r.classification == Classification::not_bijective);
         o.witness["classification"] = to_string(r.classification);
         return with_map(o, f);
       },
       2},
  };
}

// -- example53 ------------------------------------------------------------

std::vector<Property> example53()
{
  const std::string s = "example53";
  return {
      {s, "fk-det-curve", "Delta(x - lambda) = e^-1 lambda^lambda (1 - lambda)^(1 - lambda)",
       [](Trial& t) {
         const CMatrix x = example53_discretization(t.n);
         double worst = 0.0;
         for (const double lambda : {0.0, 0.25, 0.5, 0.75}) {
           const double target = std::exp(-1.0) * (lambda > 0.0 ? std::pow(lambda, lambda) : 1.0) *
                                 std::pow(1.0 - lambda, 1.0 - lambda);
           worst = std::max(worst, std::abs(fk_det(CMatrix(x - lambda * eye(t.n))) - target));
         }
         Outcome o = bounded(worst, t.tol(1e-2));
         // Off the support: mean of log(2 - t) over [0, 1].
         const double off = std::abs(fk_logdet(CMatrix(x - 2.0 * eye(t.n))) - (2.0 * std::log(2.0) - 1.0));
         o.witness["off_support_error"] = off;
         if (off > 1e-3)
           o.ok = false;
         return o;
       },
       1, 0, 1},
  };
}

const std::vector<Property>& all_properties()
{
  static const std::vector<Property> all = [] {
    std::vector<Property> out;
    for (auto part : {rank_axioms(), regring_identities(), fk_axioms(), brown_identities(), hs_projections(),
                      isometry_lemmas(), decomposition_roundtrip(), hk_theorem(), example53()})
      for (auto& p : part)
        out.push_back(std::move(p));
    return out;
  }();
  return all;
}

std::uint64_t name_hash(const std::string& name)
{
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : name)
    h = (h ^ c) * 1099511628211ULL;
  return h;
}

}  // namespace

const std::vector<std::string>& suite_names()
{
  static const std::vector<std::string> names = {
      "rank-axioms",     "regring-identities",      "fk-axioms",   "brown-identities", "hs-projections",
      "isometry-lemmas", "decomposition-roundtrip", "hk-theorem", "example53"};
  return names;
}

std::vector<Index> default_n_values(const std::string& suite)
{
  if (suite == "fk-axioms" || suite == "hs-projections")
    return {2, 4, 8, 16};
  if (suite == "isometry-lemmas")
    return {2, 4, 6};
  if (suite == "decomposition-roundtrip")
    return {2, 3, 4, 6, 8};
  if (suite == "hk-theorem")
    return {2, 3, 4, 5};
  if (suite == "example53")
    return {512};
  return {2, 4, 8};
}

std::vector<PropertyInfo> registry()
{
  std::vector<PropertyInfo> out;
  for (const Property& p : all_properties())
    out.push_back({p.suite, p.name, p.anchor});
  return out;
}

Index Report::failures() const
{
  Index total = 0;
  for (const auto& p : properties)
    total += p.failures;
  return total;
}

io::json Report::to_json(bool include_timing) const
{
  io::json props = io::json::array();
  for (const auto& p : properties)
    props.push_back({{"name", p.name},
                     {"anchor", p.anchor},
                     {"trials", p.trials},
                     {"failures", p.failures},
                     {"worst_residual", p.worst_residual},
                     {"witnesses", p.witnesses}});
  io::json j = {{"suite", suite}, {"config", fkrank::to_json(config)}, {"properties", props}, {"failures", failures()}};
  if (include_timing)
    j["timing"] = {{"wall_clock_seconds", wall_clock}};
  return j;
}

std::string Report::to_text() const
{
  std::ostringstream out;
  out << "suite " << suite << " (seed " << config.seed << ")\n";
  for (const auto& p : properties) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-4s %-34s trials %5lld  failures %4lld  worst %.6g", p.failures == 0 ? "ok" : "FAIL",
                  p.name.c_str(), static_cast<long long>(p.trials), static_cast<long long>(p.failures),
                  p.worst_residual);
    out << buf << "  [" << p.anchor << "]\n";
  }
  for (const auto& e : config.env_overrides)
    out << "env override: " << e << '\n';
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", wall_clock);
  out << failures() << " failure(s), " << buf << " s\n";
  return out.str();
}

Report run_suite(const SuiteConfig& config)
{
  const auto start = std::chrono::steady_clock::now();
  if (std::find(suite_names().begin(), suite_names().end(), config.suite) == suite_names().end())
    throw UsageError("unknown suite \"" + config.suite + "\"");

  std::vector<const Property*> selected;
  for (const Property& p : all_properties())
    if (p.suite == config.suite &&
        (config.properties.empty() ||
         std::find(config.properties.begin(), config.properties.end(), p.name) != config.properties.end()))
      selected.push_back(&p);
  for (const std::string& name : config.properties)
    if (std::none_of(selected.begin(), selected.end(), [&](const Property* p) { return p->name == name; }))
      throw UsageError("suite " + config.suite + " has no property \"" + name + "\"");

  Report report;
  report.suite = config.suite;
  report.config = config;
  if (report.config.n_values.empty())
    report.config.n_values = default_n_values(config.suite);

  const Stream master(config.seed);
  for (const Property* prop : selected) {
    PropertyRecord rec;
    rec.name = prop->name;
    rec.anchor = prop->anchor;
    const Stream prop_stream = master.child(name_hash(prop->name));
    for (const Index n : report.config.n_values) {
      if (n < prop->min_n || (prop->max_n > 0 && n > prop->max_n))
        continue;
      const Index trials = prop->trial_cap > 0 ? std::min(prop->trial_cap, config.trials) : config.trials;
      for (Index k = 0; k < trials; ++k) {
        Trial trial{config, prop->name, n, k, prop_stream.child(static_cast<std::uint64_t>(n)).child(static_cast<std::uint64_t>(k))};
        const std::uint64_t trial_seed = trial.rng.seed();
        Outcome o;
        try {
          o = prop->body(trial);
        } catch (const Error& e) {
          o.ok = false;
          o.residual = std::numeric_limits<double>::infinity();
          o.witness = {{"error", e.what()}};
        }
        ++rec.trials;
        if (std::isfinite(o.residual))
          rec.worst_residual = std::max(rec.worst_residual, o.residual);
        if (!o.ok) {
          ++rec.failures;
          if (rec.witnesses.size() < kMaxWitnesses) {
            o.witness["n"] = n;
            o.witness["trial"] = k;
            o.witness["trial_seed"] = trial_seed;
            rec.witnesses.push_back(std::move(o.witness));
          }
        }
      }
    }
    report.properties.push_back(std::move(rec));
  }
  report.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace fkrank
