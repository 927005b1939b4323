#include "fkrank/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fkrank {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

RegionPredicate RegionPredicate::disk(Complex center, double radius)
{
  if (!(radius >= 0.0))
    throw UsageError("disk: radius must be nonnegative");
  return RegionPredicate(Disk{center, radius});
}

RegionPredicate RegionPredicate::halfplane(Complex normal, double offset)
{
  const double mag = std::abs(normal);
  if (!(mag > 0.0))
    throw UsageError("halfplane: normal must be nonzero");
  return RegionPredicate(HalfPlane{normal / mag, offset / mag});
}

RegionPredicate RegionPredicate::singleton(Complex point, double tolerance)
{
  if (!(tolerance >= 0.0))
    throw UsageError("singleton: tolerance must be nonnegative");
  return RegionPredicate(Singleton{point, tolerance});
}

RegionPredicate RegionPredicate::complement(RegionPredicate child)
{
  return RegionPredicate(Complement{std::make_shared<const RegionPredicate>(std::move(child))});
}

RegionPredicate RegionPredicate::union_of(std::vector<RegionPredicate> children)
{
  return RegionPredicate(Union{std::move(children)});
}

RegionPredicate RegionPredicate::intersection_of(std::vector<RegionPredicate> children)
{
  return RegionPredicate(Intersection{std::move(children)});
}

bool RegionPredicate::contains(Complex z) const
{
  return std::visit(
      overloaded{
          [&](const Disk& d) { return std::abs(z - d.center) <= d.radius; },
          [&](const HalfPlane& h) { return std::real(z * std::conj(h.normal)) >= h.offset; },
          [&](const Singleton& s) { return std::abs(z - s.point) <= s.tolerance; },
          [&](const Complement& c) { return !c.child->contains(z); },
          [&](const Union& u) {
            return std::any_of(u.children.begin(), u.children.end(),
                               [&](const RegionPredicate& r) { return r.contains(z); });
          },
          [&](const Intersection& u) {
            return std::all_of(u.children.begin(), u.children.end(),
                               [&](const RegionPredicate& r) { return r.contains(z); });
          },
      },
      v_);
}

double RegionPredicate::boundary_distance(Complex z) const
{
  const auto min_over = [&](const std::vector<RegionPredicate>& children) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : children)
      best = std::min(best, r.boundary_distance(z));
    return best;
  };
  return std::visit(
      overloaded{
          [&](const Disk& d) { return std::abs(std::abs(z - d.center) - d.radius); },
          [&](const HalfPlane& h) { return std::abs(std::real(z * std::conj(h.normal)) - h.offset); },
          [&](const Singleton& s) { return std::abs(std::abs(z - s.point) - s.tolerance); },
          [&](const Complement& c) { return c.child->boundary_distance(z); },
          [&](const Union& u) { return min_over(u.children); },
          [&](const Intersection& u) { return min_over(u.children); },
      },
      v_);
}

}  // namespace fkrank
