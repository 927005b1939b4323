#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "fkrank/matcore.hpp"

namespace fkrank {

/// Closed algebra of planar regions: disks, half-planes, points with a
/// tolerance, and their complements, unions and intersections.
class RegionPredicate {
 public:
  struct Disk {
    Complex center;
    double radius;
  };
  /// { z : Re(z conj(normal)) >= offset }
  struct HalfPlane {
    Complex normal;
    double offset;
  };
  struct Singleton {
    Complex point;
    double tolerance;
  };
  struct Complement {
    std::shared_ptr<const RegionPredicate> child;
  };
  struct Union {
    std::vector<RegionPredicate> children;
  };
  struct Intersection {
    std::vector<RegionPredicate> children;
  };
  using Variant = std::variant<Disk, HalfPlane, Singleton, Complement, Union, Intersection>;

  static RegionPredicate disk(Complex center, double radius);
  static RegionPredicate halfplane(Complex normal, double offset);
  static RegionPredicate singleton(Complex point, double tolerance);
  static RegionPredicate complement(RegionPredicate child);
  static RegionPredicate union_of(std::vector<RegionPredicate> children);
  static RegionPredicate intersection_of(std::vector<RegionPredicate> children);

  bool contains(Complex z) const;
  bool operator()(Complex z) const { return contains(z); }

  /// Lower bound on the distance from z to the boundary. Exact for the
  /// primitive shapes; the minimum over children for composites.
  double boundary_distance(Complex z) const;

  const Variant& variant() const noexcept { return v_; }

 private:
  explicit RegionPredicate(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

}  // namespace fkrank
