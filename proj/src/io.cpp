#include "fkrank/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace fkrank::io {

namespace {

double finite_number(const json& j, const char* what)
{
  if (!j.is_number())
    throw UsageError(std::string(what) + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v))
    throw UsageError(std::string(what) + ": non-finite value");
  return v;
}

const json& field(const json& j, const char* key)
{
  if (!j.is_object() || !j.contains(key))
    throw UsageError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

Index positive_order(const json& j)
{
  const json& n = field(j, "n");
  if (!n.is_number_integer() || n.get<long long>() < 1)
    throw UsageError("\"n\" must be a positive integer");
  return static_cast<Index>(n.get<long long>());
}

json entries_row_major(const CMatrix& x)
{
  json data = json::array();
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j)
      data.push_back(to_json_complex(x(i, j)));
  return data;
}

CMatrix entries_from_row_major(const json& data, Index rows, Index cols)
{
  if (!data.is_array() || static_cast<Index>(data.size()) != rows * cols)
    throw UsageError("matrix data has the wrong number of entries");
  CMatrix x(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      x(i, j) = complex_from_json(data[static_cast<std::size_t>(i * cols + j)]);
  return x;
}

}  // namespace

json to_json_complex(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j)
{
  if (!j.is_array() || j.size() != 2)
    throw UsageError("complex number must be [re, im]");
  return {finite_number(j[0], "re"), finite_number(j[1], "im")};
}

json to_json(const CMatrix& x) { return {{"n", x.rows()}, {"data", entries_row_major(x)}}; }

CMatrix matrix_from_json(const json& j)
{
  const Index n = positive_order(j);
  return entries_from_row_major(field(j, "data"), n, n);
}

json to_json(const MatrixMap& f)
{
  return {{"n", f.order()}, {"kind", to_string(f.kind())}, {"op", entries_row_major(f.op())}};
}

MatrixMap map_from_json(const json& j)
{
  const Index n = positive_order(j);
  const json& kind = field(j, "kind");
  if (!kind.is_string() || (kind != "linear" && kind != "conjugate"))
    throw UsageError("map kind must be \"linear\" or \"conjugate\"");
  return MatrixMap(n, kind == "linear" ? MapKind::linear : MapKind::conjugate_linear,
                   entries_from_row_major(field(j, "op"), n * n, n * n));
}

json to_json(const MapForm& form)
{
  return {{"a", to_json(form.a)},
          {"b", to_json(form.b)},
          {"jordan", to_string(form.jordan)},
          {"conjugated", form.conjugated}};
}

MapForm form_from_json(const json& j)
{
  MapForm form;
  form.a = matrix_from_json(field(j, "a"));
  form.b = matrix_from_json(field(j, "b"));
  const json& jordan = field(j, "jordan");
  if (jordan == "identity")
    form.jordan = JordanKind::identity;
  else if (jordan == "transpose")
    form.jordan = JordanKind::transpose;
  else
    throw UsageError("jordan must be \"identity\" or \"transpose\"");
  const json& conj = field(j, "conjugated");
  if (!conj.is_boolean())
    throw UsageError("conjugated must be a boolean");
  form.conjugated = conj.get<bool>();
  return form;
}

json to_json(const RegionPredicate& region)
{
  return std::visit(
      [](const auto& r) -> json {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, RegionPredicate::Disk>) {
          return {{"kind", "disk"}, {"center", to_json_complex(r.center)}, {"radius", r.radius}};
        } else if constexpr (std::is_same_v<T, RegionPredicate::HalfPlane>) {
          return {{"kind", "halfplane"}, {"normal", to_json_complex(r.normal)}, {"offset", r.offset}};
        } else if constexpr (std::is_same_v<T, RegionPredicate::Singleton>) {
          return {{"kind", "singleton"}, {"point", to_json_complex(r.point)}, {"tolerance", r.tolerance}};
        } else if constexpr (std::is_same_v<T, RegionPredicate::Complement>) {
          return {{"kind", "complement"}, {"child", to_json(*r.child)}};
        } else {
          json children = json::array();
          for (const auto& c : r.children)
            children.push_back(to_json(c));
          const char* kind = std::is_same_v<T, RegionPredicate::Union> ? "union" : "intersection";
          return {{"kind", kind}, {"children", children}};
        }
      },
      region.variant());
}

RegionPredicate region_from_json(const json& j)
{
  const json& kind = field(j, "kind");
  if (kind == "disk")
    return RegionPredicate::disk(complex_from_json(field(j, "center")),
                                 finite_number(field(j, "radius"), "radius"));
  if (kind == "halfplane")
    return RegionPredicate::halfplane(complex_from_json(field(j, "normal")),
                                      finite_number(field(j, "offset"), "offset"));
  if (kind == "singleton")
    return RegionPredicate::singleton(complex_from_json(field(j, "point")),
                                      finite_number(field(j, "tolerance"), "tolerance"));
  if (kind == "complement")
    return RegionPredicate::complement(region_from_json(field(j, "child")));
  if (kind == "union" || kind == "intersection") {
    const json& children = field(j, "children");
    if (!children.is_array())
      throw UsageError("children must be an array");
    std::vector<RegionPredicate> parts;
    for (const auto& c : children)
      parts.push_back(region_from_json(c));
    return kind == "union" ? RegionPredicate::union_of(std::move(parts))
                           : RegionPredicate::intersection_of(std::move(parts));
  }
  throw UsageError("unknown region kind");
}

json to_json(const BrownMeasure& mu)
{
  json atoms = json::array();
  for (const Atom& a : mu.atoms())
    atoms.push_back({{"loc", to_json_complex(a.location)}, {"num", a.num}, {"den", a.den}});
  return {{"atoms", atoms}};
}

BrownMeasure measure_from_json(const json& j)
{
  const json& atoms = field(j, "atoms");
  if (!atoms.is_array())
    throw UsageError("atoms must be an array");
  std::vector<Atom> out;
  for (const auto& a : atoms) {
    const json& num = field(a, "num");
    const json& den = field(a, "den");
    if (!num.is_number_integer() || !den.is_number_integer())
      throw UsageError("atom weights must be integers");
    out.push_back({complex_from_json(field(a, "loc")), num.get<std::int64_t>(), den.get<std::int64_t>()});
  }
  return BrownMeasure(std::move(out));
}

json to_json(const DecompositionResult& r)
{
  json j = {{"classification", to_string(r.classification)},
            {"residual", r.residual},
            {"probe_seed", r.seed},
            {"detail", r.detail}};
  j["form"] = r.form ? to_json(*r.form) : json(nullptr);
  j["witness"] = r.witness ? to_json(*r.witness) : json(nullptr);
  if (r.witness_pair)
    j["witness_pair"] = to_json(*r.witness_pair);
  return j;
}

std::string format_number(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

void write_grid_csv(std::ostream& out, const GridMeasure& g)
{
  out << "re,im,mass\n";
  for (Index a = 0; a < g.grid.cells; ++a)
    for (Index b = 0; b < g.grid.cells; ++b) {
      const Complex c = g.grid.cell_center(a, b);
      out << format_number(c.real()) << ',' << format_number(c.imag()) << ',' << format_number(g.mass(a, b))
          << '\n';
    }
}

json read_json_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j)
{
  std::ofstream out(path);
  if (!out)
    throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out)
    throw IoError("write failed for " + path);
}

}  // namespace fkrank::io
