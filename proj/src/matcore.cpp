#include "fkrank/matcore.hpp"

namespace fkrank {

double unitarity_defect(const CMatrix& u)
{
  return (u.adjoint() * u - CMatrix::Identity(u.cols(), u.cols())).norm();
}

double condition_number(const CMatrix& x)
{
  const RVector s = singular_values(x);
  const double smallest = s(s.size() - 1);
  if (smallest == 0.0)
    return std::numeric_limits<double>::infinity();
  return s(0) / smallest;
}

CMatrix hermitian_part(const CMatrix& x) { return (x + x.adjoint()) * 0.5; }

double distance_to_spectrum(const CVector& spectrum, Complex z)
{
  double best = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < spectrum.size(); ++i)
    best = std::min(best, std::abs(spectrum(i) - z));
  return best;
}

}  // namespace fkrank
