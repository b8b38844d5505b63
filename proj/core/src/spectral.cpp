#include "fracpoint/spectral.hpp"

#include "fracpoint/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace fracpoint {

namespace {

constexpr double kPi = std::numbers::pi;

void require_same_grid(const GridFunction& f, const GridFunction& g) {
  if (f.values.rows() != g.values.rows() || f.values.cols() != g.values.cols()) {
    throw ConfigurationError("grid functions live on different grids (" +
                             std::to_string(f.cells()) + " vs " + std::to_string(g.cells()) + ")");
  }
}

void require_same_modes(const SpectralField& a, const SpectralField& b) {
  if (a.coeffs.rows() != b.coeffs.rows() || a.coeffs.cols() != b.coeffs.cols()) {
    throw ConfigurationError("spectral fields have different mode counts");
  }
}

Eigen::RowVectorXd sine_row(int modes, double t) {
  Eigen::RowVectorXd row(modes);
  for (int m = 0; m < modes; ++m) row(m) = std::sin((m + 1) * kPi * t);
  return row;
}

}  // namespace

bool is_interior(Point p) noexcept {
  return p.x > 0.0 && p.x < 1.0 && p.y > 0.0 && p.y < 1.0;
}

void require_interior(Point p, const char* what) {
  if (!is_interior(p)) {
    throw DomainError(std::string(what) + " (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                      ") is not strictly inside the unit square");
  }
}

EigenBasis::EigenBasis(int modes, double s, double theta) : modes_(modes), s_(s), theta_(theta) {
  if (modes < 1) throw ConfigurationError("basis needs at least one mode per direction");
  if (!(s > 0.5 && s < 1.0)) throw ConfigurationError("fractional exponent s must lie in (1/2, 1)");
  if (!(theta > 1.0 - s && theta < s)) {
    throw ConfigurationError("dual exponent theta must lie in (1 - s, s)");
  }
  eigenvalues_.resize(modes, modes);
  for (int m = 1; m <= modes; ++m)
    for (int n = 1; n <= modes; ++n) eigenvalues_(m - 1, n - 1) = eigenvalue({m, n});
  symbol_ = eigenvalues_.pow(s);
}

SpectralField SpectralField::unit(int modes, SpectralIndex idx) {
  if (idx.m < 1 || idx.n < 1 || idx.m > modes || idx.n > modes) {
    throw ConfigurationError("spectral index outside the truncated basis");
  }
  SpectralField w = zero(modes);
  w(idx) = 1.0;
  return w;
}

double SpectralField::value_at(Point p) const {
  require_interior(p, "evaluation point");
  const int k = modes();
  return 2.0 * sine_row(k, p.x).dot(coeffs * sine_row(k, p.y).transpose());
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same_modes(*this, o);
  coeffs += o.coeffs;
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same_modes(*this, o);
  coeffs -= o.coeffs;
  return *this;
}

SpectralField& SpectralField::operator*=(double a) {
  coeffs *= a;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double a, SpectralField b) { return b *= a; }

GridFunction GridFunction::sample(int cells, const std::function<double(Point)>& fn) {
  GridFunction g = zero(cells);
  for (int i = 0; i < cells; ++i)
    for (int j = 0; j < cells; ++j) g.values(i, j) = fn(node(cells, i, j));
  return g;
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  require_same_grid(*this, o);
  values += o.values;
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  require_same_grid(*this, o);
  values -= o.values;
  return *this;
}

GridFunction& GridFunction::operator*=(double a) {
  values *= a;
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double a, GridFunction b) { return b *= a; }

SineTable::SineTable(int modes, int cells) {
  if (modes < 1) throw ConfigurationError("sine table needs at least one mode");
  if (cells < modes + 1) {
    throw ConfigurationError("grid with " + std::to_string(cells) + " cells cannot resolve " +
                             std::to_string(modes) + " modes (need M >= K + 1)");
  }
  table_.resize(cells, modes);
  const double root2 = std::numbers::sqrt2;
  for (int i = 0; i < cells; ++i)
    for (int m = 0; m < modes; ++m)
      table_(i, m) = root2 * std::sin((m + 1) * kPi * (i + 0.5) / cells);
}

GridFunction SineTable::synthesize(const SpectralField& w) const {
  if (w.modes() != modes()) throw ConfigurationError("field and sine table disagree on mode count");
  return GridFunction(table_ * w.coeffs * table_.transpose());
}

SpectralField SineTable::analyze(const GridFunction& g) const {
  if (g.cells() != cells()) throw ConfigurationError("grid function and sine table disagree on grid size");
  const double area = 1.0 / (static_cast<double>(cells()) * cells());
  return SpectralField(area * (table_.transpose() * g.values * table_));
}

double eigenvalue(SpectralIndex idx) {
  if (idx.m < 1 || idx.n < 1) throw ConfigurationError("spectral indices start at 1");
  return kPi * kPi * (static_cast<double>(idx.m) * idx.m + static_cast<double>(idx.n) * idx.n);
}

double eval_basis(SpectralIndex idx, Point p) {
  if (idx.m < 1 || idx.n < 1) throw ConfigurationError("spectral indices start at 1");
  require_interior(p, "basis evaluation point");
  return 2.0 * std::sin(idx.m * kPi * p.x) * std::sin(idx.n * kPi * p.y);
}

GridFunction synthesize(const SpectralField& w, int cells) {
  return SineTable(w.modes(), cells).synthesize(w);
}

SpectralField analyze(const GridFunction& g, const EigenBasis& basis) {
  return SineTable(basis.modes(), g.cells()).analyze(g);
}

SpectralField frac_power_apply(const SpectralField& w, double r) {
  const int k = w.modes();
  SpectralField out = w;
  for (int m = 1; m <= k; ++m)
    for (int n = 1; n <= k; ++n) out({m, n}) *= std::pow(eigenvalue({m, n}), r);
  return out;
}

double hr_norm(const SpectralField& w, double r) {
  const int k = w.modes();
  double sum = 0.0;
  for (int m = 1; m <= k; ++m)
    for (int n = 1; n <= k; ++n) {
      const double c = w({m, n});
      sum += std::pow(eigenvalue({m, n}), r) * c * c;
    }
  return std::sqrt(sum);
}

double l2_inner(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f, g);
  const double area = 1.0 / (static_cast<double>(f.cells()) * f.cells());
  return area * f.values.cwiseProduct(g.values).sum();
}

double l2_norm(const GridFunction& f) { return std::sqrt(l2_inner(f, f)); }

}  // namespace fracpoint
