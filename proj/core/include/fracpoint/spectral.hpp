#pragma once

// Dirichlet sine eigenbasis of the Laplacian on the unit square, grid/coefficient
// transforms, fractional powers and spectral Sobolev norms.
//
// Conventions:
//   phi_mn(x, y) = 2 sin(m pi x) sin(n pi y),  lambda_mn = pi^2 (m^2 + n^2)
//   SpectralField::coeffs(m-1, n-1) holds the coefficient of phi_mn
//   GridFunction::values(i, j) holds the value at ((i + 1/2)/M, (j + 1/2)/M)

#include <Eigen/Dense>

#include <functional>
#include <utility>

namespace fracpoint {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// True iff 0 < x < 1 and 0 < y < 1.
bool is_interior(Point p) noexcept;

/// Throws DomainError unless `p` is strictly inside the unit square.
void require_interior(Point p, const char* what);

struct SpectralIndex {
  int m = 1;
  int n = 1;
};

/// Truncated eigenbasis {phi_mn : 1 <= m, n <= K} together with the fractional
/// exponent s in (1/2, 1) and the dual exponent theta in (1 - s, s).
class EigenBasis {
public:
  EigenBasis(int modes, double s, double theta = 0.5);

  int modes() const noexcept { return modes_; }
  int size() const noexcept { return modes_ * modes_; }
  double s() const noexcept { return s_; }
  double theta() const noexcept { return theta_; }

  /// lambda_mn for 1 <= m, n <= K, stored at (m-1, n-1).
  const Eigen::ArrayXXd& eigenvalues() const noexcept { return eigenvalues_; }
  /// lambda_mn^s, the diagonal of the discrete fractional operator.
  const Eigen::ArrayXXd& fractional_symbol() const noexcept { return symbol_; }

  /// Smallest admissible grid for this basis (M >= K + 1).
  int min_grid() const noexcept { return modes_ + 1; }
  /// Default grid M = 4K: cubic products of K-mode fields are integrated exactly.
  int default_grid() const noexcept { return 4 * modes_; }

private:
  int modes_;
  double s_;
  double theta_;
  Eigen::ArrayXXd eigenvalues_;
  Eigen::ArrayXXd symbol_;
};

/// Function in span{phi_mn} stored by its K x K eigenbasis coefficients.
struct SpectralField {
  Eigen::MatrixXd coeffs;

  SpectralField() = default;
  explicit SpectralField(Eigen::MatrixXd c) : coeffs(std::move(c)) {}

  static SpectralField zero(int modes) { return SpectralField(Eigen::MatrixXd::Zero(modes, modes)); }
  static SpectralField unit(int modes, SpectralIndex idx);

  int modes() const noexcept { return static_cast<int>(coeffs.rows()); }
  double& operator()(SpectralIndex idx) { return coeffs(idx.m - 1, idx.n - 1); }
  double operator()(SpectralIndex idx) const { return coeffs(idx.m - 1, idx.n - 1); }

  /// Value at an interior point by direct mode summation.
  double value_at(Point p) const;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double a);
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double a, SpectralField b);

/// Values on the M x M grid of cell midpoints.
struct GridFunction {
  Eigen::MatrixXd values;

  GridFunction() = default;
  explicit GridFunction(Eigen::MatrixXd v) : values(std::move(v)) {}

  static GridFunction zero(int cells) { return GridFunction(Eigen::MatrixXd::Zero(cells, cells)); }
  static GridFunction constant(int cells, double value) {
    return GridFunction(Eigen::MatrixXd::Constant(cells, cells, value));
  }
  static GridFunction sample(int cells, const std::function<double(Point)>& fn);

  int cells() const noexcept { return static_cast<int>(values.rows()); }
  static Point node(int cells, int i, int j) noexcept {
    return {(i + 0.5) / cells, (j + 0.5) / cells};
  }

  double max_abs() const { return values.size() == 0 ? 0.0 : values.cwiseAbs().maxCoeff(); }
  double min() const { return values.minCoeff(); }

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(double a);
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double a, GridFunction b);

/// Sampled 1-D sine factors S(i, m-1) = sqrt(2) sin(m pi (i + 1/2) / M), so that
/// phi_mn(x_ij) = S(i, m-1) S(j, n-1).
class SineTable {
public:
  SineTable(int modes, int cells);

  int modes() const noexcept { return static_cast<int>(table_.cols()); }
  int cells() const noexcept { return static_cast<int>(table_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return table_; }

  GridFunction synthesize(const SpectralField& w) const;
  /// Midpoint-rule projection onto the retained modes.
  SpectralField analyze(const GridFunction& g) const;

private:
  Eigen::MatrixXd table_;
};

double eigenvalue(SpectralIndex idx);
double eval_basis(SpectralIndex idx, Point p);

GridFunction synthesize(const SpectralField& w, int cells);
SpectralField analyze(const GridFunction& g, const EigenBasis& basis);

/// Multiplies each coefficient by lambda_mn^r.
SpectralField frac_power_apply(const SpectralField& w, double r);
/// (sum lambda_mn^r w_mn^2)^{1/2}; negative r gives truncated dual norms.
double hr_norm(const SpectralField& w, double r);

/// Midpoint quadrature of the integral of f g over the unit square.
double l2_inner(const GridFunction& f, const GridFunction& g);
double l2_norm(const GridFunction& f);

}  // namespace fracpoint
