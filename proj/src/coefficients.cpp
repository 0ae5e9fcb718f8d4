#include "dissip/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace dissip {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t\r");
    const auto e = item.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : item.substr(b, e - b + 1));
  }
  return out;
}

double parse_number(const std::string& s, const std::string& path) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ConfigError, path + ": not a number: '" + s + "'");
  }
}

}  // namespace

CoefficientField::CoefficientField(Rect domain, Eigen::ArrayXXd lambda, Eigen::ArrayXXd mu)
    : domain_(domain), lambda_(std::move(lambda)), mu_(std::move(mu)) {
  require(domain_.width() > 0 && domain_.height() > 0, ErrorKind::InvalidArgument,
          "coefficient domain must have positive extent");
  require(lambda_.rows() >= 2 && lambda_.cols() >= 2, ErrorKind::InvalidArgument,
          "coefficient grid needs at least 2x2 nodes");
  require(lambda_.rows() == mu_.rows() && lambda_.cols() == mu_.cols(), ErrorKind::InvalidArgument,
          "lambda and mu arrays must share the grid shape");
  require(lambda_.allFinite() && mu_.allFinite(), ErrorKind::InvalidArgument,
          "coefficient values must be finite");
  lambda_eff_ = lambda_;
  mu_eff_ = mu_;
}

CoefficientField CoefficientField::constant(double lambda, double mu, Rect domain, int nodes) {
  return CoefficientField(domain, Eigen::ArrayXXd::Constant(nodes, nodes, lambda),
                          Eigen::ArrayXXd::Constant(nodes, nodes, mu));
}

CoefficientField CoefficientField::with_perturbation(Eigen::ArrayXXd eps, Eigen::ArrayXXd sigma) const {
  require(eps.rows() == n1() && eps.cols() == n2() && sigma.rows() == n1() && sigma.cols() == n2(),
          ErrorKind::InvalidArgument, "perturbation arrays must share the grid shape");
  require(eps.allFinite() && sigma.allFinite(), ErrorKind::InvalidArgument,
          "perturbation values must be finite");
  CoefficientField out = *this;
  out.lambda_eff_ = lambda_ + eps;
  out.mu_eff_ = mu_ + sigma;
  out.eps_ = std::move(eps);
  out.sigma_ = std::move(sigma);
  return out;
}

Eigen::ArrayXXd CoefficientField::lambda() const { return lambda_eff_; }
Eigen::ArrayXXd CoefficientField::mu() const { return mu_eff_; }

Eigen::Vector2d CoefficientField::node(int i, int j) const {
  return {domain_.x0 + domain_.width() * i / (n1() - 1), domain_.y0 + domain_.height() * j / (n2() - 1)};
}

bool CoefficientField::is_constant() const {
  return (lambda_eff_ == lambda_eff_(0, 0)).all() && (mu_eff_ == mu_eff_(0, 0)).all();
}

CoefficientField::Local CoefficientField::at(const Eigen::Vector2d& x) const {
  const double hx = domain_.width() / (n1() - 1);
  const double hy = domain_.height() / (n2() - 1);
  const double u = std::clamp((x(0) - domain_.x0) / hx, 0.0, double(n1() - 1));
  const double v = std::clamp((x(1) - domain_.y0) / hy, 0.0, double(n2() - 1));
  const int i = std::min(static_cast<int>(u), n1() - 2);
  const int j = std::min(static_cast<int>(v), n2() - 2);
  const double a = u - i, b = v - j;

  auto interp = [&](const Eigen::ArrayXXd& f, double& value, Eigen::Vector2d& grad) {
    const double f00 = f(i, j), f10 = f(i + 1, j), f01 = f(i, j + 1), f11 = f(i + 1, j + 1);
    value = (1 - a) * (1 - b) * f00 + a * (1 - b) * f10 + (1 - a) * b * f01 + a * b * f11;
    grad(0) = ((1 - b) * (f10 - f00) + b * (f11 - f01)) / hx;
    grad(1) = ((1 - a) * (f01 - f00) + a * (f11 - f10)) / hy;
  };
  Local out;
  interp(lambda_eff_, out.lambda, out.grad_lambda);
  interp(mu_eff_, out.mu, out.grad_mu);
  return out;
}

CoefficientField make_preset(const PresetSpec& spec) {
  require(spec.n1 >= 2 && spec.n2 >= 2, ErrorKind::InvalidArgument, "preset grid needs >= 2 nodes per side");
  const Rect& d = spec.domain;
  Eigen::ArrayXXd lambda = Eigen::ArrayXXd::Constant(spec.n1, spec.n2, spec.lambda);
  Eigen::ArrayXXd mu = Eigen::ArrayXXd::Constant(spec.n1, spec.n2, spec.mu);
  if (spec.name == "constant") {
  } else if (spec.name == "ramp") {
    for (int i = 0; i < spec.n1; ++i) lambda.row(i) += spec.amplitude * double(i) / (spec.n1 - 1);
  } else if (spec.name == "checkerboard") {
    require(spec.block >= 1, ErrorKind::InvalidArgument, "checkerboard block must be >= 1");
    for (int i = 0; i < spec.n1; ++i) {
      for (int j = 0; j < spec.n2; ++j) {
        const int parity = (i / spec.block + j / spec.block) % 2;
        mu(i, j) = spec.mu * (1.0 + (parity == 0 ? spec.amplitude : -spec.amplitude));
      }
    }
  } else if (spec.name == "radial") {
    const double cx = 0.5 * (d.x0 + d.x1), cy = 0.5 * (d.y0 + d.y1);
    const double w = 0.25 * std::min(d.width(), d.height());
    for (int i = 0; i < spec.n1; ++i) {
      for (int j = 0; j < spec.n2; ++j) {
        const double x = d.x0 + d.width() * i / (spec.n1 - 1) - cx;
        const double y = d.y0 + d.height() * j / (spec.n2 - 1) - cy;
        mu(i, j) = spec.mu * (1.0 + spec.amplitude * std::exp(-(x * x + y * y) / (w * w)));
      }
    }
  } else {
    throw Error(ErrorKind::ConfigError, "unknown coefficient preset '" + spec.name + "'");
  }
  return CoefficientField(d, std::move(lambda), std::move(mu));
}

CoefficientField load_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open grid file " + path);
  Rect domain;
  int n1 = 0, n2 = 0;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto cells = split_csv(line);
    if (cells.empty() || (cells.size() == 1 && cells[0].empty())) continue;
    if (cells[0] == "domain") {
      if (cells.size() != 5) throw Error(ErrorKind::ConfigError, path + ": domain needs 4 values");
      domain = {parse_number(cells[1], path), parse_number(cells[2], path), parse_number(cells[3], path),
                parse_number(cells[4], path)};
    } else if (cells[0] == "shape") {
      if (cells.size() != 3) throw Error(ErrorKind::ConfigError, path + ": shape needs 2 values");
      n1 = static_cast<int>(parse_number(cells[1], path));
      n2 = static_cast<int>(parse_number(cells[2], path));
    } else if (cells[0] == "columns") {
      columns.assign(cells.begin() + 1, cells.end());
    } else {
      std::vector<double> row;
      for (const auto& c : cells) row.push_back(parse_number(c, path));
      rows.push_back(std::move(row));
    }
  }
  if (columns.empty()) columns = {"lambda", "mu"};
  auto col = [&](const std::string& name) -> int {
    auto it = std::find(columns.begin(), columns.end(), name);
    return it == columns.end() ? -1 : static_cast<int>(it - columns.begin());
  };
  const int cl = col("lambda"), cm = col("mu"), ce = col("eps"), cs = col("sigma");
  if (cl < 0 || cm < 0) throw Error(ErrorKind::ConfigError, path + ": lambda and mu columns are required");
  if (n1 < 2 || n2 < 2) throw Error(ErrorKind::ConfigError, path + ": missing or invalid shape");
  if (static_cast<int>(rows.size()) != n1 * n2) {
    throw Error(ErrorKind::ConfigError, path + ": expected " + std::to_string(n1 * n2) + " node rows, found " +
                                            std::to_string(rows.size()));
  }
  Eigen::ArrayXXd lambda(n1, n2), mu(n1, n2), eps(n1, n2), sigma(n1, n2);
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      const auto& r = rows[i * n2 + j];
      if (r.size() != columns.size()) throw Error(ErrorKind::ConfigError, path + ": ragged node row");
      lambda(i, j) = r[cl];
      mu(i, j) = r[cm];
      eps(i, j) = ce >= 0 ? r[ce] : 0.0;
      sigma(i, j) = cs >= 0 ? r[cs] : 0.0;
    }
  }
  CoefficientField field(domain, std::move(lambda), std::move(mu));
  if (ce >= 0 || cs >= 0) return field.with_perturbation(std::move(eps), std::move(sigma));
  return field;
}

void save_grid_file(const CoefficientField& field, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::ConfigError, "cannot write grid file " + path);
  const Rect& d = field.domain();
  const bool perturbed = field.eps().has_value();
  out << std::setprecision(17);
  out << "domain," << d.x0 << ',' << d.x1 << ',' << d.y0 << ',' << d.y1 << '\n';
  out << "shape," << field.n1() << ',' << field.n2() << '\n';
  out << (perturbed ? "columns,lambda,mu,eps,sigma\n" : "columns,lambda,mu\n");
  for (int i = 0; i < field.n1(); ++i) {
    for (int j = 0; j < field.n2(); ++j) {
      out << field.lambda_base()(i, j) << ',' << field.mu_base()(i, j);
      if (perturbed) out << ',' << (*field.eps())(i, j) << ',' << (*field.sigma())(i, j);
      out << '\n';
    }
  }
}

EssBounds ess_bounds(const CoefficientField& field) {
  const Eigen::ArrayXXd lambda = field.lambda();
  const Eigen::ArrayXXd mu = field.mu();
  EssBounds b;
  b.inf_mu = mu.minCoeff();
  b.inf_lam2mu = (lambda + 2 * mu).minCoeff();
  if (!(b.inf_mu > 0.0) || !(b.inf_lam2mu > 0.0)) {
    throw Error(ErrorKind::EllipticityViolation,
                "ess inf mu = " + std::to_string(b.inf_mu) + ", ess inf (lambda + 2 mu) = " +
                    std::to_string(b.inf_lam2mu));
  }
  const Eigen::ArrayXXd denom = lambda + 3 * mu;
  require((denom > 0.0).all(), ErrorKind::EllipticityViolation, "lambda + 3 mu must be positive");
  b.sup_ratio = ((lambda + mu) / denom).square().maxCoeff();
  return b;
}

Eigen::ArrayXXd gamma_field(const CoefficientField& field) {
  ess_bounds(field);
  const Eigen::ArrayXXd lambda = field.lambda();
  const Eigen::ArrayXXd mu = field.mu();
  return mu * (lambda + mu) / (lambda + 3 * mu);
}

Eigen::ArrayXXd gamma_minus_mu(const CoefficientField& field) {
  ess_bounds(field);
  const Eigen::ArrayXXd lambda = field.lambda();
  const Eigen::ArrayXXd mu = field.mu();
  return -2 * mu.square() / (lambda + 3 * mu);
}

Eigen::ArrayXXd commutator_weight(const CoefficientField& field) {
  ess_bounds(field);
  const Eigen::ArrayXXd lambda = field.lambda();
  const Eigen::ArrayXXd mu = field.mu();
  return mu.square() / (lambda + 3 * mu);
}

Eigen::ArrayXXd cell_averages(const Eigen::ArrayXXd& nodes) {
  const Eigen::Index r = nodes.rows() - 1, c = nodes.cols() - 1;
  require(r >= 1 && c >= 1, ErrorKind::InvalidArgument, "cell averages need at least 2x2 nodes");
  return 0.25 * (nodes.topLeftCorner(r, c) + nodes.bottomLeftCorner(r, c) + nodes.topRightCorner(r, c) +
                 nodes.bottomRightCorner(r, c));
}

double bmo_cells(const Eigen::ArrayXXd& cells) {
  double best = 0.0;
  const Eigen::Index n = std::min(cells.rows(), cells.cols());
  for (Eigen::Index side = 2; side <= n; side *= 2) {
    for (Eigen::Index i = 0; i + side <= cells.rows(); i += side) {
      for (Eigen::Index j = 0; j + side <= cells.cols(); j += side) {
        const auto block = cells.block(i, j, side, side);
        if (block.maxCoeff() == block.minCoeff()) continue;
        const double mean = block.mean();
        best = std::max(best, (block - mean).abs().mean());
      }
    }
  }
  return best;
}

double bmo_seminorm(const Eigen::ArrayXXd& nodes) {
  require(nodes.rows() >= 8 && nodes.cols() >= 8, ErrorKind::InvalidArgument,
          "BMO estimate needs at least 8x8 nodes");
  return bmo_cells(cell_averages(nodes));
}

GeneralSystem::GeneralSystem(int dim, int m) : dim_(dim), m_(m) {
  require(dim >= 1 && m >= 1, ErrorKind::InvalidArgument, "system dimensions must be positive");
  blocks_.assign(dim * dim, Eigen::MatrixXcd::Zero(m, m));
}

Eigen::MatrixXcd GeneralSystem::symbol(const Eigen::VectorXd& xi) const {
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(m_, m_);
  for (int h = 0; h < dim_; ++h) {
    for (int k = 0; k < dim_; ++k) s += A(h, k) * (xi(h) * xi(k));
  }
  return s;
}

bool GeneralSystem::finite() const {
  return std::all_of(blocks_.begin(), blocks_.end(), [](const Eigen::MatrixXcd& b) { return b.allFinite(); });
}

GeneralSystem lame_system(double lambda, double mu, int dim) {
  GeneralSystem sys(dim, dim);
  for (int h = 0; h < dim; ++h) {
    for (int k = 0; k < dim; ++k) {
      auto& a = sys.A(h, k);
      for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
          double v = 0.0;
          if (i == h && j == k) v += lambda;
          if (i == j && h == k) v += mu;
          if (i == k && h == j) v += mu;
          a(i, j) = v;
        }
      }
    }
  }
  return sys;
}

}  // namespace dissip
