#include "eyetask/context_map.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace eyetask {

double pearson(const Vector& x, const Vector& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw DataError("pearson needs two equal-length vectors of size >= 2");
  const double n = double(x.size());
  const Vector xc = x.array() - x.mean();
  const Vector yc = y.array() - y.mean();
  const double sx = std::sqrt(xc.squaredNorm() / n);
  const double sy = std::sqrt(yc.squaredNorm() / n);
  if (sx <= 0 || sy <= 0) throw DataError("pearson on constant input");
  double r = xc.dot(yc) / (n * sx * sy);
  return std::clamp(r, -1.0, 1.0);
}

FusedDistanceMatrix build_fused_matrix(const Dataset& ds, CorrDistance corr) {
  const int n = static_cast<int>(ds.n());
  const int d = static_cast<int>(ds.dim());
  if (n < 2 || d < 2) throw DataError("fused matrix needs N >= 2 and d >= 2");

  FusedDistanceMatrix fm;
  fm.n_data = n;
  fm.n_vars = d;
  fm.dist = Matrix::Zero(n + d, n + d);

  // data-data: pairwise Euclidean distances of rows
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double dij = (ds.rows.row(i) - ds.rows.row(j)).norm();
      fm.dist(i, j) = fm.dist(j, i) = dij;
    }

  // var-var: correlation distance
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) {
      double rho = pearson(ds.rows.col(a), ds.rows.col(b));
      double dab = (corr == CorrDistance::Magnitude) ? 1.0 - std::abs(rho)
                                                     : (1.0 - rho) / 2.0;
      fm.dist(n + a, n + b) = fm.dist(n + b, n + a) = dab;
    }

  // data-var: min-max rescale rows per column, distance to the unit vector
  Matrix scaled(n, d);
  for (int j = 0; j < d; ++j) {
    double lo = ds.rows.col(j).minCoeff();
    double hi = ds.rows.col(j).maxCoeff();
    if (hi <= lo)
      throw DataError("degenerate feature (constant column): " +
                      ds.feature_names[j]);
    scaled.col(j) = (ds.rows.col(j).array() - lo) / (hi - lo);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) {
      Vector e = Vector::Zero(d);
      e(j) = 1.0;
      double dv = (scaled.row(i).transpose() - e).norm();
      fm.dist(i, n + j) = fm.dist(n + j, i) = dv;
    }

  // per-block max normalization
  auto block_max = [&](int r0, int r1, int c0, int c1) {
    return fm.dist.block(r0, c0, r1 - r0, c1 - c0).maxCoeff();
  };
  double s0 = block_max(0, n, 0, n);
  double s1 = block_max(n, n + d, n, n + d);
  double s2 = block_max(0, n, n, n + d);
  fm.block_scales[0] = s0;
  fm.block_scales[1] = s1;
  fm.block_scales[2] = s2;
  if (s0 > 0) fm.dist.block(0, 0, n, n) /= s0;
  if (s1 > 0) fm.dist.block(n, n, d, d) /= s1;
  if (s2 > 0) {
    fm.dist.block(0, n, n, d) /= s2;
    fm.dist.block(n, 0, d, n) /= s2;
  }
  return fm;
}

double stress1(const Matrix& coords, const Matrix& target) {
  const auto n = target.rows();
  double num = 0, den = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double dij = (coords.row(i) - coords.row(j)).norm();
      double diff = dij - target(i, j);
      num += diff * diff;
      den += target(i, j) * target(i, j);
    }
  if (den <= 0) return 0;
  return std::sqrt(num / den);
}

Projection2D smacof_embed(const FusedDistanceMatrix& m, std::uint64_t seed,
                          int max_iter, double eps) {
  if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (eps <= 0) throw ConfigError("eps must be positive");
  const auto n = m.dist.rows();

  Rng rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Matrix x(n, 2);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int k = 0; k < 2; ++k) x(i, k) = unif(rng);

  Projection2D proj;
  double prev = stress1(x, m.dist);
  for (int it = 0; it < max_iter; ++it) {
    // Guttman transform, uniform weights
    Matrix b = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double diag = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j) continue;
        double dij = (x.row(i) - x.row(j)).norm();
        double bij = (dij > 1e-300) ? -m.dist(i, j) / dij : 0.0;
        b(i, j) = bij;
        diag -= bij;
      }
      b(i, i) = diag;
    }
    x = (b * x) / double(n);

    double cur = stress1(x, m.dist);
    proj.stress_history.push_back(cur);
    proj.iterations = it + 1;
    bool converged = cur <= 1e-15 || (prev > 0 && (prev - cur) / prev < eps);
    prev = cur;
    if (converged) break;
  }

  proj.coords = std::move(x);
  proj.stress = prev;
  return proj;
}

std::vector<std::string> select_features(const Dataset& ds, int k) {
  const int d = static_cast<int>(ds.dim());
  if (k < 1 || k > d) throw ConfigError("k must lie in [1, d]");

  std::vector<double> mean_abs(d, 0.0);
  for (int a = 0; a < d; ++a) {
    double sum = 0;
    for (int b = 0; b < d; ++b) {
      if (a == b) continue;
      sum += std::abs(pearson(ds.rows.col(a), ds.rows.col(b)));
    }
    mean_abs[a] = sum / double(d - 1);
  }

  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return mean_abs[a] < mean_abs[b]; });

  std::vector<std::string> out;
  for (int i = 0; i < k; ++i) out.push_back(ds.feature_names[order[i]]);
  return out;
}

void emit_projection(const Projection2D& p, const std::string& path) {
  const auto n = p.coords.rows();
  if (n == 0) throw DataError("nothing to plot");
  if (static_cast<Eigen::Index>(p.points.size()) != n)
    throw DataError("projection point metadata does not match coordinates");

  const double w = 640, h = 640, margin = 48;
  double xmin = p.coords.col(0).minCoeff(), xmax = p.coords.col(0).maxCoeff();
  double ymin = p.coords.col(1).minCoeff(), ymax = p.coords.col(1).maxCoeff();
  double xr = std::max(xmax - xmin, 1e-12);
  double yr = std::max(ymax - ymin, 1e-12);
  auto px = [&](double x) { return margin + (x - xmin) / xr * (w - 2 * margin); };
  auto py = [&](double y) { return h - margin - (y - ymin) / yr * (h - 2 * margin); };

  std::ofstream svg(path);
  if (!svg) throw IoError("cannot write SVG: " + path);
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h
      << "\">\n";
  svg << std::fixed << std::setprecision(2);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (p.points[i].kind != PointKind::Data) continue;
    svg << "  <circle cx=\"" << px(p.coords(i, 0)) << "\" cy=\""
        << py(p.coords(i, 1)) << "\" r=\"2.5\" fill=\"green\" fill-opacity=\"0.6\"/>\n";
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (p.points[i].kind != PointKind::Variable) continue;
    double cx = px(p.coords(i, 0)), cy = py(p.coords(i, 1));
    svg << "  <circle cx=\"" << cx << "\" cy=\"" << cy
        << "\" r=\"5\" fill=\"blue\"/>\n";
    svg << "  <text x=\"" << cx + 7 << "\" y=\"" << cy + 4
        << "\" font-size=\"12\" font-family=\"sans-serif\">" << p.points[i].name
        << "</text>\n";
  }
  svg << "</svg>\n";
  if (!svg) throw IoError("failed writing SVG: " + path);

  std::filesystem::path csv_path(path);
  csv_path.replace_extension(".csv");
  std::ofstream csv(csv_path);
  if (!csv) throw IoError("cannot write coordinates CSV: " + csv_path.string());
  csv << "name,kind,x,y\n" << std::fixed << std::setprecision(6);
  for (Eigen::Index i = 0; i < n; ++i) {
    csv << p.points[i].name << ','
        << (p.points[i].kind == PointKind::Data ? "data" : "variable") << ','
        << p.coords(i, 0) << ',' << p.coords(i, 1) << '\n';
  }
}

}  // namespace eyetask
