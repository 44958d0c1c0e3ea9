#include "famdyn/region.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>

namespace famdyn {

static constexpr double kPi = 3.14159265358979323846;

static double parse_num(const std::string& s, const std::string& ctx) {
  const char* c = s.c_str();
  char* end = nullptr;
  double v = std::strtod(c, &end);
  while (end && *end == ' ') ++end;
  if (end == c || (end && *end != '\0') || !std::isfinite(v))
    throw Error(Errc::parse, "region: bad number '" + s + "' in " + ctx);
  return v;
}

Region Region::parse(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos)
    throw Error(Errc::parse, "region: expected 'kind:args', got '" + text + "'");
  std::string kind = text.substr(0, colon);
  std::vector<double> a;
  std::string rest = text.substr(colon + 1), item;
  for (std::size_t pos = 0;;) {
    auto comma = rest.find(',', pos);
    item = rest.substr(pos, comma == std::string::npos ? comma : comma - pos);
    a.push_back(parse_num(item, text));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }

  Region r;
  if (kind == "rect") {
    if (a.size() != 4) throw Error(Errc::parse, "region: rect takes x0,y0,x1,y1");
    r.kind = Kind::rect;
    r.x0 = a[0]; r.y0 = a[1]; r.x1 = a[2]; r.y1 = a[3];
    if (!(r.x0 < r.x1 && r.y0 < r.y1))
      throw Error(Errc::parse, "region: rect needs x0<x1 and y0<y1");
  } else if (kind == "disk") {
    if (a.size() != 3) throw Error(Errc::parse, "region: disk takes cx,cy,r");
    r.kind = Kind::disk;
    r.center = Complex(a[0], a[1]);
    r.r1 = a[2];
    if (!(r.r1 > 0)) throw Error(Errc::parse, "region: disk needs r>0");
  } else if (kind == "annulus") {
    if (a.size() != 4)
      throw Error(Errc::parse, "region: annulus takes cx,cy,r0,r1");
    r.kind = Kind::annulus;
    r.center = Complex(a[0], a[1]);
    r.r0 = a[2]; r.r1 = a[3];
    if (!(r.r0 >= 0 && r.r0 < r.r1))
      throw Error(Errc::parse, "region: annulus needs 0<=r0<r1");
  } else if (kind == "circle") {
    if (a.size() != 3) throw Error(Errc::parse, "region: circle takes cx,cy,r");
    r.kind = Kind::circle;
    r.center = Complex(a[0], a[1]);
    r.r1 = a[2];
    if (!(r.r1 > 0)) throw Error(Errc::parse, "region: circle needs r>0");
  } else {
    throw Error(Errc::parse, "region: unknown kind '" + kind + "'");
  }
  return r;
}

std::string Region::str() const {
  auto d = [](double v) { return format_double(v); };
  switch (kind) {
    case Kind::rect:
      return "rect:" + d(x0) + "," + d(y0) + "," + d(x1) + "," + d(y1);
    case Kind::disk:
      return "disk:" + d(center.real()) + "," + d(center.imag()) + "," + d(r1);
    case Kind::annulus:
      return "annulus:" + d(center.real()) + "," + d(center.imag()) + "," +
             d(r0) + "," + d(r1);
    case Kind::circle:
      return "circle:" + d(center.real()) + "," + d(center.imag()) + "," + d(r1);
  }
  return "?";
}

double Region::dist(const Complex& z) const {
  switch (kind) {
    case Kind::rect: {
      double dx = std::max({x0 - z.real(), 0.0, z.real() - x1});
      double dy = std::max({y0 - z.imag(), 0.0, z.imag() - y1});
      return std::hypot(dx, dy);
    }
    case Kind::disk:
      return std::max(0.0, std::abs(z - center) - r1);
    case Kind::annulus: {
      double rho = std::abs(z - center);
      if (rho < r0) return r0 - rho;
      if (rho > r1) return rho - r1;
      return 0.0;
    }
    case Kind::circle:
      return std::abs(std::abs(z - center) - r1);
  }
  return 0.0;
}

bool Region::contains(const Complex& z, double tol) const {
  return dist(z) <= tol;
}

bool Region::contains(const XC& z, double tol) const {
  if (z.is_inf()) return false;
  return contains(z.value(), tol);
}

Complex Region::clamp(const Complex& z) const {
  switch (kind) {
    case Kind::rect:
      return Complex(std::min(std::max(z.real(), x0), x1),
                     std::min(std::max(z.imag(), y0), y1));
    case Kind::disk: {
      Complex d = z - center;
      double rho = std::abs(d);
      if (rho <= r1) return z;
      return center + d * (r1 / rho);
    }
    case Kind::annulus: {
      Complex d = z - center;
      double rho = std::abs(d);
      if (rho == 0.0) return center + Complex(r0, 0);
      double want = std::min(std::max(rho, r0), r1);
      return center + d * (want / rho);
    }
    case Kind::circle: {
      Complex d = z - center;
      double rho = std::abs(d);
      if (rho == 0.0) return center + Complex(r1, 0);
      return center + d * (r1 / rho);
    }
  }
  return z;
}

void Region::bbox(double& bx0, double& by0, double& bx1, double& by1) const {
  if (kind == Kind::rect) {
    bx0 = x0; by0 = y0; bx1 = x1; by1 = y1;
    return;
  }
  bx0 = center.real() - r1;
  by0 = center.imag() - r1;
  bx1 = center.real() + r1;
  by1 = center.imag() + r1;
}

Complex Region::sample_interior() const {
  switch (kind) {
    case Kind::rect: return Complex((x0 + x1) / 2, (y0 + y1) / 2);
    case Kind::disk: return center;
    case Kind::annulus: return center + Complex((r0 + r1) / 2, 0);
    case Kind::circle: return center + Complex(r1, 0);
  }
  return Complex(0, 0);
}

std::optional<std::size_t> Grid::cell_index(const Complex& z) const {
  if (cells.empty()) return std::nullopt;
  if (region.kind == Region::Kind::circle) {
    if (std::abs(std::abs(z - region.center) - region.r1) > eps)
      return std::nullopt;
    double th = std::arg(z - region.center);
    long i = static_cast<long>(std::llround(th / (2 * kPi / nx)));
    i = ((i % nx) + nx) % nx;
    auto it = lookup_.find({i, 0});
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
  }
  long i = static_cast<long>(std::floor((z.real() - ox) / eps));
  long j = static_cast<long>(std::floor((z.imag() - oy) / eps));
  auto it = lookup_.find({i, j});
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> Grid::neighbors(std::size_t k) const {
  std::vector<std::size_t> out;
  const GridCell& c = cells[k];
  if (region.kind == Region::Kind::circle) {
    for (long d : {-1L, 1L}) {
      long i = ((c.i + d) % nx + nx) % nx;
      auto it = lookup_.find({i, 0});
      if (it != lookup_.end() && it->second != k) out.push_back(it->second);
    }
    return out;
  }
  for (long dj = -1; dj <= 1; ++dj)
    for (long di = -1; di <= 1; ++di) {
      if (di == 0 && dj == 0) continue;
      auto it = lookup_.find({c.i + di, c.j + dj});
      if (it != lookup_.end()) out.push_back(it->second);
    }
  return out;
}

Grid make_grid(const Region& r, double eps) {
  if (!(eps > 0)) throw Error(Errc::precondition, "grid eps must be > 0");
  Grid g;
  g.region = r;
  g.eps = eps;
  if (r.kind == Region::Kind::circle) {
    long m = std::max<long>(4, static_cast<long>(std::ceil(2 * kPi * r.r1 / eps)));
    g.nx = m;
    g.ny = 1;
    g.ox = g.oy = 0;
    for (long i = 0; i < m; ++i) {
      double t = 2 * kPi * i / m;
      GridCell c;
      c.i = i;
      c.j = 0;
      c.center = r.center + Complex(r.r1 * std::cos(t), r.r1 * std::sin(t));
      g.lookup_[{i, 0}] = g.cells.size();
      g.cells.push_back(c);
    }
    return g;
  }
  double bx0, by0, bx1, by1;
  r.bbox(bx0, by0, bx1, by1);
  g.ox = bx0;
  g.oy = by0;
  g.nx = std::max<long>(1, static_cast<long>(std::ceil((bx1 - bx0) / eps - 1e-9)));
  g.ny = std::max<long>(1, static_cast<long>(std::ceil((by1 - by0) / eps - 1e-9)));
  for (long j = 0; j < g.ny; ++j)
    for (long i = 0; i < g.nx; ++i) {
      Complex c(g.ox + (i + 0.5) * eps, g.oy + (j + 0.5) * eps);
      if (r.contains(c)) {
        GridCell cell;
        cell.i = i;
        cell.j = j;
        cell.center = c;
        g.lookup_[{i, j}] = g.cells.size();
        g.cells.push_back(cell);
      }
    }
  return g;
}

std::vector<Complex> make_net(const Region& r, double eps) {
  if (!(eps > 0)) throw Error(Errc::precondition, "net eps must be > 0");
  std::vector<Complex> out;
  if (r.kind == Region::Kind::circle) {
    long m = std::max<long>(8, static_cast<long>(std::ceil(2 * kPi * r.r1 / eps)));
    for (long i = 0; i < m; ++i) {
      double t = 2 * kPi * i / m;
      out.push_back(r.center + Complex(r.r1 * std::cos(t), r.r1 * std::sin(t)));
    }
    return out;
  }
  // an eps-lattice anchored at the bbox center: every region point sits
  // within the circumradius eps/sqrt(2) of a kept node
  double h = eps;
  double reach = h * 0.7072;
  double bx0, by0, bx1, by1;
  r.bbox(bx0, by0, bx1, by1);
  double cx = 0.5 * (bx0 + bx1), cy = 0.5 * (by0 + by1);
  long kx = static_cast<long>(std::ceil((0.5 * (bx1 - bx0) + reach) / h));
  long ky = static_cast<long>(std::ceil((0.5 * (by1 - by0) + reach) / h));
  for (long j = -ky; j <= ky; ++j)
    for (long i = -kx; i <= kx; ++i) {
      Complex c(cx + i * h, cy + j * h);
      if (r.dist(c) <= reach) out.push_back(c);
    }
  return out;
}

bool PointSet::add(const XC& z, const std::string& label) {
  for (const Entry& e : entries_)
    if (chordal(e.z, z) <= 1e-12) return false;
  entries_.push_back(Entry{z, label});
  return true;
}

void PointSet::sort_canonical() {
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    if (a.z.is_inf() != b.z.is_inf()) return b.z.is_inf();
    if (!a.z.is_inf()) {
      Complex u = a.z.value(), v = b.z.value();
      if (u.real() != v.real()) return u.real() < v.real();
      if (u.imag() != v.imag()) return u.imag() < v.imag();
    }
    return a.label < b.label;
  });
}

std::string format_csv_point(const XC& z) {
  if (z.is_inf()) return "inf,inf";
  return format_double(z.value().real()) + "," + format_double(z.value().imag());
}

std::string PointSet::csv() const {
  std::string s = "re,im,label\n";
  for (const Entry& e : entries_)
    s += format_csv_point(e.z) + "," + e.label + "\n";
  return s;
}

void PointSet::write_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io, "cannot write '" + path + "'");
  out << csv();
}

Raster::Raster(long nx_, long ny_, double ox_, double oy_, double step_)
    : nx(nx_), ny(ny_), ox(ox_), oy(oy_), step(step_) {
  marks.assign(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), 0);
}

void Raster::write_pgm(const std::string& path,
                       const std::string& meta_json) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io, "cannot write '" + path + "'");
  out << "P5\n" << nx << " " << ny << "\n255\n";
  // grayscale from the scalar field when present: log10 ramp over the finite
  // positive range; poles/overflow white, empty cells black
  double lo = 0, hi = 0;
  bool have = false;
  if (!field.empty()) {
    for (double v : field) {
      if (std::isfinite(v) && v > 0) {
        double l = std::log10(v);
        if (!have) {
          lo = hi = l;
          have = true;
        } else {
          lo = std::min(lo, l);
          hi = std::max(hi, l);
        }
      }
    }
    if (hi - lo < 1e-12) hi = lo + 1e-12;
  }
  std::vector<unsigned char> row(static_cast<std::size_t>(nx));
  for (long j = ny - 1; j >= 0; --j) {
    for (long i = 0; i < nx; ++i) {
      std::size_t k = idx(i, j);
      unsigned char g;
      if (!field.empty()) {
        double v = field[k];
        if (std::isinf(v))
          g = 255;
        else if (!std::isfinite(v) || v <= 0 || !have)
          g = 0;
        else {
          double t = (std::log10(v) - lo) / (hi - lo);
          g = static_cast<unsigned char>(
              std::min(255.0, std::max(0.0, std::round(t * 255.0))));
        }
      } else {
        g = marks[k] ? 255 : 0;
      }
      row[static_cast<std::size_t>(i)] = g;
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size()));
  }
  if (!meta_json.empty()) {
    std::ofstream meta(path + ".json", std::ios::binary);
    if (!meta) throw Error(Errc::io, "cannot write '" + path + ".json'");
    meta << meta_json;
  }
}

}  // namespace famdyn
