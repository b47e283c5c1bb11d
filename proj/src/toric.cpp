#include "kstab/toric.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <set>

#include "kstab/error.hpp"
#include "kstab/linalg.hpp"

namespace kstab {

namespace {

long integer_det(std::vector<std::vector<long>> m) {
  RationalMatrix r;
  for (const auto& row : m) {
    std::vector<Rational> q;
    for (long x : row) q.emplace_back(x);
    r.push_back(std::move(q));
  }
  const Rational d = determinant(std::move(r));
  return d.get_num().get_si();
}

double double_det(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  double det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    if (a[p][c] == 0) return 0;
    if (p != c) {
      std::swap(a[p], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

std::vector<Rational> as_rational(std::span<const long> w) {
  std::vector<Rational> out;
  out.reserve(w.size());
  for (long x : w) out.emplace_back(x);
  return out;
}

// Cyclic angular order of planar integer vectors.
std::vector<std::size_t> angular_order(const std::vector<std::vector<long>>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto half = [&](std::size_t i) { return (v[i][1] > 0 || (v[i][1] == 0 && v[i][0] > 0)) ? 0 : 1; };
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (half(a) != half(b)) return half(a) < half(b);
    return v[a][0] * v[b][1] - v[a][1] * v[b][0] > 0;
  });
  return idx;
}

std::uint64_t next_serial() {
  static std::atomic<std::uint64_t> counter{0};
  return ++counter;
}

struct VertexCache {
  std::uint64_t owner = 0;
  std::vector<Rational> key;
  std::vector<Point> vertices;
  // counterclockwise, for the planar path
  std::vector<Point> ring;
};

}  // namespace

ToricModel::ToricModel(std::string id, std::vector<std::vector<long>> rays,
                       std::vector<std::string> ray_names, std::vector<std::vector<std::size_t>> cones,
                       std::vector<Valuation> extra)
    : id_(std::move(id)), rays_(std::move(rays)), cones_(std::move(cones)), serial_(next_serial()) {
  if (rays_.empty()) throw GeometryError("toric model '" + id_ + "' has no rays");
  n_ = rays_[0].size();
  if (n_ == 0) throw GeometryError("toric model '" + id_ + "' has lattice rank 0");
  for (const auto& r : rays_) {
    if (r.size() != n_) throw GeometryError("rays of '" + id_ + "' have inconsistent length");
    long g = 0;
    for (long x : r) g = std::gcd(g, x);
    if (g != 1) throw GeometryError("ray of '" + id_ + "' is not primitive");
  }
  if (ray_names.size() != rays_.size()) throw GeometryError("ray_names must name every ray");

  // Completeness: the rays positively span R^n.
  RationalMatrix rm;
  for (const auto& r : rays_) rm.push_back(as_rational(r));
  if (rank(rm) != n_) throw GeometryError("rays of '" + id_ + "' do not span the lattice");
  std::vector<std::size_t> idx(n_ - 1);
  std::iota(idx.begin(), idx.end(), 0);
  auto check_kernel = [&](const std::vector<std::size_t>& sub) {
    std::vector<long> y(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      std::vector<std::vector<long>> minor;
      for (std::size_t i : sub) {
        std::vector<long> row;
        for (std::size_t c = 0; c < n_; ++c)
          if (c != j) row.push_back(rays_[i][c]);
        minor.push_back(std::move(row));
      }
      y[j] = (j % 2 ? -1 : 1) * (n_ == 1 ? 1 : integer_det(minor));
    }
    bool pos = true, neg = true, nonzero = false;
    for (long c : y) nonzero = nonzero || c != 0;
    if (!nonzero) return;
    for (const auto& r : rays_) {
      long s = 0;
      for (std::size_t c = 0; c < n_; ++c) s += y[c] * r[c];
      pos = pos && s >= 0;
      neg = neg && s <= 0;
    }
    if (pos || neg) throw GeometryError("fan of '" + id_ + "' is not complete: section polytopes are unbounded");
  };
  if (n_ == 1) {
    check_kernel({});
  } else {
    for (;;) {
      check_kernel(idx);
      std::size_t i = n_ - 1;
      while (i > 0 && idx[i - 1] == rays_.size() - (n_ - 1) + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < n_ - 1; ++j) idx[j] = idx[j - 1] + 1;
    }
  }

  if (cones_.empty()) {
    if (n_ != 2) throw GeometryError("toric model '" + id_ + "': cones must be given when n != 2");
    const auto order = angular_order(rays_);
    for (std::size_t i = 0; i < order.size(); ++i)
      cones_.push_back({order[i], order[(i + 1) % order.size()]});
  }
  for (const auto& cone : cones_) {
    if (cone.size() != n_) throw GeometryError("cone of '" + id_ + "' does not have n rays");
    std::vector<std::vector<long>> m;
    for (std::size_t i : cone) {
      if (i >= rays_.size()) throw GeometryError("cone of '" + id_ + "' references a missing ray");
      m.push_back(rays_[i]);
    }
    const long det = integer_det(m);
    if (det != 1 && det != -1) throw GeometryError("cone of '" + id_ + "' is not smooth");
  }

  canonical_ = DivisorClass(id_, std::vector<Rational>(rays_.size(), Rational(-1)));

  std::set<std::string> names;
  for (std::size_t i = 0; i < rays_.size(); ++i) {
    if (ray_names[i] == kTrivialValuationName || !names.insert(ray_names[i]).second)
      throw GeometryError("ray name '" + ray_names[i] + "' is reserved or repeated");
    valuations_.emplace_back(ray_names[i], Rational(1), MonomialCenter{rays_[i]});
  }
  for (auto& v : extra) {
    const auto* m = v.monomial_center();
    if (!m || m->weight.size() != n_)
      throw GeometryError("valuation '" + v.name() + "' is not a monomial valuation on '" + id_ + "'");
    if (v.name() == kTrivialValuationName || !names.insert(v.name()).second)
      throw GeometryError("valuation name '" + v.name() + "' is reserved or repeated");
    valuations_.push_back(std::move(v));
  }
}

std::vector<HalfSpace> ToricModel::facets_of(const DivisorClass& d) const {
  require_own_class(d);
  std::vector<HalfSpace> hs;
  hs.reserve(rays_.size());
  for (std::size_t i = 0; i < rays_.size(); ++i) hs.push_back({as_rational(rays_[i]), -d[i]});
  return hs;
}

Polytope ToricModel::section_polytope(const DivisorClass& d) const { return Polytope(n_, facets_of(d)); }

Rational ToricModel::polytope_volume(const DivisorClass& d) const {
  return section_polytope(d).normalized_volume();
}

Rational ToricModel::volume(const DivisorClass& d) const { return polytope_volume(d); }

Rational ToricModel::constrained_volume(const DivisorClass& l,
                                        std::span<const OrderConstraint> constraints) const {
  require_own_class(l);
  if (constraints.empty()) return polytope_volume(l);

  thread_local VertexCache cache;
  std::vector<Rational> key(l.coefficients().begin(), l.coefficients().end());
  if (cache.owner != serial_ || cache.key != key) {
    cache.vertices = section_polytope(l).vertices();
    cache.ring = n_ == 2 ? polygon_ring(cache.vertices) : std::vector<Point>{};
    cache.owner = serial_;
    cache.key = std::move(key);
  }
  if (cache.vertices.empty()) return 0;

  std::vector<HalfSpace> hs;
  for (const auto& c : constraints) {
    if (c.weight.size() != n_) throw GeometryError("constraint weight has the wrong dimension");
    auto w = as_rational(c.weight);
    Rational lo;
    for (std::size_t i = 0; i < cache.vertices.size(); ++i) {
      Rational s = 0;
      for (std::size_t j = 0; j < n_; ++j) s += w[j] * cache.vertices[i][j];
      if (i == 0 || s < lo) lo = s;
    }
    hs.push_back({std::move(w), lo + c.depth});
  }
  if (n_ == 2) return clipped_polygon_area(cache.ring, hs);
  auto all = facets_of(l);
  all.insert(all.end(), hs.begin(), hs.end());
  return Polytope(n_, std::move(all)).normalized_volume();
}

const MonomialCenter& ToricModel::monomial(const Valuation& v) const {
  const auto* m = v.monomial_center();
  if (!m || m->weight.size() != n_)
    throw GeometryError("valuation '" + v.name() + "' is not a monomial valuation on '" + id_ + "'");
  return *m;
}

Rational ToricModel::twisted_volume(const DivisorClass& l, std::span<const Twist> twists) const {
  std::vector<OrderConstraint> cs;
  for (const auto& t : twists) {
    if (t.valuation->is_trivial() || sgn(t.amount) == 0) continue;
    cs.push_back({monomial(*t.valuation).weight, t.amount});
  }
  return constrained_volume(l, cs);
}

std::optional<Threshold> ToricModel::exact_threshold(const DivisorClass& l, const Valuation& v) const {
  const auto p = section_polytope(l);
  const auto w = as_rational(monomial(v).weight);
  auto [lo, hi] = p.range(w);
  const Rational width = hi - lo;
  return Threshold{to_double(width), width};
}

void ToricModel::check_support(std::span<const Valuation> support) const {
  for (const auto& v : support)
    if (!v.is_trivial()) monomial(v);
}

std::vector<double> ToricModel::twist_kinks(const DivisorClass& l, std::span<const Valuation> support,
                                            std::span<const double> shifts, double lo, double hi) const {
  struct Plane {
    std::vector<double> normal;
    double b0, b1;  // offset b0 + λ·b1
  };
  const auto p = section_polytope(l);
  if (p.empty() || !(lo < hi)) return {};

  std::vector<Plane> fixed;
  for (std::size_t i = 0; i < rays_.size(); ++i) {
    std::vector<double> nrm(rays_[i].begin(), rays_[i].end());
    fixed.push_back({std::move(nrm), -to_double(l[i]), 0});
  }
  struct Mover {
    Plane plane;
    double t;
  };
  std::vector<Mover> movers;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i].is_trivial()) continue;
    const auto& w = monomial(support[i]).weight;
    const double mn = to_double(p.range(as_rational(w)).first);
    movers.push_back({{std::vector<double>(w.begin(), w.end()), mn - shifts[i], 1}, shifts[i]});
  }

  std::vector<double> cuts{lo, hi};
  for (const auto& m : movers)
    if (m.t > lo && m.t < hi) cuts.push_back(m.t);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<double> kinks;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double a = cuts[s], b = cuts[s + 1];
    std::vector<Plane> planes = fixed;
    std::size_t first_mover = planes.size();
    for (const auto& m : movers)
      if (m.t <= a) planes.push_back(m.plane);
    if (planes.size() == first_mover) continue;

    const std::size_t k = n_ + 1;
    if (planes.size() < k) continue;
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    for (;;) {
      if (idx.back() >= first_mover) {
        std::vector<std::vector<double>> m0, m1;
        for (std::size_t i : idx) {
          auto row = planes[i].normal;
          row.push_back(planes[i].b0);
          m0.push_back(row);
          row.back() = planes[i].b1;
          m1.push_back(std::move(row));
        }
        const double d1 = double_det(m1);
        if (std::abs(d1) > 1e-12) {
          const double lam = -double_det(m0) / d1;
          if (lam > a && lam < b) kinks.push_back(lam);
        }
      }
      std::size_t i = k;
      while (i > 0 && idx[i - 1] == planes.size() - k + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  std::sort(kinks.begin(), kinks.end());
  kinks.erase(std::unique(kinks.begin(), kinks.end()), kinks.end());
  return kinks;
}

std::vector<LatticePoint> ToricModel::section_basis(const DivisorClass& l, long k) const {
  require_own_class(l);
  if (k <= 0) throw GeometryError("section_basis needs k >= 1");
  std::vector<long> bound(rays_.size());
  for (std::size_t i = 0; i < rays_.size(); ++i) {
    const Rational kb = Rational(k) * l[i];
    if (kb.get_den() != 1) throw GeometryError("k·L is not integral");
    bound[i] = kb.get_num().get_si();
  }
  const auto p = section_polytope(l);
  if (p.empty()) return {};
  std::vector<long> lo(n_), hi(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    std::vector<Rational> e(n_);
    e[j] = 1;
    auto [mn, mx] = p.range(e);
    mn *= k;
    mx *= k;
    mpz_class f, c;
    mpz_fdiv_q(f.get_mpz_t(), mn.get_num_mpz_t(), mn.get_den_mpz_t());
    mpz_fdiv_q(c.get_mpz_t(), mx.get_num_mpz_t(), mx.get_den_mpz_t());
    lo[j] = f.get_si();
    hi[j] = c.get_si();
  }
  std::vector<LatticePoint> pts;
  std::vector<long> m = lo;
  for (;;) {
    bool inside = true;
    for (std::size_t i = 0; i < rays_.size() && inside; ++i) {
      long s = 0;
      for (std::size_t j = 0; j < n_; ++j) s += m[j] * rays_[i][j];
      inside = s >= -bound[i];
    }
    if (inside) pts.push_back(m);
    std::size_t j = n_;
    while (j > 0 && m[j - 1] == hi[j - 1]) {
      m[j - 1] = lo[j - 1];
      --j;
    }
    if (j == 0) break;
    ++m[j - 1];
  }
  return pts;
}

Rational ToricModel::log_discrepancy(std::span<const long> w) const {
  if (w.size() != n_) throw GeometryError("weight has the wrong dimension");
  long g = 0;
  for (long x : w) g = std::gcd(g, x);
  if (g == 0) throw GeometryError("the zero weight is the trivial valuation");
  if (g != 1) throw GeometryError("weight is not primitive");
  for (const auto& cone : cones_) {
    RationalMatrix m(n_, std::vector<Rational>(n_));
    for (std::size_t c = 0; c < n_; ++c)
      for (std::size_t r = 0; r < n_; ++r) m[r][c] = rays_[cone[c]][r];
    auto coeffs = solve(m, as_rational(w));
    if (!coeffs) continue;
    bool inside = true;
    Rational a = 0;
    for (const auto& c : *coeffs) {
      inside = inside && sgn(c) >= 0;
      a += c;
    }
    if (inside) return a;
  }
  throw GeometryError("weight lies in no declared cone of '" + id_ + "'");
}

}  // namespace kstab
