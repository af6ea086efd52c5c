#include "mfrac/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace mfrac {

namespace {

std::int64_t pow2(int e) { return std::int64_t{1} << e; }

std::int64_t wrap(std::int64_t x, std::int64_t n) {
    std::int64_t r = x % n;
    return r < 0 ? r + n : r;
}

} // namespace

// --- DyadicRational ---------------------------------------------------------

double DyadicRational::value() const { return std::ldexp(static_cast<double>(num), -log2_den); }

std::int64_t DyadicRational::cells_at_level(int level) const {
    if (log2_den <= level) return num << (level - log2_den);
    const int excess = log2_den - level;
    if (excess >= 63 || (num % pow2(excess)) != 0)
        throw AlignmentError("shift " + std::to_string(num) + "/2^" +
                             std::to_string(log2_den) + " is not aligned to level " +
                             std::to_string(level));
    return num >> excess;
}

// --- DyadicCube -------------------------------------------------------------

double DyadicCube::side() const { return std::ldexp(1.0, -level); }

double DyadicCube::volume() const { return std::ldexp(1.0, -level * dim); }

bool DyadicCube::has_shift() const {
    for (int a = 0; a < dim; ++a)
        if (!shift[a].is_zero()) return true;
    return false;
}

// --- AlignedCube ------------------------------------------------------------

double AlignedCube::volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= side(a);
    return v;
}

double AlignedCube::side(int axis) const {
    return std::ldexp(static_cast<double>(count[axis]), -grid_level);
}

bool AlignedCube::contains_cell(const Index& cell) const {
    const std::int64_t n = pow2(grid_level);
    for (int a = 0; a < dim; ++a)
        if (wrap(cell[a] - start[a], n) >= count[a]) return false;
    return true;
}

std::string AlignedCube::describe() const {
    std::ostringstream os;
    os << "L" << grid_level << "[";
    for (int a = 0; a < dim; ++a) {
        if (a) os << " x ";
        os << start[a] << "+" << count[a];
    }
    os << "]";
    return os.str();
}

AlignedCube AlignedCube::full(int dim, int grid_level) {
    AlignedCube q;
    q.dim = dim;
    q.grid_level = grid_level;
    for (int a = 0; a < dim; ++a) {
        q.start[a] = 0;
        q.count[a] = pow2(grid_level);
    }
    return q;
}

AlignedCube to_aligned(const DyadicCube& q, int grid_level) {
    if (q.level > grid_level)
        throw AlignmentError("cube level " + std::to_string(q.level) +
                             " finer than grid level " + std::to_string(grid_level));
    AlignedCube out;
    out.dim = q.dim;
    out.grid_level = grid_level;
    const std::int64_t n = pow2(grid_level);
    const std::int64_t span = pow2(grid_level - q.level);
    for (int a = 0; a < q.dim; ++a) {
        const std::int64_t off = q.shift[a].cells_at_level(grid_level);
        out.start[a] = wrap(q.index[a] * span + off, n);
        out.count[a] = span;
    }
    return out;
}

// --- GridFunction -----------------------------------------------------------

GridFunction::GridFunction(int dim, int level, std::vector<double> values, bool nonneg)
    : dim_(dim), level_(level), nonneg_(nonneg), values_(std::move(values)) {
    if (dim < 1 || dim > kMaxDim)
        throw ShapeError("dimension must be in [1, " + std::to_string(kMaxDim) + "]");
    if (level < 0 || dim * level > 40) throw ShapeError("level out of range");
    const std::size_t expect = std::size_t{1} << (dim * level);
    if (values_.size() != expect)
        throw ShapeError("value count " + std::to_string(values_.size()) +
                         " does not match 2^(dim*level) = " + std::to_string(expect));
    for (double v : values_) {
        if (!std::isfinite(v)) throw ParameterError("grid values must be finite");
        if (nonneg_ && v < 0.0) throw ParameterError("negative value in nonneg grid function");
    }
}

GridFunction GridFunction::constant(int dim, int level, double c) {
    return GridFunction(dim, level, std::vector<double>(std::size_t{1} << (dim * level), c),
                        c >= 0.0);
}

GridFunction GridFunction::indicator(const AlignedCube& q) {
    GridFunction f = constant(q.dim, q.grid_level, 0.0);
    std::vector<double> vals(f.size(), 0.0);
    const std::int64_t n = pow2(q.grid_level);
    Index cell{};
    for (std::size_t i = 0; i < vals.size(); ++i) {
        std::size_t rest = i;
        for (int a = q.dim - 1; a >= 0; --a) {
            cell[a] = static_cast<std::int64_t>(rest % n);
            rest /= n;
        }
        if (q.contains_cell(cell)) vals[i] = 1.0;
    }
    return GridFunction(q.dim, q.grid_level, std::move(vals), true);
}

double GridFunction::cell_volume() const { return std::ldexp(1.0, -dim_ * level_); }

std::size_t GridFunction::linear_index(const Index& cell) const {
    const std::int64_t n = cells_per_axis();
    std::size_t idx = 0;
    for (int a = 0; a < dim_; ++a) idx = idx * n + static_cast<std::size_t>(wrap(cell[a], n));
    return idx;
}

Index GridFunction::cell_of(std::size_t linear) const {
    const std::int64_t n = cells_per_axis();
    Index cell{};
    for (int a = dim_ - 1; a >= 0; --a) {
        cell[a] = static_cast<std::int64_t>(linear % n);
        linear /= n;
    }
    return cell;
}

std::array<double, kMaxDim> GridFunction::cell_center(std::size_t linear) const {
    const Index cell = cell_of(linear);
    const double w = std::ldexp(1.0, -level_);
    std::array<double, kMaxDim> c{};
    for (int a = 0; a < dim_; ++a) c[a] = (static_cast<double>(cell[a]) + 0.5) * w;
    return c;
}

bool GridFunction::strictly_positive() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v > 0.0; });
}

// --- integration ------------------------------------------------------------

namespace {

// Recursive box sum. Splitting every splittable axis at its half reproduces
// the dyadic child decomposition, which makes the children-sum-equals-parent
// identity hold bitwise for dyadic cubes.
double box_sum_rec(const GridFunction& f, const Index& start, const Index& count) {
    const int dim = f.dimension();
    int split_axes[kMaxDim];
    int nsplit = 0;
    for (int a = 0; a < dim; ++a)
        if (count[a] > 1) split_axes[nsplit++] = a;
    if (nsplit == 0) return f.at(start) * f.cell_volume();

    double total = 0.0;
    // children in lexicographic order of the (low, high) choice per split axis
    for (int mask = 0; mask < (1 << nsplit); ++mask) {
        Index cstart = start;
        Index ccount = count;
        for (int s = 0; s < nsplit; ++s) {
            const int a = split_axes[s];
            const std::int64_t half = count[a] / 2;
            if ((mask >> (nsplit - 1 - s)) & 1) {
                cstart[a] = start[a] + half;
                ccount[a] = count[a] - half;
            } else {
                ccount[a] = half;
            }
        }
        total += box_sum_rec(f, cstart, ccount);
    }
    return total;
}

} // namespace

double integrate(const GridFunction& f, const AlignedCube& q) {
    if (q.dim != f.dimension())
        throw ShapeError("cube dimension does not match grid function");
    if (q.grid_level > f.level())
        throw AlignmentError("cube resolved at level finer than the grid");
    const int up = f.level() - q.grid_level;
    Index start{};
    Index count{};
    const std::int64_t n = f.cells_per_axis();
    for (int a = 0; a < q.dim; ++a) {
        start[a] = wrap(q.start[a] << up, n);
        count[a] = q.count[a] << up;
        if (count[a] < 1 || count[a] > n)
            throw AlignmentError("cube extent outside grid");
    }
    return box_sum_rec(f, start, count);
}

double integrate(const GridFunction& f, const DyadicCube& q) {
    return integrate(f, to_aligned(q, f.level()));
}

double average(const GridFunction& f, const AlignedCube& q) {
    return integrate(f, q) / q.volume();
}

double average(const GridFunction& f, const DyadicCube& q) {
    return integrate(f, to_aligned(q, f.level())) / q.volume();
}

double lp_norm(const GridFunction& f, double r, const GridFunction* weight) {
    if (!(r > 0.0)) throw ParameterError("lp_norm requires r > 0");
    if (weight) require_same_grid(f, *weight);
    const double vol = f.cell_volume();
    // pairwise accumulation over the value array
    const auto vals = f.values();
    std::vector<double> terms(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) {
        double t = std::pow(std::abs(vals[i]), r) * vol;
        if (weight) t *= (*weight)[i];
        terms[i] = t;
    }
    struct Rec {
        static double sum(std::span<const double> xs) {
            if (xs.size() == 1) return xs[0];
            const std::size_t h = xs.size() / 2;
            return sum(xs.first(h)) + sum(xs.subspan(h));
        }
    };
    const double total = terms.empty() ? 0.0 : Rec::sum(terms);
    return std::pow(total, 1.0 / r);
}

double weak_lq_norm(const GridFunction& g, double q) {
    if (!(q > 0.0)) throw ParameterError("weak_lq_norm requires q > 0");
    std::vector<double> mags(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) mags[i] = std::abs(g[i]);
    std::sort(mags.begin(), mags.end(), std::greater<>());
    const double vol = g.cell_volume();
    double best = 0.0;
    std::size_t i = 0;
    while (i < mags.size()) {
        const double v = mags[i];
        if (v == 0.0) break;
        std::size_t j = i;
        while (j < mags.size() && mags[j] == v) ++j;
        // measure of {|g| >= v} is (j) cells once the run [i, j) is absorbed
        const double meas = static_cast<double>(j) * vol;
        best = std::max(best, v * std::pow(meas, 1.0 / q));
        i = j;
    }
    return best;
}

GridFunction translate(const GridFunction& f, std::span<const std::int64_t> t_cells) {
    if (std::ssize(t_cells) < f.dimension()) throw ShapeError("translate: short shift vector");
    const std::int64_t n = f.cells_per_axis();
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        Index cell = f.cell_of(i);
        for (int a = 0; a < f.dimension(); ++a) cell[a] = wrap(cell[a] - t_cells[a], n);
        out[i] = f.at(cell);
    }
    return GridFunction(f.dimension(), f.level(), std::move(out), f.nonneg());
}

GridFunction translate(const GridFunction& f, std::span<const DyadicRational> t) {
    std::vector<std::int64_t> cells(f.dimension());
    for (int a = 0; a < f.dimension(); ++a) cells[a] = t[a].cells_at_level(f.level());
    return translate(f, cells);
}

double min_over(const GridFunction& f, const AlignedCube& q) {
    if (q.dim != f.dimension()) throw ShapeError("cube dimension mismatch");
    const int up = f.level() - q.grid_level;
    if (up < 0) throw AlignmentError("cube finer than grid");
    const std::int64_t n = f.cells_per_axis();
    Index count{};
    for (int a = 0; a < q.dim; ++a) count[a] = q.count[a] << up;
    double best = std::numeric_limits<double>::infinity();
    Index off{};
    while (true) {
        Index cell{};
        for (int a = 0; a < q.dim; ++a) cell[a] = wrap((q.start[a] << up) + off[a], n);
        best = std::min(best, f.at(cell));
        int a = q.dim - 1;
        while (a >= 0) {
            if (++off[a] < count[a]) break;
            off[a] = 0;
            --a;
        }
        if (a < 0) break;
    }
    return best;
}

// --- pointwise helpers ------------------------------------------------------

void require_same_grid(const GridFunction& a, const GridFunction& b) {
    if (a.dimension() != b.dimension() || a.level() != b.level())
        throw ShapeError("grid functions live on different grids");
}

GridFunction pointwise_pow(const GridFunction& f, double e) {
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::pow(f[i], e);
    for (double v : out)
        if (!std::isfinite(v))
            throw ParameterError("pointwise_pow produced a non-finite value");
    return GridFunction(f.dimension(), f.level(), std::move(out));
}

GridFunction pointwise_product(const GridFunction& a, const GridFunction& b) {
    require_same_grid(a, b);
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
    return GridFunction(a.dimension(), a.level(), std::move(out), a.nonneg() && b.nonneg());
}

GridFunction pointwise_scale(const GridFunction& f, double c) {
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f[i] * c;
    return GridFunction(f.dimension(), f.level(), std::move(out), f.nonneg() && c >= 0.0);
}

GridFunction pointwise_log(const GridFunction& f) {
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!(f[i] > 0.0)) throw ParameterError("pointwise_log requires positive values");
        out[i] = std::log(f[i]);
    }
    return GridFunction(f.dimension(), f.level(), std::move(out));
}

GridFunction pointwise_max(const GridFunction& a, const GridFunction& b) {
    require_same_grid(a, b);
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(a[i], b[i]);
    return GridFunction(a.dimension(), a.level(), std::move(out), a.nonneg() || b.nonneg());
}

GridFunction tensor_product(const GridFunction& a, const GridFunction& b) {
    if (a.level() != b.level()) throw ShapeError("tensor factors must share a level");
    const int dim = a.dimension() + b.dimension();
    if (dim > kMaxDim) throw ShapeError("tensor product dimension too large");
    std::vector<double> out(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
    return GridFunction(dim, a.level(), std::move(out), a.nonneg() && b.nonneg());
}

GridFunction slice(const GridFunction& f, int axis0, int n_axes, const Index& frozen) {
    if (axis0 < 0 || axis0 + n_axes > f.dimension()) throw ShapeError("slice axes out of range");
    const std::int64_t n = f.cells_per_axis();
    std::vector<double> out(std::size_t{1} << (n_axes * f.level()));
    Index cell = frozen;
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::size_t rest = i;
        for (int a = n_axes - 1; a >= 0; --a) {
            cell[axis0 + a] = static_cast<std::int64_t>(rest % n);
            rest /= n;
        }
        out[i] = f.at(cell);
    }
    return GridFunction(n_axes, f.level(), std::move(out), f.nonneg());
}

// --- CubeFamily ---------------------------------------------------------------

CubeFamily::CubeFamily(Kind k, int dim, int level, std::vector<DyadicRational> shifts)
    : kind_(k), dim_(dim), level_(level), shifts_(std::move(shifts)) {
    if (dim < 1 || dim > kMaxDim) throw ShapeError("family dimension out of range");
    if (level < 0 || level > 20) throw ParameterError("family level out of range");
}

CubeFamily CubeFamily::dyadic(int dim, int level) {
    return CubeFamily(Kind::Dyadic, dim, level, {});
}

CubeFamily CubeFamily::grid_aligned(int dim, int level) {
    if (dim != 1)
        throw UnsupportedFamilyError("grid-aligned family exists only in dimension 1");
    return CubeFamily(Kind::GridAligned, dim, level, {});
}

CubeFamily CubeFamily::shifted_dyadic(int dim, int level,
                                      std::vector<DyadicRational> diagonal_shifts) {
    return CubeFamily(Kind::ShiftedDyadic, dim, level, std::move(diagonal_shifts));
}

CubeFamily CubeFamily::all_cubes(int dim, int level) {
    if (dim == 1) return grid_aligned(dim, level);
    // one-third shift trick, rounded to the cell grid
    const std::int64_t n = pow2(level);
    const auto round_div = [](std::int64_t a, std::int64_t b) {
        return (2 * a + b) / (2 * b);
    };
    std::vector<DyadicRational> shifts = {
        DyadicRational{0, 0},
        DyadicRational{round_div(n, 3), level},
        DyadicRational{round_div(2 * n, 3), level},
    };
    return shifted_dyadic(dim, level, std::move(shifts));
}

CubeFamily CubeFamily::of_kind(Kind k, int dim, int level) {
    switch (k) {
        case Kind::Dyadic: return dyadic(dim, level);
        case Kind::GridAligned: return grid_aligned(dim, level);
        case Kind::ShiftedDyadic: return all_cubes(dim, level);
    }
    throw ParameterError("unknown family kind");
}

CubeFamily::Kind CubeFamily::parse_kind(const std::string& name) {
    if (name == "dyadic") return Kind::Dyadic;
    if (name == "grid-aligned") return Kind::GridAligned;
    if (name == "shifted-dyadic") return Kind::ShiftedDyadic;
    throw ConfigError("unknown cube family: " + name);
}

std::vector<AlignedCube> CubeFamily::enumerate() const {
    std::vector<AlignedCube> out;
    const std::int64_t n = pow2(level_);
    switch (kind_) {
        case Kind::GridAligned: {
            // all intervals [a, b) with grid endpoints, lengths descending
            for (std::int64_t len = n; len >= 1; --len)
                for (std::int64_t a = 0; a + len <= n; ++a) {
                    AlignedCube q;
                    q.dim = 1;
                    q.grid_level = level_;
                    q.start[0] = a;
                    q.count[0] = len;
                    out.push_back(q);
                }
            return out;
        }
        case Kind::Dyadic:
        case Kind::ShiftedDyadic: {
            std::vector<DyadicRational> shifts = shifts_;
            if (kind_ == Kind::Dyadic) shifts = {DyadicRational{0, 0}};
            for (int lev = 0; lev <= level_; ++lev) {
                for (const auto& sh : shifts) {
                    const std::int64_t cells = pow2(level_ - lev);
                    const std::int64_t off = sh.cells_at_level(level_);
                    const std::int64_t per_axis = pow2(lev);
                    Index idx{};
                    while (true) {
                        AlignedCube q;
                        q.dim = dim_;
                        q.grid_level = level_;
                        for (int a = 0; a < dim_; ++a) {
                            q.start[a] = wrap(idx[a] * cells + off, n);
                            q.count[a] = cells;
                        }
                        out.push_back(q);
                        int a = dim_ - 1;
                        while (a >= 0) {
                            if (++idx[a] < per_axis) break;
                            idx[a] = 0;
                            --a;
                        }
                        if (a < 0) break;
                    }
                }
            }
            return out;
        }
    }
    throw ParameterError("unknown family kind");
}

std::size_t CubeFamily::count() const {
    const std::int64_t n = pow2(level_);
    switch (kind_) {
        case Kind::GridAligned: return static_cast<std::size_t>(n * (n + 1) / 2);
        case Kind::Dyadic:
        case Kind::ShiftedDyadic: {
            std::size_t per_shift = 0;
            for (int lev = 0; lev <= level_; ++lev)
                per_shift += std::size_t{1} << (dim_ * lev);
            const std::size_t s = kind_ == Kind::Dyadic ? 1 : shifts_.size();
            return per_shift * s;
        }
    }
    return 0;
}

std::string CubeFamily::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::Dyadic: os << "dyadic"; break;
        case Kind::GridAligned: os << "grid-aligned"; break;
        case Kind::ShiftedDyadic: os << "shifted-dyadic(" << shifts_.size() << " shifts)"; break;
    }
    os << " L=" << level_ << " n=" << dim_;
    return os.str();
}

// --- CellSums -----------------------------------------------------------------

CellSums::CellSums(const GridFunction& f)
    : dim_(f.dimension()), level_(f.level()), n_(f.cells_per_axis()) {
    const double vol = f.cell_volume();
    sums_.resize(f.size());
    for (std::size_t i = 0; i < sums_.size(); ++i) sums_[i] = f[i] * vol;
    // in-place inclusive prefix along each axis, last axis has stride 1
    std::size_t stride = 1;
    for (int a = dim_ - 1; a >= 0; --a) {
        const std::size_t naxis = static_cast<std::size_t>(n_);
        const std::size_t outer = sums_.size() / naxis;
        for (std::size_t o = 0; o < outer; ++o) {
            const std::size_t base = (o / stride) * stride * naxis + (o % stride);
            for (std::size_t j = 1; j < naxis; ++j)
                sums_[base + j * stride] += sums_[base + (j - 1) * stride];
        }
        stride *= naxis;
    }
}

double CellSums::total() const { return sums_.back(); }

// sum over the half-open cell box [lo, hi) per axis, no wrap; hi > lo
double CellSums::corner_sum(const std::array<std::int64_t, kMaxDim>& lo,
                            const std::array<std::int64_t, kMaxDim>& hi) const {
    double total = 0.0;
    for (int mask = 0; mask < (1 << dim_); ++mask) {
        std::size_t idx = 0;
        int sign = 1;
        bool zero = false;
        for (int a = 0; a < dim_; ++a) {
            std::int64_t c;
            if ((mask >> a) & 1) {
                c = lo[a] - 1;
                sign = -sign;
            } else {
                c = hi[a] - 1;
            }
            if (c < 0) {
                zero = true;
                break;
            }
            idx = idx * static_cast<std::size_t>(n_) + static_cast<std::size_t>(c);
        }
        if (!zero) total += sign * sums_[idx];
    }
    return total;
}

double CellSums::box_sum(const AlignedCube& q) const {
    if (q.dim != dim_) throw ShapeError("box dimension mismatch");
    const int up = level_ - q.grid_level;
    if (up < 0) throw AlignmentError("box finer than prefix grid");
    // split each (possibly wrapped) range into at most two linear segments
    std::array<std::array<std::int64_t, 2>, kMaxDim> seg_lo{};
    std::array<std::array<std::int64_t, 2>, kMaxDim> seg_hi{};
    std::array<int, kMaxDim> nseg{};
    for (int a = 0; a < dim_; ++a) {
        const std::int64_t s = wrap(q.start[a] << up, n_);
        const std::int64_t c = q.count[a] << up;
        if (s + c <= n_) {
            nseg[a] = 1;
            seg_lo[a][0] = s;
            seg_hi[a][0] = s + c;
        } else {
            nseg[a] = 2;
            seg_lo[a][0] = s;
            seg_hi[a][0] = n_;
            seg_lo[a][1] = 0;
            seg_hi[a][1] = s + c - n_;
        }
    }
    double total = 0.0;
    std::array<int, kMaxDim> pick{};
    while (true) {
        std::array<std::int64_t, kMaxDim> lo{};
        std::array<std::int64_t, kMaxDim> hi{};
        for (int a = 0; a < dim_; ++a) {
            lo[a] = seg_lo[a][pick[a]];
            hi[a] = seg_hi[a][pick[a]];
        }
        total += corner_sum(lo, hi);
        int a = dim_ - 1;
        while (a >= 0) {
            if (++pick[a] < nseg[a]) break;
            pick[a] = 0;
            --a;
        }
        if (a < 0) break;
    }
    return total;
}

} // namespace mfrac
