#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mfrac/errors.hpp"

namespace mfrac {

inline constexpr int kMaxDim = 4;

using Index = std::array<std::int64_t, kMaxDim>;

/// Exact dyadic rational num / 2^log2_den, the currency for grid shifts.
struct DyadicRational {
    std::int64_t num = 0;
    int log2_den = 0;

    double value() const;
    bool is_zero() const { return num == 0; }

    /// Offset in level-L cells. Throws AlignmentError when the rational is
    /// not a multiple of 2^-L.
    std::int64_t cells_at_level(int level) const;

    static DyadicRational cells(std::int64_t k, int level) { return {k, level}; }
};

/// Cube 2^{-level}(index + [0,1)^dim) + shift, modulo 1 per coordinate.
/// Two such cubes with zero shift are nested or disjoint.
struct DyadicCube {
    int dim = 1;
    int level = 0;
    Index index{};                                // 0 <= index[a] < 2^level
    std::array<DyadicRational, kMaxDim> shift{};  // default zero

    double side() const;
    double volume() const;
    bool has_shift() const;
};

/// Axis-aligned union of level-L cells, possibly wrapping around the torus.
/// Every family member reduces to one of these for exact integration.
struct AlignedCube {
    int dim = 1;
    int grid_level = 0;  // the carrying grid's L
    Index start{};       // 0 <= start[a] < 2^L
    Index count{};       // 1 <= count[a] <= 2^L

    double volume() const;
    double side(int axis) const;  // count[axis] * 2^-L
    bool contains_cell(const Index& cell) const;
    std::string describe() const;

    /// Full torus at level L.
    static AlignedCube full(int dim, int grid_level);
};

/// Resolve a dyadic cube to cell ranges on a level-L grid.
/// Throws AlignmentError when level > L or the shift is not grid-aligned.
AlignedCube to_aligned(const DyadicCube& q, int grid_level);

/// Piecewise-constant function on the unit torus [0,1)^dim at resolution
/// level L: one value per cell, in lexicographic cell order (first axis
/// slowest). Values are read as exact cell data; there is no interpolation.
class GridFunction {
public:
    GridFunction(int dim, int level, std::vector<double> values, bool nonneg = false);

    static GridFunction constant(int dim, int level, double c);
    static GridFunction indicator(const AlignedCube& q);

    int dimension() const { return dim_; }
    int level() const { return level_; }
    std::int64_t cells_per_axis() const { return std::int64_t{1} << level_; }
    std::size_t size() const { return values_.size(); }
    double cell_volume() const;
    bool nonneg() const { return nonneg_; }

    double operator[](std::size_t i) const { return values_[i]; }
    double at(const Index& cell) const { return values_[linear_index(cell)]; }
    std::span<const double> values() const { return values_; }

    std::size_t linear_index(const Index& cell) const;
    Index cell_of(std::size_t linear) const;
    std::array<double, kMaxDim> cell_center(std::size_t linear) const;

    bool strictly_positive() const;

private:
    int dim_;
    int level_;
    bool nonneg_;
    std::vector<double> values_;
};

/// Finite, deterministically enumerable family of cubes realizing
/// "sup over all cubes Q" on the grid. Enumeration order: levels ascending
/// (coarse to fine; lengths descending for the grid-aligned family), then
/// declared shifts, then lexicographic index.
class CubeFamily {
public:
    enum class Kind { Dyadic, GridAligned, ShiftedDyadic };

    static CubeFamily dyadic(int dim, int level);
    static CubeFamily grid_aligned(int dim, int level);  // dim 1 only
    static CubeFamily shifted_dyadic(int dim, int level,
                                     std::vector<DyadicRational> diagonal_shifts);

    /// The default realization of "all cubes": exhaustive grid-aligned
    /// intervals in 1-D; dyadic plus one-third-shifted dyadic grids above.
    static CubeFamily all_cubes(int dim, int level);

    static CubeFamily of_kind(Kind k, int dim, int level);
    static Kind parse_kind(const std::string& name);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    int level() const { return level_; }
    std::span<const DyadicRational> shifts() const { return shifts_; }

    std::vector<AlignedCube> enumerate() const;
    std::size_t count() const;
    std::string describe() const;

private:
    CubeFamily(Kind k, int dim, int level, std::vector<DyadicRational> shifts);

    Kind kind_;
    int dim_;
    int level_;
    std::vector<DyadicRational> shifts_;  // diagonal shifts, ShiftedDyadic only
};

// --- exact calculus -------------------------------------------------------

/// Exact integral of f over q (sum of cell values times cell volume).
/// The summation tree refines through the cube's dyadic children, so the
/// 2^dim-children-sum-equals-parent identity holds bitwise.
double integrate(const GridFunction& f, const AlignedCube& q);
double integrate(const GridFunction& f, const DyadicCube& q);

double average(const GridFunction& f, const AlignedCube& q);
double average(const GridFunction& f, const DyadicCube& q);

/// (sum |f|^r weight * vol)^{1/r}, weight identically 1 when null. r > 0.
double lp_norm(const GridFunction& f, double r, const GridFunction* weight = nullptr);

/// sup over attained values v > 0 of |g| of v * |{|g| >= v}|^{1/q};
/// equals the L^{q,oo} norm for step functions (the sup over lambda is
/// approached as lambda increases to each attained value).
double weak_lq_norm(const GridFunction& g, double q);

/// Cyclic shift on the torus: result(x) = f(x - t).
GridFunction translate(const GridFunction& f, std::span<const std::int64_t> t_cells);
GridFunction translate(const GridFunction& f, std::span<const DyadicRational> t);

double min_over(const GridFunction& f, const AlignedCube& q);

// --- pointwise helpers ----------------------------------------------------

GridFunction pointwise_pow(const GridFunction& f, double e);
GridFunction pointwise_product(const GridFunction& a, const GridFunction& b);
GridFunction pointwise_scale(const GridFunction& f, double c);
GridFunction pointwise_log(const GridFunction& f);
GridFunction pointwise_max(const GridFunction& a, const GridFunction& b);

/// Tensor product: (a (x) b)(x, y) = a(x) b(y); the factors' axes become
/// the leading and trailing axes of the result.
GridFunction tensor_product(const GridFunction& a, const GridFunction& b);

/// Restriction of a dim-kn function to factor axes [axis0, axis0+n) with the
/// complementary axes frozen at the given cells.
GridFunction slice(const GridFunction& f, int axis0, int n_axes, const Index& frozen);

/// Same-grid check; throws ShapeError on mismatch.
void require_same_grid(const GridFunction& a, const GridFunction& b);

// --- fast box sums ---------------------------------------------------------

/// Inclusive prefix sums of f * cell_volume. Box queries cost O(4^dim)
/// lookups; wrapped ranges are split into at most two segments per axis.
/// Built once, single-threaded, then read concurrently.
class CellSums {
public:
    explicit CellSums(const GridFunction& f);

    double box_sum(const AlignedCube& q) const;
    double total() const;
    int dimension() const { return dim_; }
    int level() const { return level_; }

private:
    double corner_sum(const std::array<std::int64_t, kMaxDim>& lo,
                      const std::array<std::int64_t, kMaxDim>& hi) const;

    int dim_;
    int level_;
    std::int64_t n_;
    std::vector<double> sums_;
};

} // namespace mfrac
