#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>

#include "mfrac/grid.hpp"
#include "mfrac/rng.hpp"

using namespace mfrac;

namespace {

GridFunction random_grid(int dim, int level, RandomSource& rng, double lo = 0.1,
                         double hi = 10.0) {
    std::vector<double> vals(std::size_t{1} << (dim * level));
    for (auto& v : vals) v = rng.log_uniform(lo, hi);
    return GridFunction(dim, level, std::move(vals), true);
}

// independent oracle: plain left-to-right cell sum
double cell_sum_oracle(const GridFunction& f, const AlignedCube& q) {
    double total = 0.0;
    const std::int64_t n = f.cells_per_axis();
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (q.contains_cell(f.cell_of(i))) total += f[i];
    }
    (void)n;
    return total * f.cell_volume();
}

AlignedCube interval(int level, std::int64_t start, std::int64_t count) {
    AlignedCube q;
    q.dim = 1;
    q.grid_level = level;
    q.start[0] = start;
    q.count[0] = count;
    return q;
}

} // namespace

TEST_CASE("integrate: constants and indicators") {
    const GridFunction one = GridFunction::constant(1, 4, 1.0);
    CHECK(integrate(one, interval(4, 0, 8)) == doctest::Approx(0.5).epsilon(1e-15));

    // f = chi_[0,1/4) over Q = [0,1/2)
    const GridFunction chi = GridFunction::indicator(interval(4, 0, 4));
    CHECK(integrate(chi, interval(4, 0, 8)) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(average(chi, interval(4, 0, 8)) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("integrate matches the cell-sum oracle on random functions") {
    RandomSource rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const GridFunction f = random_grid(1, 6, rng);
        const std::int64_t n = f.cells_per_axis();
        const std::int64_t a = static_cast<std::int64_t>(rng.below(n));
        const std::int64_t c = 1 + static_cast<std::int64_t>(rng.below(n));
        const AlignedCube q = interval(6, a, c);
        const double got = integrate(f, q);
        const double want = cell_sum_oracle(f, q);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("children sums equal the parent exactly") {
    RandomSource rng(11);
    for (int dim = 1; dim <= 2; ++dim) {
        const GridFunction f = random_grid(dim, 4, rng);
        for (int lev = 0; lev < 4; ++lev) {
            DyadicCube parent;
            parent.dim = dim;
            parent.level = lev;
            for (int a = 0; a < dim; ++a)
                parent.index[a] = static_cast<std::int64_t>(rng.below(1ULL << lev));
            double child_total = 0.0;
            for (int mask = 0; mask < (1 << dim); ++mask) {
                DyadicCube child;
                child.dim = dim;
                child.level = lev + 1;
                for (int a = 0; a < dim; ++a)
                    child.index[a] = 2 * parent.index[a] + ((mask >> (dim - 1 - a)) & 1);
                child_total += integrate(f, child);
            }
            CHECK(child_total == integrate(f, parent));  // bitwise
        }
    }
}

TEST_CASE("integrate rejects misaligned cubes") {
    const GridFunction f = GridFunction::constant(1, 3, 1.0);
    DyadicCube q;
    q.dim = 1;
    q.level = 5;  // finer than the grid
    CHECK_THROWS_AS(integrate(f, q), AlignmentError);

    DyadicCube shifted;
    shifted.dim = 1;
    shifted.level = 1;
    shifted.shift[0] = DyadicRational{1, 5};  // 1/32 is not a multiple of 1/8
    CHECK_THROWS_AS(integrate(f, shifted), AlignmentError);
}

TEST_CASE("lp_norm basics") {
    // indicator: ||chi_E||_r = |E|^{1/r}
    const GridFunction chi = GridFunction::indicator(interval(5, 3, 8));
    const double meas = 8.0 / 32.0;
    for (double r : {0.5, 1.0, 2.0, 3.0})
        CHECK(lp_norm(chi, r) == doctest::Approx(std::pow(meas, 1.0 / r)).epsilon(1e-14));

    const GridFunction one = GridFunction::constant(2, 3, 1.0);
    for (double r : {1.0, 2.5})
        CHECK(lp_norm(one, r) == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(lp_norm(one, 0.0), ParameterError);
    CHECK_THROWS_AS(lp_norm(one, -1.0), ParameterError);
}

TEST_CASE("lp_norm with weight matches brute force") {
    RandomSource rng(7);
    const GridFunction f = random_grid(1, 6, rng);
    const GridFunction rho = random_grid(1, 6, rng);
    const double r = 3.0;
    double want = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        want += std::pow(std::abs(f[i]), r) * rho[i] * f.cell_volume();
    want = std::pow(want, 1.0 / r);
    CHECK(lp_norm(f, r, &rho) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("lp_norm is 1-homogeneous") {
    RandomSource rng(3);
    const GridFunction f = random_grid(1, 5, rng);
    const double c = 3.7;
    CHECK(lp_norm(pointwise_scale(f, c), 2.5) ==
          doctest::Approx(c * lp_norm(f, 2.5)).epsilon(1e-13));
}

TEST_CASE("weak_lq_norm: indicators and zero") {
    const GridFunction chi = GridFunction::indicator(interval(4, 2, 4));
    const double meas = 4.0 / 16.0;
    for (double q : {1.0, 2.0, 3.5})
        CHECK(weak_lq_norm(chi, q) == doctest::Approx(std::pow(meas, 1.0 / q)).epsilon(1e-14));

    CHECK(weak_lq_norm(GridFunction::constant(1, 4, 0.0), 2.0) == 0.0);
}

TEST_CASE("weak_lq_norm matches the level-set oracle and Chebyshev") {
    RandomSource rng(19);
    for (int trial = 0; trial < 10; ++trial) {
        const GridFunction g = random_grid(1, 5, rng);
        const double q = 1.0 + rng.uniform01() * 3.0;
        // brute force over all level sets
        double want = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double lam = std::abs(g[i]);
            double meas = 0.0;
            for (std::size_t j = 0; j < g.size(); ++j)
                if (std::abs(g[j]) >= lam) meas += g.cell_volume();
            want = std::max(want, lam * std::pow(meas, 1.0 / q));
        }
        const double got = weak_lq_norm(g, q);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
        CHECK(got <= lp_norm(g, q) * (1.0 + 1e-12));
    }
}

TEST_CASE("translate: identity, inverse, indicator shift") {
    RandomSource rng(5);
    const GridFunction f = random_grid(1, 4, rng);
    const std::int64_t zero[] = {0};
    const GridFunction same = translate(f, zero);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(same[i] == f[i]);

    const std::int64_t t[] = {5};
    const std::int64_t back[] = {-5};
    const GridFunction round = translate(translate(f, t), back);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(round[i] == f[i]);

    // chi_[0,1/4) shifted by 1/2 on L=4 is chi_[1/2,3/4)
    const GridFunction chi = GridFunction::indicator(interval(4, 0, 4));
    const std::int64_t half[] = {8};
    const GridFunction moved = translate(chi, half);
    const GridFunction want = GridFunction::indicator(interval(4, 8, 4));
    for (std::size_t i = 0; i < chi.size(); ++i) CHECK(moved[i] == want[i]);
}

TEST_CASE("translate preserves norms") {
    RandomSource rng(23);
    const GridFunction f = random_grid(1, 5, rng);
    const std::int64_t t[] = {7};
    const GridFunction g = translate(f, t);
    CHECK(lp_norm(g, 2.0) == doctest::Approx(lp_norm(f, 2.0)).epsilon(1e-14));
    CHECK(weak_lq_norm(g, 1.5) == doctest::Approx(weak_lq_norm(f, 1.5)).epsilon(1e-14));
}

TEST_CASE("family enumeration counts and determinism") {
    CHECK(CubeFamily::dyadic(1, 2).enumerate().size() == 7);
    CHECK(CubeFamily::grid_aligned(1, 2).enumerate().size() == 10);
    CHECK(CubeFamily::dyadic(2, 2).enumerate().size() == 21);
    CHECK(CubeFamily::dyadic(1, 2).count() == 7);
    CHECK(CubeFamily::grid_aligned(1, 2).count() == 10);
    CHECK(CubeFamily::dyadic(2, 2).count() == 21);

    CHECK_THROWS_AS(CubeFamily::grid_aligned(2, 3), UnsupportedFamilyError);

    // stable order across calls
    const auto a = CubeFamily::all_cubes(2, 3).enumerate();
    const auto b = CubeFamily::all_cubes(2, 3).enumerate();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].start == b[i].start);
        CHECK(a[i].count == b[i].count);
    }
}

TEST_CASE("nested cubes: monotone integrals for nonnegative f") {
    RandomSource rng(31);
    const GridFunction f = random_grid(1, 5, rng);
    for (int lev = 1; lev <= 5; ++lev) {
        DyadicCube inner;
        inner.dim = 1;
        inner.level = lev;
        inner.index[0] = static_cast<std::int64_t>(rng.below(1ULL << lev));
        DyadicCube outer;
        outer.dim = 1;
        outer.level = lev - 1;
        outer.index[0] = inner.index[0] / 2;
        CHECK(integrate(f, inner) <= integrate(f, outer) * (1.0 + 1e-15));
    }
}

TEST_CASE("CellSums box queries match integrate") {
    RandomSource rng(13);
    for (int dim = 1; dim <= 2; ++dim) {
        const GridFunction f = random_grid(dim, 4, rng);
        const CellSums sums(f);
        const std::int64_t n = f.cells_per_axis();
        for (int trial = 0; trial < 50; ++trial) {
            AlignedCube q;
            q.dim = dim;
            q.grid_level = 4;
            for (int a = 0; a < dim; ++a) {
                q.start[a] = static_cast<std::int64_t>(rng.below(n));
                q.count[a] = 1 + static_cast<std::int64_t>(rng.below(n));
            }
            // wrapped boxes exercise the segment splitting
            CHECK(sums.box_sum(q) == doctest::Approx(integrate(f, q)).epsilon(1e-12));
        }
    }
}

TEST_CASE("grid function validation") {
    CHECK_THROWS_AS(GridFunction(1, 3, std::vector<double>(7)), ShapeError);
    CHECK_THROWS_AS(GridFunction(1, 2, {1.0, 2.0, std::nan(""), 4.0}), ParameterError);
    CHECK_THROWS_AS(GridFunction(1, 1, {1.0, -2.0}, true), ParameterError);
    CHECK_THROWS_AS(GridFunction(5, 1, std::vector<double>(32)), ShapeError);
}

TEST_CASE("tensor product and slices") {
    RandomSource rng(17);
    const GridFunction a = random_grid(1, 3, rng);
    const GridFunction b = random_grid(1, 3, rng);
    const GridFunction t = tensor_product(a, b);
    REQUIRE(t.dimension() == 2);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) {
            Index cell{static_cast<std::int64_t>(i), static_cast<std::int64_t>(j)};
            CHECK(t.at(cell) == a[i] * b[j]);
        }
    // slicing the first axis block at a frozen second coordinate recovers a*b[j]
    Index frozen{};
    frozen[1] = 2;
    const GridFunction s = slice(t, 0, 1, frozen);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(s[i] == a[i] * b[2]);
}
