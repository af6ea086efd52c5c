#include "mfrac/operators.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mfrac/parallel.hpp"

namespace mfrac {

namespace {

std::int64_t pow2(int e) { return std::int64_t{1} << e; }

std::int64_t wrap(std::int64_t x, std::int64_t n) {
    std::int64_t r = x % n;
    return r < 0 ? r + n : r;
}

void check_inputs(std::span<const GridFunction> fs, const ExponentConfig& cfg,
                  int expected_dim) {
    if (static_cast<int>(fs.size()) != cfg.m)
        throw ShapeError("operator expects m = " + std::to_string(cfg.m) + " inputs");
    for (const auto& f : fs) {
        if (f.dimension() != expected_dim)
            throw ShapeError("input dimension does not match n*k");
        require_same_grid(fs.front(), f);
    }
}

// |f_i| as cell data; copies only when a negative value is present.
std::vector<GridFunction> absolute(std::span<const GridFunction> fs) {
    std::vector<GridFunction> out;
    out.reserve(fs.size());
    for (const auto& f : fs) {
        bool neg = false;
        for (double v : f.values())
            if (v < 0.0) { neg = true; break; }
        if (!neg) {
            out.push_back(f);
        } else {
            std::vector<double> vals(f.size());
            for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = std::abs(f[i]);
            out.emplace_back(f.dimension(), f.level(), std::move(vals), true);
        }
    }
    return out;
}

struct ProductSums {
    std::vector<CellSums> s;

    explicit ProductSums(std::span<const GridFunction> fs) {
        s.reserve(fs.size());
        for (const auto& f : fs) s.emplace_back(f);
    }

    double box_product(const AlignedCube& q) const {
        double v = 1.0;
        for (const auto& cs : s) v *= cs.box_sum(q);
        return v;
    }
};

// Enumerate the cubes of `fam` containing `cell` whose side is at most
// max_cells cells, in a fixed order.
template <class Fn>
void cubes_containing(const CubeFamily& fam, const Index& cell, std::int64_t max_cells,
                      Fn&& fn) {
    const int dim = fam.dim();
    const int L = fam.level();
    const std::int64_t n = pow2(L);
    switch (fam.kind()) {
        case CubeFamily::Kind::GridAligned: {
            const std::int64_t x = cell[0];
            for (std::int64_t len = 1; len <= std::min(n, max_cells); ++len) {
                const std::int64_t a_lo = std::max<std::int64_t>(0, x - len + 1);
                const std::int64_t a_hi = std::min(x, n - len);
                for (std::int64_t a = a_lo; a <= a_hi; ++a) {
                    AlignedCube q;
                    q.dim = 1;
                    q.grid_level = L;
                    q.start[0] = a;
                    q.count[0] = len;
                    fn(q);
                }
            }
            return;
        }
        case CubeFamily::Kind::Dyadic:
        case CubeFamily::Kind::ShiftedDyadic: {
            std::array<std::int64_t, 4> offs{0, 0, 0, 0};
            std::size_t noffs = 1;
            if (fam.kind() == CubeFamily::Kind::ShiftedDyadic) {
                noffs = fam.shifts().size();
                for (std::size_t i = 0; i < noffs; ++i)
                    offs[i] = fam.shifts()[i].cells_at_level(L);
            }
            for (int lev = 0; lev <= L; ++lev) {
                const std::int64_t span = pow2(L - lev);
                if (span > max_cells) continue;
                for (std::size_t si = 0; si < noffs; ++si) {
                    AlignedCube q;
                    q.dim = dim;
                    q.grid_level = L;
                    for (int a = 0; a < dim; ++a) {
                        const std::int64_t rel = wrap(cell[a] - offs[si], n);
                        q.start[a] = wrap((rel / span) * span + offs[si], n);
                        q.count[a] = span;
                    }
                    fn(q);
                }
            }
            return;
        }
    }
}

GridFunction mfm_impl(std::span<const GridFunction> fs, const ExponentConfig& cfg,
                      const CubeFamily& fam, std::int64_t max_cells) {
    cfg.validate_basic();
    if (cfg.k != 1) throw ParameterError("plain maximal operator needs k = 1");
    check_inputs(fs, cfg, cfg.n);
    const auto abs_fs = absolute(fs);
    const GridFunction& f0 = abs_fs.front();
    if (fam.dim() != cfg.n || fam.level() != f0.level())
        throw ShapeError("cube family does not match the input grid");
    if (max_cells < 1) throw EmptyFamilyError("truncation cut below cell scale");

    const double expo = cfg.alpha[0] / cfg.n - cfg.m;
    ProductSums ps(abs_fs);
    std::vector<double> out(f0.size(), 0.0);
    parallel_for(out.size(), [&](std::size_t i) {
        const Index cell = f0.cell_of(i);
        double best = 0.0;
        cubes_containing(fam, cell, max_cells, [&](const AlignedCube& q) {
            const double v = std::pow(q.volume(), expo) * ps.box_product(q);
            best = std::max(best, v);
        });
        out[i] = best;
    });
    return GridFunction(f0.dimension(), f0.level(), std::move(out), true);
}

GridFunction strong_scan(const GridFunction& model, const CubeFamily& fam1,
                         const CubeFamily& fam2, std::int64_t max_cells, int n,
                         const std::vector<double>& factor_expos, const ProductSums& ps) {
    std::vector<double> out(model.size(), 0.0);
    parallel_for(out.size(), [&](std::size_t i) {
        const Index cell = model.cell_of(i);
        Index c1{};
        Index c2{};
        for (int a = 0; a < n; ++a) {
            c1[a] = cell[a];
            c2[a] = cell[n + a];
        }
        // factor-1 cubes are collected once, then paired with every factor-2 cube
        std::vector<AlignedCube> first;
        cubes_containing(fam1, c1, max_cells, [&](const AlignedCube& q) { first.push_back(q); });
        double best = 0.0;
        cubes_containing(fam2, c2, max_cells, [&](const AlignedCube& q2) {
            const double w2 = std::pow(q2.volume(), factor_expos[1]);
            for (const auto& q1 : first) {
                AlignedCube box;
                box.dim = 2 * n;
                box.grid_level = model.level();
                for (int a = 0; a < n; ++a) {
                    box.start[a] = q1.start[a];
                    box.count[a] = q1.count[a];
                    box.start[n + a] = q2.start[a];
                    box.count[n + a] = q2.count[a];
                }
                const double v =
                    std::pow(q1.volume(), factor_expos[0]) * w2 * ps.box_product(box);
                best = std::max(best, v);
            }
        });
        out[i] = best;
    });
    return GridFunction(model.dimension(), model.level(), std::move(out), true);
}

GridFunction strong_mfm_impl(std::span<const GridFunction> fs, const ExponentConfig& cfg,
                             const CubeFamily& fam1, const CubeFamily& fam2,
                             std::int64_t max_cells) {
    cfg.validate_basic();
    if (cfg.k != 2) throw ParameterError("strong operator needs k = 2");
    check_inputs(fs, cfg, cfg.domain_dim());
    const auto abs_fs = absolute(fs);
    const GridFunction& f0 = abs_fs.front();
    if (fam1.dim() != cfg.n || fam2.dim() != cfg.n || fam1.level() != f0.level() ||
        fam2.level() != f0.level())
        throw ShapeError("factor families do not match the input grid");
    if (max_cells < 1) throw EmptyFamilyError("truncation cut below cell scale");

    std::vector<double> expos = {cfg.alpha[0] / cfg.n - cfg.m, cfg.alpha[1] / cfg.n - cfg.m};
    ProductSums ps(abs_fs);
    return strong_scan(f0, fam1, fam2, max_cells, cfg.n, expos, ps);
}

// --- potential kernels --------------------------------------------------------

// Integral over [-h, h]^{mn} of (sum_i |z_i|)^{-(mn - alpha)} dz, singularity at
// the origin. The kernel is even per coordinate, so this is 2^{mn} times the
// integral over [0, h]^{mn}, which is evaluated by recursive corner refinement:
// at each of `depth` stages the origin box is split into 2^{mn} children, the
// non-origin children get the center rule, and the origin child recurses. The
// final unrefined micro-box is dropped; its kernel mass is O(2^{-depth*alpha}).
double singular_box_integral(double h, int m, int n, double alpha, int depth) {
    const int d = m * n;
    const double expo = -(static_cast<double>(m * n) - alpha);
    double total = 0.0;
    double a = h;
    for (int stage = 0; stage < depth; ++stage) {
        for (int mask = 1; mask < (1 << d); ++mask) {
            double ksum = 0.0;
            for (int i = 0; i < m; ++i) {
                double s2 = 0.0;
                for (int dd = 0; dd < n; ++dd) {
                    const double c = ((mask >> (i * n + dd)) & 1) ? 0.75 * a : 0.25 * a;
                    s2 += c * c;
                }
                ksum += std::sqrt(s2);
            }
            total += std::pow(0.5 * a, d) * std::pow(ksum, expo);
        }
        a *= 0.5;
    }
    return std::ldexp(total, d);
}

// distance between two points of [0,1)^n per metric
double point_distance(const std::array<double, kMaxDim>& x, const std::array<double, kMaxDim>& y,
                      int axis0, int n, DistanceMode metric) {
    double s2 = 0.0;
    for (int a = 0; a < n; ++a) {
        double d = std::abs(x[axis0 + a] - y[axis0 + a]);
        if (metric == DistanceMode::Torus) d = std::min(d, 1.0 - d);
        s2 += d * d;
    }
    return std::sqrt(s2);
}

void check_cost(double terms, double cap) {
    if (terms > cap)
        throw CostCapError("evaluation refused: " + std::to_string(terms) +
                           " kernel terms exceed the cost cap of " + std::to_string(cap));
}

} // namespace

// --- public maximal operators ---------------------------------------------------

GridFunction mfm(std::span<const GridFunction> fs, const ExponentConfig& cfg,
                 const CubeFamily& fam) {
    return mfm_impl(fs, cfg, fam, pow2(fam.level()));
}

GridFunction mfm_dyadic(std::span<const GridFunction> fs, const ExponentConfig& cfg) {
    const int L = fs.empty() ? 0 : fs.front().level();
    return mfm_impl(fs, cfg, CubeFamily::dyadic(cfg.n, L), pow2(L));
}

GridFunction mfm_truncated(std::span<const GridFunction> fs, const ExponentConfig& cfg,
                           int k_max) {
    // sup over the full default family, restricted to side <= 2^k_max
    const int L = fs.empty() ? 0 : fs.front().level();
    if (k_max < -L) throw EmptyFamilyError("2^k_max is below cell scale");
    const std::int64_t max_cells = k_max >= 0 ? pow2(L) : pow2(L + k_max);
    return mfm_impl(fs, cfg, CubeFamily::all_cubes(cfg.n, L), max_cells);
}

GridFunction strong_mfm(std::span<const GridFunction> fs, const ExponentConfig& cfg,
                        const CubeFamily& fam1, const CubeFamily& fam2) {
    const int L = fs.empty() ? 0 : fs.front().level();
    return strong_mfm_impl(fs, cfg, fam1, fam2, pow2(L));
}

GridFunction strong_mfm_dyadic(std::span<const GridFunction> fs, const ExponentConfig& cfg) {
    const int L = fs.empty() ? 0 : fs.front().level();
    return strong_mfm_impl(fs, cfg, CubeFamily::dyadic(cfg.n, L), CubeFamily::dyadic(cfg.n, L),
                           pow2(L));
}

GridFunction strong_mfm_truncated(std::span<const GridFunction> fs, const ExponentConfig& cfg,
                                  int k_max) {
    const int L = fs.empty() ? 0 : fs.front().level();
    if (k_max < -L) throw EmptyFamilyError("2^k_max is below cell scale");
    const std::int64_t max_cells = k_max >= 0 ? pow2(L) : pow2(L + k_max);
    return strong_mfm_impl(fs, cfg, CubeFamily::all_cubes(cfg.n, L),
                           CubeFamily::all_cubes(cfg.n, L), max_cells);
}

GridFunction fs_majorant(const GridFunction& v, const ExponentConfig& cfg,
                         const CubeFamily& fam1, const CubeFamily& fam2) {
    cfg.validate_basic();
    if (cfg.k != 2) throw ParameterError("fs_majorant needs k = 2");
    if (v.dimension() != cfg.domain_dim()) throw ShapeError("v dimension does not match n*k");
    const double p = cfg.p_total();
    std::vector<double> expos = {cfg.q * (cfg.alpha[0] / cfg.n - 1.0 / p),
                                 cfg.q * (cfg.alpha[1] / cfg.n - 1.0 / p)};
    const GridFunction vs[] = {v};
    ProductSums ps(vs);
    return strong_scan(v, fam1, fam2, pow2(v.level()), cfg.n, expos, ps);
}

GridFunction shift_conjugated_dyadic(std::span<const GridFunction> fs,
                                     const ExponentConfig& cfg,
                                     std::span<const std::int64_t> t_cells) {
    std::vector<GridFunction> shifted;
    shifted.reserve(fs.size());
    for (const auto& f : fs) shifted.push_back(translate(f, t_cells));
    GridFunction res = cfg.k == 1 ? mfm_dyadic(shifted, cfg) : strong_mfm_dyadic(shifted, cfg);
    std::vector<std::int64_t> back(t_cells.size());
    for (std::size_t i = 0; i < back.size(); ++i) back[i] = -t_cells[i];
    return translate(res, back);
}

// --- potential operators ---------------------------------------------------------

GridFunction mfi(std::span<const GridFunction> fs, const ExponentConfig& cfg,
                 const MfiOptions& opt) {
    cfg.validate_basic();
    if (cfg.k != 1) throw ParameterError("mfi needs k = 1");
    if (!(cfg.alpha[0] > 0.0)) throw ParameterError("mfi requires alpha > 0");
    check_inputs(fs, cfg, cfg.n);
    const auto abs_fs = absolute(fs);
    const GridFunction& f0 = abs_fs.front();
    const std::size_t cells = f0.size();
    check_cost(std::pow(static_cast<double>(cells), cfg.m + 1), opt.cost_cap);

    const int m = cfg.m;
    const int n = cfg.n;
    const double kexpo = -(static_cast<double>(m * n) - cfg.alpha[0]);
    const double vol = f0.cell_volume();
    const double h = 0.5 * std::ldexp(1.0, -f0.level());
    const double i_sing = singular_box_integral(h, m, n, cfg.alpha[0], opt.refine_depth);

    std::vector<std::array<double, kMaxDim>> centers(cells);
    for (std::size_t c = 0; c < cells; ++c) centers[c] = f0.cell_center(c);

    std::vector<double> out(cells, 0.0);
    parallel_for(cells, [&](std::size_t xi) {
        std::vector<double> dist(cells);
        for (std::size_t c = 0; c < cells; ++c)
            dist[c] = point_distance(centers[xi], centers[c], 0, n, opt.metric);

        double total = 0.0;
        if (m == 1) {
            for (std::size_t c = 0; c < cells; ++c) {
                if (c == xi) continue;
                total += abs_fs[0][c] * vol * std::pow(dist[c], kexpo);
            }
            total += abs_fs[0][xi] * i_sing;
        } else if (m == 2) {
            // the kernel depends on the pair only through the two distances;
            // tabulating it replaces pow by a lookup in the inner loop
            const auto& fa = abs_fs[0];
            const auto& fb = abs_fs[1];
            const double volm = vol * vol;
            std::vector<double> kern(cells * cells);
            for (std::size_t c1 = 0; c1 < cells; ++c1)
                for (std::size_t c2 = 0; c2 < cells; ++c2)
                    kern[c1 * cells + c2] = c1 == xi && c2 == xi
                                                ? 0.0
                                                : volm * std::pow(dist[c1] + dist[c2], kexpo);
            for (std::size_t c1 = 0; c1 < cells; ++c1) {
                if (fa[c1] == 0.0) continue;
                double row = 0.0;
                const double* krow = kern.data() + c1 * cells;
                for (std::size_t c2 = 0; c2 < cells; ++c2) row += fb[c2] * krow[c2];
                total += fa[c1] * row;
            }
            total += fa[xi] * fb[xi] * i_sing;
        } else {
            // generic odometer over m-tuples of cells
            std::vector<std::size_t> tup(m, 0);
            const double volm = std::pow(vol, m);
            while (true) {
                bool all_diag = true;
                double dsum = 0.0;
                double fprod = 1.0;
                for (int i = 0; i < m; ++i) {
                    if (tup[i] != xi) all_diag = false;
                    dsum += dist[tup[i]];
                    fprod *= abs_fs[i][tup[i]];
                }
                if (all_diag)
                    total += fprod * i_sing;
                else if (fprod != 0.0)
                    total += fprod * volm * std::pow(dsum, kexpo);
                int i = m - 1;
                while (i >= 0) {
                    if (++tup[i] < cells) break;
                    tup[i] = 0;
                    --i;
                }
                if (i < 0) break;
            }
        }
        out[xi] = total;
    });
    return GridFunction(f0.dimension(), f0.level(), std::move(out), true);
}

GridFunction strong_mfi(std::span<const GridFunction> fs, const ExponentConfig& cfg,
                        const MfiOptions& opt) {
    cfg.validate_basic();
    if (cfg.k != 2) throw ParameterError("strong_mfi needs k = 2");
    for (double a : cfg.alpha)
        if (!(a > 0.0)) throw ParameterError("strong_mfi requires alpha_s > 0");
    check_inputs(fs, cfg, cfg.domain_dim());
    const auto abs_fs = absolute(fs);
    const GridFunction& f0 = abs_fs.front();
    const std::size_t cells = f0.size();
    check_cost(std::pow(static_cast<double>(cells), cfg.m + 1), opt.cost_cap);

    const int m = cfg.m;
    const int n = cfg.n;
    const std::size_t fcells = std::size_t{1} << (n * f0.level());  // cells per factor
    const double fvol = std::ldexp(1.0, -n * f0.level());
    const double h = 0.5 * std::ldexp(1.0, -f0.level());
    const double kexpo[2] = {-(static_cast<double>(m * n) - cfg.alpha[0]),
                             -(static_cast<double>(m * n) - cfg.alpha[1])};
    const double i_sing[2] = {singular_box_integral(h, m, n, cfg.alpha[0], opt.refine_depth),
                              singular_box_integral(h, m, n, cfg.alpha[1], opt.refine_depth)};
    const double fvolm = std::pow(fvol, m);

    // factor-cell centers (an n-dim grid at the same level)
    const GridFunction factor_model = GridFunction::constant(n, f0.level(), 0.0);
    std::vector<std::array<double, kMaxDim>> fcenters(fcells);
    for (std::size_t c = 0; c < fcells; ++c) fcenters[c] = factor_model.cell_center(c);

    std::vector<double> out(cells, 0.0);
    parallel_for(cells, [&](std::size_t xi) {
        const std::size_t xf[2] = {xi / fcells, xi % fcells};
        std::vector<double> dist1(fcells);
        std::vector<double> dist2(fcells);
        for (std::size_t c = 0; c < fcells; ++c) {
            dist1[c] = point_distance(fcenters[xf[0]], fcenters[c], 0, n, opt.metric);
            dist2[c] = point_distance(fcenters[xf[1]], fcenters[c], 0, n, opt.metric);
        }
        double total = 0.0;
        if (m == 2) {
            // per-factor kernel tables over factor-cell pairs; the tuple sum
            // is then pure multiply-adds
            std::vector<double> k1(fcells * fcells);
            std::vector<double> k2(fcells * fcells);
            for (std::size_t a = 0; a < fcells; ++a)
                for (std::size_t b = 0; b < fcells; ++b) {
                    k1[a * fcells + b] = a == xf[0] && b == xf[0]
                                             ? i_sing[0]
                                             : fvolm * std::pow(dist1[a] + dist1[b], kexpo[0]);
                    k2[a * fcells + b] = a == xf[1] && b == xf[1]
                                             ? i_sing[1]
                                             : fvolm * std::pow(dist2[a] + dist2[b], kexpo[1]);
                }
            for (std::size_t c1 = 0; c1 < cells; ++c1) {
                const double f1 = abs_fs[0][c1];
                if (f1 == 0.0) continue;
                const std::size_t c1f1 = c1 / fcells, c1f2 = c1 % fcells;
                const double* k1row = k1.data() + c1f1 * fcells;
                const double* k2row = k2.data() + c1f2 * fcells;
                double row = 0.0;
                for (std::size_t c2 = 0; c2 < cells; ++c2)
                    row += abs_fs[1][c2] * k1row[c2 / fcells] * k2row[c2 % fcells];
                total += f1 * row;
            }
        } else {
            std::vector<std::size_t> tup(m, 0);  // full-domain cell per slot
            while (true) {
                double fprod = 1.0;
                for (int i = 0; i < m; ++i) fprod *= abs_fs[i][tup[i]];
                if (fprod != 0.0) {
                    double term = fprod;
                    for (int s = 0; s < 2; ++s) {
                        bool diag = true;
                        double dsum = 0.0;
                        for (int i = 0; i < m; ++i) {
                            const std::size_t fc = s == 0 ? tup[i] / fcells : tup[i] % fcells;
                            if (fc != xf[s]) diag = false;
                            dsum += s == 0 ? dist1[fc] : dist2[fc];
                        }
                        term *= diag ? i_sing[s] : fvolm * std::pow(dsum, kexpo[s]);
                    }
                    total += term;
                }
                int i = m - 1;
                while (i >= 0) {
                    if (++tup[i] < cells) break;
                    tup[i] = 0;
                    --i;
                }
                if (i < 0) break;
            }
        }
        out[xi] = total;
    });
    return GridFunction(f0.dimension(), f0.level(), std::move(out), true);
}

// --- operator specification -------------------------------------------------------

OperatorKind parse_operator_kind(const std::string& name) {
    if (name == "mfm") return OperatorKind::MFM;
    if (name == "mfm-dyadic") return OperatorKind::MFM_DYADIC;
    if (name == "mfm-truncated") return OperatorKind::MFM_TRUNCATED;
    if (name == "mfi") return OperatorKind::MFI;
    if (name == "strong-mfm") return OperatorKind::STRONG_MFM;
    if (name == "strong-mfm-dyadic") return OperatorKind::STRONG_MFM_DYADIC;
    if (name == "strong-mfm-truncated") return OperatorKind::STRONG_MFM_TRUNCATED;
    if (name == "strong-mfi") return OperatorKind::STRONG_MFI;
    if (name == "fs-majorant") return OperatorKind::FS_MAJORANT;
    throw ConfigError("unknown operator kind: " + name);
}

std::string operator_kind_name(OperatorKind k) {
    switch (k) {
        case OperatorKind::MFM: return "mfm";
        case OperatorKind::MFM_DYADIC: return "mfm-dyadic";
        case OperatorKind::MFM_TRUNCATED: return "mfm-truncated";
        case OperatorKind::MFI: return "mfi";
        case OperatorKind::STRONG_MFM: return "strong-mfm";
        case OperatorKind::STRONG_MFM_DYADIC: return "strong-mfm-dyadic";
        case OperatorKind::STRONG_MFM_TRUNCATED: return "strong-mfm-truncated";
        case OperatorKind::STRONG_MFI: return "strong-mfi";
        case OperatorKind::FS_MAJORANT: return "fs-majorant";
    }
    return "?";
}

bool OperatorSpec::is_maximal() const {
    return kind != OperatorKind::MFI && kind != OperatorKind::STRONG_MFI;
}

bool OperatorSpec::is_strong() const {
    switch (kind) {
        case OperatorKind::STRONG_MFM:
        case OperatorKind::STRONG_MFM_DYADIC:
        case OperatorKind::STRONG_MFM_TRUNCATED:
        case OperatorKind::STRONG_MFI:
        case OperatorKind::FS_MAJORANT: return true;
        default: return false;
    }
}

CubeFamily OperatorSpec::factor_family(int level) const {
    switch (kind) {
        case OperatorKind::MFM_DYADIC:
        case OperatorKind::STRONG_MFM_DYADIC: return CubeFamily::dyadic(cfg.n, level);
        default: return CubeFamily::of_kind(family, cfg.n, level);
    }
}

GridFunction OperatorSpec::apply(std::span<const GridFunction> fs) const {
    const int L = fs.empty() ? 0 : fs.front().level();
    switch (kind) {
        case OperatorKind::MFM: return mfm(fs, cfg, factor_family(L));
        case OperatorKind::MFM_DYADIC: return mfm_dyadic(fs, cfg);
        case OperatorKind::MFM_TRUNCATED: return mfm_truncated(fs, cfg, k_max);
        case OperatorKind::MFI: return mfi(fs, cfg, quad);
        case OperatorKind::STRONG_MFM:
            return strong_mfm(fs, cfg, factor_family(L), factor_family(L));
        case OperatorKind::STRONG_MFM_DYADIC: return strong_mfm_dyadic(fs, cfg);
        case OperatorKind::STRONG_MFM_TRUNCATED: return strong_mfm_truncated(fs, cfg, k_max);
        case OperatorKind::STRONG_MFI: return strong_mfi(fs, cfg, quad);
        case OperatorKind::FS_MAJORANT: {
            if (fs.size() != 1) throw ShapeError("fs-majorant takes a single function");
            return fs_majorant(fs.front(), cfg, factor_family(L), factor_family(L));
        }
    }
    throw ParameterError("unknown operator kind");
}

} // namespace mfrac
