#include "pilotgeom/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <thread>

namespace pilotgeom {

namespace {

int worker_count(int jobs) {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("PILOTGEOM_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) n = std::min(n, cap);
    }
    return std::min(n, jobs);
}

// index in [0, n) without touching the stream more than once
int uniform_index(RngStream& rng, int n) {
    return std::min(n - 1, static_cast<int>(rng.uniform() * n));
}

template <typename T>
void shuffle_vec(std::vector<T>& v, RngStream& rng) {
    for (int i = static_cast<int>(v.size()) - 1; i > 0; --i)
        std::swap(v[i], v[uniform_index(rng, i + 1)]);
}

// assign up to pool.size() distinct pilots to the given users, both sides in
// random order; users beyond the pool stay unassigned
void assign_pool(std::vector<UserRecord>& users, std::vector<int> user_idx,
                 std::vector<int> pool, RngStream& rng) {
    shuffle_vec(user_idx, rng);
    shuffle_vec(pool, rng);
    const std::size_t n = std::min(user_idx.size(), pool.size());
    for (std::size_t i = 0; i < n; ++i) users[user_idx[i]].pilot = pool[i];
}

}  // namespace

Realization run_realization(const NetworkConfig& cfg, const SimOptions& opts,
                            RngStream& rng) {
    cfg.validate();
    const double r_c = cfg.r_c();
    Realization real;
    real.seed = rng.seed();
    real.stream_id = rng.stream_id();

    Window window;
    window.half_width = opts.window_factor / std::sqrt(cfg.lambda0);
    window.guard_band = opts.guard_factor / std::sqrt(cfg.lambda0);

    real.bs = sample_ppp(cfg.lambda0, window, rng);
    if (opts.condition_origin_bs) real.bs.points.push_back({0.0, 0.0});
    const int n_bs = static_cast<int>(real.bs.points.size());
    if (n_bs == 0) return real;

    const double neighbor_radius = 6.0 / std::sqrt(cfg.lambda0);
    real.cells.reserve(n_bs);
    real.interior.resize(n_bs, 0);
    double best_dist2 = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n_bs; ++j) {
        const Vec2 bs = real.bs.points[j];
        std::vector<Vec2> poly = detail::voronoi_polygon(
            j, real.bs, neighbor_radius, neighbor_radius);
        // keep boundary cells inside the observation window
        const double hw = window.half_width;
        for (const Vec2 edge : {Vec2{hw, 0}, Vec2{-hw, 0}, Vec2{0, hw}, Vec2{0, -hw}}) {
            poly = detail::clip_halfplane(poly, edge, edge);
            if (poly.size() < 3) break;
        }
        double nn2 = std::numeric_limits<double>::infinity();
        for (int k = 0; k < n_bs; ++k) {
            if (k == j) continue;
            nn2 = std::min(nn2, norm2(real.bs.points[k] - bs));
        }
        const double r_m = std::isfinite(nn2) ? 0.5 * std::sqrt(nn2) : 0.0;
        real.cells.push_back(detail::finish_cell(j, bs, std::move(poly), r_m, r_c));
        real.interior[j] = window.in_interior(bs) ? 1 : 0;
        if (real.interior[j]) {
            const double d2 = norm2(bs);
            if (d2 < best_dist2) {
                best_dist2 = d2;
                real.tagged = j;
            }
        }
    }

    // users: zero-truncated Poisson loads placed uniformly per region
    real.ce_group.assign(n_bs, -1);
    for (int j = 0; j < n_bs; ++j) {
        const CellGeometry& cell = real.cells[j];
        if (cell.cc_area <= 0.0 || cell.polygon.size() < 3) continue;
        const int n_cc = rng.zero_truncated_poisson(cfg.lambda_u * cell.cc_area);
        for (int u = 0; u < n_cc; ++u)
            real.users.push_back({sample_in_region(cell, RegionKind::cell_center, rng),
                                  j, RegionKind::cell_center, -1});
        if (cell.has_ce_region) {
            const int n_ce =
                rng.zero_truncated_poisson(cfg.lambda_u * cell.ce_area);
            for (int u = 0; u < n_ce; ++u)
                real.users.push_back({sample_in_region(cell, RegionKind::cell_edge, rng),
                                      j, RegionKind::cell_edge, -1});
            real.ce_group[j] = opts.ce_group_mode == CeGroupMode::random_group
                                   ? uniform_index(rng, cfg.plan.reuse_factor)
                                   : 0;
        }
    }

    // pilot assignment
    std::vector<std::vector<int>> cc_users(n_bs), ce_users(n_bs);
    for (int i = 0; i < static_cast<int>(real.users.size()); ++i) {
        const UserRecord& u = real.users[i];
        (u.kind == RegionKind::cell_center ? cc_users : ce_users)[u.cell]
            .push_back(i);
    }
    for (int j = 0; j < n_bs; ++j) {
        if (opts.mode == PilotMode::reuse1) {
            std::vector<int> everyone = cc_users[j];
            everyone.insert(everyone.end(), ce_users[j].begin(),
                            ce_users[j].end());
            std::vector<int> pool(cfg.plan.total);
            std::iota(pool.begin(), pool.end(), 0);
            assign_pool(real.users, std::move(everyone), std::move(pool), rng);
            continue;
        }
        std::vector<int> cc_pool(cfg.plan.cc_count);
        std::iota(cc_pool.begin(), cc_pool.end(), 0);
        assign_pool(real.users, cc_users[j], std::move(cc_pool), rng);
        if (real.ce_group[j] >= 0 && cfg.plan.ce_count > 0) {
            std::vector<int> ce_pool(cfg.plan.ce_count);
            std::iota(ce_pool.begin(), ce_pool.end(),
                      cfg.plan.cc_count + real.ce_group[j] * cfg.plan.ce_count);
            assign_pool(real.users, ce_users[j], std::move(ce_pool), rng);
        }
    }

    real.users_by_pilot.assign(cfg.plan.total, {});
    for (int i = 0; i < static_cast<int>(real.users.size()); ++i)
        if (real.users[i].pilot >= 0)
            real.users_by_pilot[real.users[i].pilot].push_back(i);
    return real;
}

std::optional<double> tagged_sinr(const Realization& real, RegionKind kind,
                                  int pilot, double alpha) {
    if (real.tagged < 0 || pilot < 0 ||
        pilot >= static_cast<int>(real.users_by_pilot.size()))
        return std::nullopt;
    const Vec2 bs = real.bs.points[real.tagged];
    const UserRecord* tagged_user = nullptr;
    double interference = 0.0;
    for (int idx : real.users_by_pilot[pilot]) {
        const UserRecord& u = real.users[idx];
        if (u.cell == real.tagged) {
            if (u.kind == kind) tagged_user = &u;
        } else {
            interference += std::pow(norm2(u.pos - bs), -alpha);
        }
    }
    if (!tagged_user) return std::nullopt;
    const double signal = std::pow(norm2(tagged_user->pos - bs), -alpha);
    if (interference == 0.0)
        return std::numeric_limits<double>::infinity();
    return signal / interference;
}

namespace {

struct RealizationTally {
    std::vector<double> covered_cc, covered_ce;  // per threshold
    double used_cc = 0.0, used_ce = 0.0;
    bool has_edge = false;
    bool valid = false;
    double cc_user_se = 0.0, ce_user_se = 0.0, cell_se = 0.0;
    long cc_user_count = 0, ce_user_count = 0;
    long infinite_sinr = 0;
    // per-interior-cell pilot diagnostics
    long cells = 0, cells_with_edge = 0, cells_using_cc0 = 0,
         cells_using_ce0 = 0, assign_cells = 0;
    double assign_fraction_sum = 0.0;
};

RealizationTally tally_realization(const NetworkConfig& cfg,
                                   const SimOptions& opts,
                                   const std::vector<double>& thresholds,
                                   RngStream stream) {
    RealizationTally t;
    Realization real = run_realization(cfg, opts, stream);
    if (real.tagged < 0) return t;
    t.valid = true;
    t.covered_cc.assign(thresholds.size(), 0.0);
    t.covered_ce.assign(thresholds.size(), 0.0);
    t.has_edge = real.cells[real.tagged].has_ce_region;
    const double alpha = cfg.alpha;
    const double overhead =
        1.0 - static_cast<double>(cfg.plan.total) / cfg.plan.coherence_symbols;

    // one pass: per-pilot interference at the tagged BS and the tagged user
    const Vec2 bs0 = real.bs.points[real.tagged];
    std::vector<double> interference(cfg.plan.total, 0.0);
    std::vector<int> tagged_user(cfg.plan.total, -1);
    for (int i = 0; i < static_cast<int>(real.users.size()); ++i) {
        const UserRecord& u = real.users[i];
        if (u.pilot < 0) continue;
        if (u.cell == real.tagged)
            tagged_user[u.pilot] = i;
        else
            interference[u.pilot] += std::pow(norm2(u.pos - bs0), -alpha);
    }
    auto pilot_sinr = [&](int p) -> double {
        const UserRecord& u = real.users[tagged_user[p]];
        if (interference[p] == 0.0)
            return std::numeric_limits<double>::infinity();
        return std::pow(norm2(u.pos - bs0), -alpha) / interference[p];
    };

    // coverage samples: every pilot in use in the tagged cell
    for (int p = 0; p < cfg.plan.total; ++p) {
        if (tagged_user[p] < 0) continue;
        const RegionKind kind = real.users[tagged_user[p]].kind;
        const double sinr = pilot_sinr(p);
        const bool infinite = std::isinf(sinr);
        if (infinite) ++t.infinite_sinr;
        auto& covered =
            kind == RegionKind::cell_center ? t.covered_cc : t.covered_ce;
        (kind == RegionKind::cell_center ? t.used_cc : t.used_ce) += 1.0;
        for (std::size_t i = 0; i < thresholds.size(); ++i)
            if (infinite || sinr >= thresholds[i]) covered[i] += 1.0;
        if (!infinite) t.cell_se += overhead * std::log2(1.0 + sinr);
    }

    // user SE: average over the tagged cell's users of either class;
    // unassigned users contribute zero, infinite-SINR samples are excluded
    for (const UserRecord& u : real.users) {
        if (u.cell != real.tagged) continue;
        double se = 0.0;
        if (u.pilot >= 0) {
            const double sinr = pilot_sinr(u.pilot);
            if (std::isinf(sinr)) continue;
            se = std::log2(1.0 + sinr);
        }
        if (u.kind == RegionKind::cell_center) {
            t.cc_user_se += overhead * se;
            ++t.cc_user_count;
        } else {
            t.ce_user_se += overhead * se;
            ++t.ce_user_count;
        }
    }
    if (t.cc_user_count > 0) t.cc_user_se /= t.cc_user_count;
    if (t.ce_user_count > 0) t.ce_user_se /= t.ce_user_count;

    // per-cell pilot diagnostics over interior cells; the assignment rate is
    // cell-averaged (a uniform user of the typical cell), not user-pooled
    std::vector<char> cc0_used(real.cells.size(), 0), ce0_used(real.cells.size(), 0);
    std::vector<int> cc_count(real.cells.size(), 0), cc_assigned(real.cells.size(), 0);
    for (const UserRecord& u : real.users) {
        if (u.pilot == 0) cc0_used[u.cell] = 1;
        if (u.pilot == cfg.plan.cc_count) ce0_used[u.cell] = 1;
        if (u.kind == RegionKind::cell_center) {
            ++cc_count[u.cell];
            if (u.pilot >= 0) ++cc_assigned[u.cell];
        }
    }
    for (std::size_t j = 0; j < real.cells.size(); ++j) {
        if (!real.interior[j]) continue;
        ++t.cells;
        if (real.cells[j].has_ce_region) ++t.cells_with_edge;
        if (cc0_used[j]) ++t.cells_using_cc0;
        if (ce0_used[j]) ++t.cells_using_ce0;
        if (cc_count[j] > 0 && opts.mode == PilotMode::fpr) {
            ++t.assign_cells;
            t.assign_fraction_sum +=
                static_cast<double>(cc_assigned[j]) / cc_count[j];
        }
    }
    return t;
}

}  // namespace

SimulationSummary run_experiment(const NetworkConfig& cfg,
                                 const SimOptions& opts,
                                 const std::vector<double>& thresholds_db,
                                 int n_realizations, std::uint64_t seed) {
    if (n_realizations < 1)
        throw std::invalid_argument("run_experiment: need >= 1 realization");
    std::vector<double> thresholds(thresholds_db.size());
    for (std::size_t i = 0; i < thresholds.size(); ++i)
        thresholds[i] = std::pow(10.0, thresholds_db[i] / 10.0);

    const RngStream base(seed, 0);
    std::vector<RealizationTally> tallies(n_realizations);
    const int workers = worker_count(n_realizations);
    std::atomic<int> next{0};
    auto work = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n_realizations) return;
            tallies[i] =
                tally_realization(cfg, opts, thresholds, base.substream(i));
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    // ordered reduction
    SimulationSummary out;
    out.seed = seed;
    out.realizations = n_realizations;
    out.mode = opts.mode;

    const std::size_t nt = thresholds.size();
    std::vector<double> cov_cc(nt, 0.0), cov_ce(nt, 0.0);
    double used_cc = 0.0, used_ce = 0.0;
    double se_cc_sum = 0.0, se_cc_sq = 0.0;
    double se_ce_sum = 0.0, se_ce_sq = 0.0;
    double se_cell_sum = 0.0, se_cell_sq = 0.0;
    long n_valid = 0, n_edge = 0, infinite_sinr = 0;
    long cells = 0, cells_with_edge = 0, cc0 = 0, ce0 = 0, assign_cells = 0;
    double assign_fraction = 0.0;
    for (const RealizationTally& t : tallies) {
        if (!t.valid) continue;
        ++n_valid;
        for (std::size_t i = 0; i < nt; ++i) {
            cov_cc[i] += t.covered_cc[i];
            cov_ce[i] += t.covered_ce[i];
        }
        used_cc += t.used_cc;
        used_ce += t.used_ce;
        if (t.cc_user_count > 0) {
            se_cc_sum += t.cc_user_se;
            se_cc_sq += t.cc_user_se * t.cc_user_se;
        }
        if (t.has_edge) {
            ++n_edge;
            se_ce_sum += t.ce_user_se;
            se_ce_sq += t.ce_user_se * t.ce_user_se;
        }
        se_cell_sum += t.cell_se;
        se_cell_sq += t.cell_se * t.cell_se;
        infinite_sinr += t.infinite_sinr;
        cells += t.cells;
        cells_with_edge += t.cells_with_edge;
        cc0 += t.cells_using_cc0;
        ce0 += t.cells_using_ce0;
        assign_cells += t.assign_cells;
        assign_fraction += t.assign_fraction_sum;
    }

    auto ratio_curve = [&](const std::vector<double>& cov, double used,
                           bool edge_only) {
        Curve c;
        c.x = thresholds_db;
        c.y.resize(nt, 0.0);
        c.se.resize(nt, 0.0);
        c.n.resize(nt, static_cast<long>(used));
        for (std::size_t i = 0; i < nt; ++i) {
            if (used <= 0.0) continue;
            const double p = cov[i] / used;
            c.y[i] = p;
            double var = 0.0;  // cluster-robust across realizations
            for (const RealizationTally& t : tallies) {
                if (!t.valid || (edge_only && !t.has_edge)) continue;
                const double ci = edge_only ? t.covered_ce[i] : t.covered_cc[i];
                const double ui = edge_only ? t.used_ce : t.used_cc;
                const double d = ci - p * ui;
                var += d * d;
            }
            c.se[i] = std::sqrt(var) / used;
        }
        return c;
    };
    out.curves["coverage_cc"] = ratio_curve(cov_cc, used_cc, false);
    out.curves["coverage_ce"] = ratio_curve(cov_ce, used_ce, true);

    auto put_mean = [&](const std::string& name, double sum, double sq,
                        long n) {
        const double mean = n > 0 ? sum / n : 0.0;
        out.scalars[name] = mean;
        out.scalars[name + "_se"] =
            n > 1 ? std::sqrt(std::max(0.0, sq / n - mean * mean) / (n - 1))
                  : 0.0;
        out.scalars[name + "_n"] = static_cast<double>(n);
    };
    put_mean("cc_user_se", se_cc_sum, se_cc_sq, n_valid);
    put_mean("ce_user_se", se_ce_sum, se_ce_sq, n_edge);
    put_mean("cell_se", se_cell_sum, se_cell_sq, n_valid);
    out.scalars["realizations_valid"] = static_cast<double>(n_valid);
    out.scalars["realizations_with_edge"] = static_cast<double>(n_edge);
    out.scalars["infinite_sinr_count"] = static_cast<double>(infinite_sinr);
    out.scalars["interior_cells"] = static_cast<double>(cells);
    out.scalars["edge_region_fraction"] =
        cells > 0 ? static_cast<double>(cells_with_edge) / cells : 0.0;
    out.scalars["usage_rate_cc_pilot0"] =
        cells > 0 ? static_cast<double>(cc0) / cells : 0.0;
    out.scalars["usage_rate_ce_pilot0"] =
        cells_with_edge > 0 ? static_cast<double>(ce0) / cells_with_edge : 0.0;
    out.scalars["assign_rate_cc"] =
        assign_cells > 0 ? assign_fraction / assign_cells : 0.0;
    return out;
}

}  // namespace pilotgeom
