#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "detail/parallel.hpp"
#include "error.hpp"
#include "metric_space.hpp"

namespace metricgeo {

/// Strictly decreasing radii r0 > r1 > ... > rK, K >= 1.
class ScaleSchedule {
public:
    explicit ScaleSchedule(std::vector<double> radii) : radii_(std::move(radii)) {
        if (radii_.size() < 2) throw Error(ErrorCode::InvalidArgument, "a scale schedule needs at least two radii");
        for (std::size_t k = 0; k < radii_.size(); ++k) {
            if (!(radii_[k] > 0.0) || !std::isfinite(radii_[k]))
                throw Error(ErrorCode::InvalidArgument, "schedule radii must be positive and finite");
            if (k > 0 && !(radii_[k] < radii_[k - 1]))
                throw Error(ErrorCode::InvalidArgument, "schedule radii must be strictly decreasing");
        }
    }

    const std::vector<double>& radii() const { return radii_; }
    double coarsest() const { return radii_.front(); }
    double finest() const { return radii_.back(); }

private:
    std::vector<double> radii_;
};

/// Geometric schedule rule. Zero r0 means diameter/4; zero r_min means twice
/// the distance from the evaluated point to its nearest neighbour. Radii are
/// r0 * ratio^k while above r_min, followed by r_min itself.
struct ScheduleSpec {
    double r0 = 0.0;
    double ratio = 0.5;
    double r_min = 0.0;

    void validate() const {
        if (!(ratio > 0.0 && ratio < 1.0)) throw Error(ErrorCode::InvalidArgument, "schedule ratio must lie in (0,1)");
        if (r0 < 0.0 || r_min < 0.0) throw Error(ErrorCode::InvalidArgument, "schedule radii must be nonnegative");
    }
};

/// A ScheduleSpec with the space-wide quantities (diameter) already resolved.
class SchedulePolicy {
public:
    SchedulePolicy(const MetricSpace& space, ScheduleSpec spec) : spec_(spec) {
        spec_.validate();
        if (spec_.r0 == 0.0) spec_.r0 = diameter(space) / 4.0;
    }

    explicit SchedulePolicy(ScaleSchedule fixed) : spec_{}, fixed_(std::move(fixed)) {}

    ScaleSchedule for_point(const MetricSpace& space, PointId x) const {
        if (fixed_) return *fixed_;
        double r_min = spec_.r_min;
        if (r_min == 0.0) {
            double nn = space.nearest_distance(x);
            r_min = std::isfinite(nn) ? 2.0 * nn : spec_.r0;
        }
        std::vector<double> radii;
        for (double r = spec_.r0; r > r_min && radii.size() < 200; r *= spec_.ratio) radii.push_back(r);
        if (radii.empty()) radii.push_back(r_min / spec_.ratio);
        radii.push_back(r_min);
        return ScaleSchedule(std::move(radii));
    }

    const ScheduleSpec& spec() const { return spec_; }
    bool fixed() const { return fixed_.has_value(); }

private:
    ScheduleSpec spec_;
    std::optional<ScaleSchedule> fixed_;
};

struct ScaleValue {
    double r;
    double d_r;  // oscillation (1/r) max |f(y) - f(x)|
    double s_r;  // max difference quotient |f(y) - f(x)| / d(x, y)
};

struct LipEstimate {
    PointId point = 0;
    double value = 0.0;
    std::vector<ScaleValue> scales;
    bool converged = false;
    bool isolated_at_finest = false;
};

namespace detail {

// Per-radius (D_r, S_r) of an arbitrary increment |Δ(y)| over 0 < d(x, y) <= r.
template <class Increment>
std::vector<ScaleValue> slope_profile(const MetricSpace& space, PointId x, const std::vector<double>& radii,
                                      Increment&& increment) {
    auto near = space.within(x, radii.front());
    std::vector<ScaleValue> out;
    out.reserve(radii.size());
    for (double r : radii) {
        double osc = 0.0, slope = 0.0;
        for (const auto& nb : near) {
            if (!(nb.distance > 0.0) || nb.distance > r) continue;
            double inc = increment(nb.id);
            osc = std::max(osc, inc);
            slope = std::max(slope, inc / nb.distance);
        }
        out.push_back({r, osc / r, slope});
    }
    return out;
}

inline bool last_three_agree(const std::vector<ScaleValue>& scales) {
    std::size_t take = std::min<std::size_t>(3, scales.size());
    double lo = kInfinity, hi = 0.0;
    for (std::size_t k = scales.size() - take; k < scales.size(); ++k) {
        lo = std::min(lo, scales[k].s_r);
        hi = std::max(hi, scales[k].s_r);
    }
    return hi == 0.0 || (hi - lo) / hi < 0.01;
}

}  // namespace detail

/// (1/r) max{|f(y) - f(x)| : 0 < d(x,y) <= r}; zero when no such y exists.
inline double d_r_oscillation(const MetricSpace& space, const ScalarField& f, PointId x, double r) {
    check_field(space, f);
    if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
    auto prof = detail::slope_profile(space, x, {r}, [&](PointId y) { return std::abs(f[y] - f[x]); });
    return prof.front().d_r;
}

/// max{|f(y) - f(x)| / d(x,y) : 0 < d(x,y) <= r}. Nondecreasing in r.
inline double slope_sup(const MetricSpace& space, const ScalarField& f, PointId x, double r) {
    check_field(space, f);
    if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
    auto prof = detail::slope_profile(space, x, {r}, [&](PointId y) { return std::abs(f[y] - f[x]); });
    return prof.front().s_r;
}

/// Lip f(x) estimated as the slope sup at the finest scale of the schedule.
inline LipEstimate lip_estimate(const MetricSpace& space, const ScalarField& f, PointId x,
                                const ScaleSchedule& schedule) {
    check_field(space, f);
    LipEstimate est;
    est.point = x;
    est.scales =
        detail::slope_profile(space, x, schedule.radii(), [&](PointId y) { return std::abs(f[y] - f[x]); });
    est.value = est.scales.back().s_r;
    est.converged = detail::last_three_agree(est.scales);
    bool any = false;
    for (const auto& nb : space.within(x, schedule.finest()))
        if (nb.distance > 0.0) any = true;
    est.isolated_at_finest = !any;
    return est;
}

inline LipEstimate lip_estimate(const MetricSpace& space, const ScalarField& f, PointId x,
                                const SchedulePolicy& policy) {
    return lip_estimate(space, f, x, policy.for_point(space, x));
}

/// Lip estimates at every point.
inline std::vector<LipEstimate> lip_field(const MetricSpace& space, const ScalarField& f,
                                          const SchedulePolicy& policy) {
    check_field(space, f);
    std::vector<LipEstimate> out(space.size());
    detail::parallel_for(space.size(), [&](std::size_t x) { out[x] = lip_estimate(space, f, x, policy); });
    return out;
}

struct SupLip {
    double value = 0.0;
    PointId point = 0;
};

inline SupLip sup_lip(const std::vector<LipEstimate>& field) {
    SupLip best;
    for (const auto& e : field)
        if (e.value > best.value) best = {e.value, e.point};
    return best;
}

/// Pointwise Lipschitz constant of the identity map from `from` to `to`
/// (two metrics on the same point set).
inline LipEstimate map_lip_estimate(const MetricSpace& from, const MetricSpace& to, PointId x,
                                    const ScaleSchedule& schedule) {
    if (from.size() != to.size()) throw Error(ErrorCode::InvalidArgument, "spaces must share the point set");
    LipEstimate est;
    est.point = x;
    est.scales = detail::slope_profile(from, x, schedule.radii(), [&](PointId y) { return to.distance(x, y); });
    est.value = est.scales.back().s_r;
    est.converged = detail::last_three_agree(est.scales);
    return est;
}

struct LipConstant {
    double value = 0.0;
    PointId x = 0;
    PointId y = 0;  // witness pair, lexicographically smallest among maximisers
};

namespace detail {

template <class Members>
LipConstant pairwise_lip(const MetricSpace& space, const ScalarField& f, const Members& members) {
    LipConstant best;
    bool have = false;
    for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = a + 1; b < members.size(); ++b) {
            PointId x = members[a], y = members[b];
            double d = space.distance(x, y);
            double df = std::abs(f[x] - f[y]);
            if (d == 0.0) {
                if (df > 0.0)
                    throw Error(ErrorCode::DegenerateMetric, "points " + std::to_string(x) + " and " +
                                                                 std::to_string(y) + " coincide but f differs");
                continue;
            }
            double q = df / d;
            PointId lo = std::min(x, y), hi = std::max(x, y);
            if (!have || q > best.value || (q == best.value && std::pair(lo, hi) < std::pair(best.x, best.y))) {
                best = {q, lo, hi};
                have = true;
            }
        }
    return best;
}

}  // namespace detail

/// max over pairs of |f(x) - f(y)| / d(x, y).
inline LipConstant global_lip_constant(const MetricSpace& space, const ScalarField& f) {
    check_field(space, f);
    const std::size_t n = space.size();
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "global Lipschitz constant needs at least two points");
    std::vector<LipConstant> row_best(n);
    detail::parallel_for(n, [&](std::size_t x) {
        auto dist = space.distances_from(x);
        LipConstant best{0.0, x, x};
        for (std::size_t y = x + 1; y < n; ++y) {
            double df = std::abs(f[x] - f[y]);
            if (!std::isfinite(dist[y]))
                throw Error(ErrorCode::Unreachable,
                            "no path between " + std::to_string(x) + " and " + std::to_string(y));
            if (dist[y] == 0.0) {
                if (df > 0.0)
                    throw Error(ErrorCode::DegenerateMetric, "points " + std::to_string(x) + " and " +
                                                                 std::to_string(y) + " coincide but f differs");
                continue;
            }
            double q = df / dist[y];
            if (q > best.value || best.y == x) best = {q, x, y};
        }
        row_best[x] = best;
    });
    LipConstant best{0.0, 0, 1};
    bool have = false;
    for (std::size_t x = 0; x + 1 < n; ++x) {
        if (row_best[x].y == x) continue;
        if (!have || row_best[x].value > best.value) {
            best = row_best[x];
            have = true;
        }
    }
    return best;
}

/// max(sup |f|, sup_x Lip f(x)).
inline double d_infty_norm(const MetricSpace& space, const ScalarField& f, const SchedulePolicy& policy) {
    double sup_f = 0.0;
    for (double v : f.values()) sup_f = std::max(sup_f, std::abs(v));
    return std::max(sup_f, sup_lip(lip_field(space, f, policy)).value);
}

/// max(|f(basepoint)|, sup_x Lip f(x)).
inline double d_norm(const MetricSpace& space, const ScalarField& f, PointId basepoint,
                     const SchedulePolicy& policy) {
    space.check_point(basepoint);
    check_field(space, f);
    return std::max(std::abs(f[basepoint]), sup_lip(lip_field(space, f, policy)).value);
}

struct LocalLipWitness {
    PointId center;
    double radius;
    LipConstant pair;
};

/// Scale-relative membership in D(X), LIP(X) and LIP_loc(X). Finite data
/// cannot certify the limits involved; the report states the tested scales.
struct MembershipReport {
    bool in_D = false;
    bool in_LIP = false;
    bool in_LIP_loc = false;
    double threshold = 0.0;
    SupLip sup_lip;
    LipConstant global;
    std::optional<LocalLipWitness> local_failure;  // first centre whose finest ball breaks the threshold
    double finest_scale_min = kInfinity;
    double finest_scale_max = 0.0;
};

inline MembershipReport classify_membership(const MetricSpace& space, const ScalarField& f,
                                            const SchedulePolicy& policy, double lip_threshold) {
    check_field(space, f);
    MembershipReport rep;
    rep.threshold = lip_threshold;
    auto field = lip_field(space, f, policy);
    rep.sup_lip = sup_lip(field);
    rep.in_D = rep.sup_lip.value <= lip_threshold;
    rep.global = global_lip_constant(space, f);
    rep.in_LIP = rep.global.value <= lip_threshold;

    const std::size_t n = space.size();
    std::vector<std::optional<LocalLipWitness>> failures(n);
    std::vector<double> finest(n);
    detail::parallel_for(n, [&](std::size_t x) {
        double r = policy.for_point(space, x).finest();
        finest[x] = r;
        std::vector<PointId> members;
        for (const auto& nb : space.within(x, r)) members.push_back(nb.id);
        LipConstant local = detail::pairwise_lip(space, f, members);
        if (local.value > lip_threshold) failures[x] = LocalLipWitness{x, r, local};
    });
    rep.in_LIP_loc = true;
    for (std::size_t x = 0; x < n; ++x) {
        rep.finest_scale_min = std::min(rep.finest_scale_min, finest[x]);
        rep.finest_scale_max = std::max(rep.finest_scale_max, finest[x]);
        if (failures[x] && rep.in_LIP_loc) {
            rep.in_LIP_loc = false;
            rep.local_failure = failures[x];
        }
    }
    return rep;
}

}  // namespace metricgeo
