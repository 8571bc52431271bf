#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "error.hpp"

namespace metricgeo {

/// Parameter coordinates of a point in a formula space.
using Param = std::vector<double>;

/// A named closed-form metric space. Points are identified by their parameter
/// vector and the distance is evaluated from an exact rule.
class FormulaSpace {
public:
    using Rule = std::function<double(std::span<const double>, std::span<const double>)>;
    /// Planar coordinates for spaces whose rule is the Euclidean distance of
    /// those coordinates; enables grid-accelerated neighbourhood queries.
    using Embedding = std::function<std::array<double, 2>(std::span<const double>)>;

    FormulaSpace(std::string name, std::map<std::string, double> params, std::size_t param_dim, Rule rule,
                 std::optional<Embedding> euclidean_embedding = std::nullopt)
        : name_(std::move(name)),
          params_(std::move(params)),
          param_dim_(param_dim),
          rule_(std::move(rule)),
          embedding_(std::move(euclidean_embedding)) {}

    const std::string& name() const { return name_; }
    const std::map<std::string, double>& params() const { return params_; }
    std::size_t param_dim() const { return param_dim_; }

    double distance(std::span<const double> a, std::span<const double> b) const {
        check(a);
        check(b);
        return rule_(a, b);
    }

    const std::optional<Embedding>& embedding() const { return embedding_; }

private:
    void check(std::span<const double> p) const {
        if (p.size() != param_dim_)
            throw Error(ErrorCode::InvalidPoint, name_ + ": expected " + std::to_string(param_dim_) +
                                                     " parameter(s), got " + std::to_string(p.size()));
    }

    std::string name_;
    std::map<std::string, double> params_;
    std::size_t param_dim_;
    Rule rule_;
    std::optional<Embedding> embedding_;
};

namespace detail {

// Uniform bucket grid over planar coordinates.
class PlanarGrid {
public:
    PlanarGrid(std::vector<std::array<double, 2>> coords, double cell) : coords_(std::move(coords)), cell_(cell) {
        for (std::size_t i = 0; i < coords_.size(); ++i) buckets_[key(cell_of(coords_[i][0]), cell_of(coords_[i][1]))].push_back(i);
    }

    static PlanarGrid build(std::vector<std::array<double, 2>> coords) {
        double lo_x = kBig, lo_y = kBig, hi_x = -kBig, hi_y = -kBig;
        for (auto& c : coords) {
            lo_x = std::min(lo_x, c[0]);
            hi_x = std::max(hi_x, c[0]);
            lo_y = std::min(lo_y, c[1]);
            hi_y = std::max(hi_y, c[1]);
        }
        const double n = static_cast<double>(std::max<std::size_t>(coords.size(), 1));
        const double area = (hi_x - lo_x) * (hi_y - lo_y);
        double cell = area > 0.0 ? std::sqrt(area / n) : std::max(hi_x - lo_x, hi_y - lo_y) / n;
        if (!(cell > 0.0) || !std::isfinite(cell)) cell = 1.0;
        return PlanarGrid(std::move(coords), cell);
    }

    // Candidate ids whose coordinates may lie within r of point i, or nullopt
    // when the query box is so large that a linear scan is cheaper.
    std::optional<std::vector<std::size_t>> candidates(std::size_t i, double r) const {
        const auto& c = coords_[i];
        double span_cells = (2.0 * r / cell_ + 2.0) * (2.0 * r / cell_ + 2.0);
        if (!(span_cells <= static_cast<double>(buckets_.size()) + 4.0)) return std::nullopt;
        std::int64_t x0 = cell_of(c[0] - r), x1 = cell_of(c[0] + r);
        std::int64_t y0 = cell_of(c[1] - r), y1 = cell_of(c[1] + r);
        double cells = static_cast<double>(x1 - x0 + 1) * static_cast<double>(y1 - y0 + 1);
        if (cells > static_cast<double>(buckets_.size())) return std::nullopt;
        std::vector<std::size_t> out;
        for (std::int64_t x = x0; x <= x1; ++x)
            for (std::int64_t y = y0; y <= y1; ++y)
                if (auto it = buckets_.find(key(x, y)); it != buckets_.end())
                    out.insert(out.end(), it->second.begin(), it->second.end());
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());  // hashed keys may collide
        return out;
    }

    double cell() const { return cell_; }

private:
    static constexpr double kBig = 1e300;

    std::int64_t cell_of(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }
    static std::uint64_t key(std::int64_t x, std::int64_t y) {
        return (static_cast<std::uint64_t>(x) * 0x9E3779B97F4A7C15ULL) ^ static_cast<std::uint64_t>(y);
    }

    std::vector<std::array<double, 2>> coords_;
    double cell_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

}  // namespace detail

}  // namespace metricgeo
