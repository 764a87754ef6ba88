#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gqw/cas.hpp"

namespace gqw {

/// A single global coordinate chart with its sampling domain.
class Chart {
 public:
  static constexpr std::size_t kMaxDimension = 6;

  Chart() = default;
  Chart(std::vector<std::string> coordinates, DomainSampler sampler)
      : coordinates_(std::move(coordinates)), sampler_(std::move(sampler)) {
    if (coordinates_.empty() || coordinates_.size() > kMaxDimension)
      throw ValidationError("chart dimension must be between 1 and 6");
    std::set<std::string> seen(coordinates_.begin(), coordinates_.end());
    if (seen.size() != coordinates_.size()) throw ValidationError("chart coordinates must be distinct");
    for (const auto& c : coordinates_) {
      if (c == "pi" || c == "i" || c == "hbar") throw ValidationError("'" + c + "' is a reserved name");
      const auto& sc = sampler_.coordinates();
      if (std::find(sc.begin(), sc.end(), c) == sc.end())
        throw ValidationError("sampler does not cover coordinate '" + c + "'");
    }
  }

  /// Chart on a box with optional strict inequalities `g > 0`.
  static Chart box(std::vector<std::string> coordinates, double half_width = 2.0,
                   std::vector<Expr> positive = {}) {
    std::vector<Interval> b(coordinates.size(), Interval{-half_width, half_width});
    DomainSampler s(coordinates, std::move(b), std::move(positive));
    return Chart(std::move(coordinates), std::move(s));
  }

  [[nodiscard]] std::size_t dimension() const { return coordinates_.size(); }
  [[nodiscard]] const std::vector<std::string>& coordinates() const { return coordinates_; }
  [[nodiscard]] const std::string& coordinate(std::size_t i) const { return coordinates_[i]; }
  [[nodiscard]] Expr coordinate_symbol(std::size_t i) const { return symbol(coordinates_[i]); }
  [[nodiscard]] const DomainSampler& sampler() const { return sampler_; }
  /// Same coordinates, different sampling domain or settings.
  [[nodiscard]] Chart with_sampler(DomainSampler s) const { return {coordinates_, std::move(s)}; }
  [[nodiscard]] std::set<std::string> vocabulary() const {
    return {coordinates_.begin(), coordinates_.end()};
  }
  [[nodiscard]] int index_of(const std::string& name) const {
    auto it = std::find(coordinates_.begin(), coordinates_.end(), name);
    return it == coordinates_.end() ? -1 : static_cast<int>(it - coordinates_.begin());
  }

  [[nodiscard]] Expr parse(std::string_view text) const { return parse_expr(text, vocabulary()); }

  friend bool operator==(const Chart& a, const Chart& b) { return a.coordinates_ == b.coordinates_; }

 private:
  std::vector<std::string> coordinates_;
  DomainSampler sampler_;
};

inline void require_same_chart(const Chart& a, const Chart& b, const char* op) {
  if (!(a == b)) throw ChartMismatchError(std::string(op) + ": operands live on different charts");
}

}  // namespace gqw
