#include "stpilot/timewarp.hpp"

#include <algorithm>
#include <cmath>

#include "stpilot/rng.hpp"

namespace stpilot::timewarp {
namespace {

constexpr double kMatchTol = 1e-9;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool matches(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > kMatchTol) return false;
  }
  return true;
}

std::optional<WarpParams> try_candidate(const WarpParams& params, const TimeSignal& signal) {
  const WarpSpec spec{params, static_cast<int>(signal.size()), 0};
  try {
    validate(spec);
  } catch (const Error&) {
    return std::nullopt;
  }
  if (matches(eval_warp(spec).values(), signal.values())) return params;
  return std::nullopt;
}

}  // namespace

TimeSignal::TimeSignal(std::vector<double> values, int horizon)
    : values_(std::move(values)), horizon_(horizon) {
  require(!values_.empty(), ErrorKind::InvalidArgument, "time signal is empty");
  require(horizon_ >= 1, ErrorKind::InvalidArgument, "time signal horizon must be >= 1");
  for (double v : values_) {
    require(std::isfinite(v) && v >= 1.0 && v <= static_cast<double>(horizon_),
            ErrorKind::OutOfRange,
            "time value " + std::to_string(v) + " outside [1, " + std::to_string(horizon_) + "]");
  }
}

TimeSignal TimeSignal::forward(int frames) {
  require(frames >= 1, ErrorKind::InvalidArgument, "frame count must be >= 1");
  std::vector<double> v(static_cast<std::size_t>(frames));
  for (int f = 0; f < frames; ++f) v[f] = f + 1;
  return {std::move(v), frames};
}

std::string_view to_string(WarpKind kind) {
  switch (kind) {
    case WarpKind::Identity: return "identity";
    case WarpKind::Reverse: return "reverse";
    case WarpKind::Accelerate: return "accelerate";
    case WarpKind::Freeze: return "freeze";
    case WarpKind::SlowSegment: return "slow_segment";
    case WarpKind::Zigzag: return "zigzag";
  }
  return "unknown";
}

WarpKind parse_warp_kind(std::string_view name) {
  for (WarpKind k : kAllWarpKinds) {
    if (to_string(k) == name) return k;
  }
  fail(ErrorKind::InvalidArgument, "unknown warp kind '" + std::string(name) + "'");
}

WarpKind kind_of(const WarpParams& params) {
  return std::visit(Overloaded{
                        [](const Identity&) { return WarpKind::Identity; },
                        [](const Reverse&) { return WarpKind::Reverse; },
                        [](const Accelerate&) { return WarpKind::Accelerate; },
                        [](const Freeze&) { return WarpKind::Freeze; },
                        [](const SlowSegment&) { return WarpKind::SlowSegment; },
                        [](const Zigzag&) { return WarpKind::Zigzag; },
                    },
                    params);
}

void validate(const WarpSpec& spec) {
  const int n = spec.frames;
  require(n >= 1, ErrorKind::InvalidArgument, "warp frame count must be >= 1");
  std::visit(Overloaded{
                 [](const Identity&) {},
                 [](const Reverse&) {},
                 [](const Accelerate& a) {
                   require(std::isfinite(a.factor) && a.factor > 0.0, ErrorKind::InvalidArgument,
                           "acceleration factor must be > 0");
                 },
                 [n](const Freeze& fz) {
                   require(std::isfinite(fz.at) && fz.at >= 1.0 && fz.at <= n,
                           ErrorKind::InvalidArgument, "freeze frame outside [1, F]");
                 },
                 [n](const SlowSegment& s) {
                   require(1 <= s.start && s.start < s.end && s.end <= n,
                           ErrorKind::InvalidArgument, "slow segment needs 1 <= start < end <= F");
                   require(std::isfinite(s.factor) && s.factor > 0.0 && s.factor < 1.0,
                           ErrorKind::InvalidArgument, "slow factor must be in (0, 1)");
                 },
                 [](const Zigzag& z) {
                   require(z.period >= 2, ErrorKind::InvalidArgument,
                           "zigzag period must be >= 2");
                 },
             },
             spec.params);
}

TimeSignal eval_warp(const WarpSpec& spec) {
  validate(spec);
  const int n = spec.frames;
  const double top = n;
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int f = 1; f <= n; ++f) {
    const double x = f;
    double t = std::visit(
        Overloaded{
            [&](const Identity&) { return x; },
            [&](const Reverse&) { return top + 1.0 - x; },
            [&](const Accelerate& a) { return std::min(1.0 + a.factor * (x - 1.0), top); },
            [&](const Freeze& fz) { return fz.at; },
            [&](const SlowSegment& s) {
              if (f <= s.start) return x;
              if (f <= s.end) return s.start + s.factor * (x - s.start);
              return s.start + s.factor * (s.end - s.start) + (x - s.end);
            },
            [&](const Zigzag& z) {
              const int phase = (f - 1) % z.period;
              const int rise = std::min(phase, z.period - phase);
              return std::min(1.0 + rise, top);
            },
        },
        spec.params);
    out[f - 1] = t;
  }
  return {std::move(out), n};
}

WarpSpec sample_warp(std::uint64_t seed, int frames, std::span<const WarpKind> families,
                     const WarpRanges& ranges) {
  require(!families.empty(), ErrorKind::InvalidArgument, "no warp families to sample from");
  require(frames >= 1, ErrorKind::InvalidArgument, "frame count must be >= 1");
  std::vector<WarpKind> kinds(families.begin(), families.end());
  std::sort(kinds.begin(), kinds.end());
  kinds.erase(std::unique(kinds.begin(), kinds.end()), kinds.end());

  Rng rng(seed);
  const WarpKind kind = kinds[static_cast<std::size_t>(rng.integer(0, kinds.size() - 1))];
  WarpSpec spec{Identity{}, frames, seed};
  switch (kind) {
    case WarpKind::Identity: break;
    case WarpKind::Reverse: spec.params = Reverse{}; break;
    case WarpKind::Accelerate:
      spec.params = Accelerate{rng.uniform(ranges.accelerate_min, ranges.accelerate_max)};
      break;
    case WarpKind::Freeze: spec.params = Freeze{static_cast<double>(rng.integer(1, frames))}; break;
    case WarpKind::SlowSegment: {
      require(frames >= 2, ErrorKind::InvalidArgument, "slow segment needs F >= 2");
      SlowSegment s;
      s.factor = rng.uniform(ranges.slow_min, ranges.slow_max);
      s.start = static_cast<int>(rng.integer(1, frames - 1));
      s.end = static_cast<int>(rng.integer(s.start + 1, frames));
      spec.params = s;
      break;
    }
    case WarpKind::Zigzag: {
      // A period of F - 1 or more never turns around within the clip.
      const int hi = std::max(2, std::min(ranges.zigzag_period_max, frames - 1));
      const int lo = std::clamp(ranges.zigzag_period_min, 2, hi);
      spec.params = Zigzag{static_cast<int>(rng.integer(lo, hi))};
      break;
    }
  }
  validate(spec);
  return spec;
}

std::string Classification::label() const {
  return params ? std::string(to_string(kind_of(*params))) : "freeform";
}

Classification classify_signal(const TimeSignal& signal) {
  const auto v = signal.values();
  const std::size_t n = v.size();

  if (auto p = try_candidate(Identity{}, signal)) return {p};
  if (auto p = try_candidate(Reverse{}, signal)) return {p};
  if (auto p = try_candidate(Freeze{v[0]}, signal)) return {p};
  if (n < 2 || std::abs(v[0] - 1.0) > kMatchTol) return {};

  const double step = v[1] - v[0];
  if (step > 1.0 + kMatchTol) {
    if (auto p = try_candidate(Accelerate{step}, signal)) return {p};
  }

  // First frame where the unit-speed prefix ends.
  std::size_t first = 0;
  while (first + 1 < n && std::abs((v[first + 1] - v[first]) - 1.0) <= kMatchTol) ++first;
  if (first + 1 < n) {
    const double d = v[first + 1] - v[first];
    const int start = static_cast<int>(first) + 1;
    if (d > kMatchTol && d < 1.0 - kMatchTol) {
      int end = start;
      while (end < static_cast<int>(n) && std::abs((v[end] - v[end - 1]) - d) <= kMatchTol) ++end;
      if (auto p = try_candidate(SlowSegment{start, end, d}, signal)) return {p};
      if (auto p = try_candidate(Accelerate{d}, signal)) return {p};
    }
    const int rise = static_cast<int>(first);
    if (rise >= 1 && std::abs(d) <= kMatchTol) {
      if (auto p = try_candidate(Zigzag{2 * rise + 1}, signal)) return {p};
    }
    if (rise >= 1 && std::abs(d + 1.0) <= kMatchTol) {
      if (auto p = try_candidate(Zigzag{2 * rise}, signal)) return {p};
    }
  }
  return {};
}

nlohmann::json to_json(const WarpSpec& spec) {
  nlohmann::json params = std::visit(
      Overloaded{
          [](const Identity&) { return nlohmann::json::object(); },
          [](const Reverse&) { return nlohmann::json::object(); },
          [](const Accelerate& a) { return nlohmann::json{{"factor", a.factor}}; },
          [](const Freeze& f) { return nlohmann::json{{"at", f.at}}; },
          [](const SlowSegment& s) {
            return nlohmann::json{{"start", s.start}, {"end", s.end}, {"factor", s.factor}};
          },
          [](const Zigzag& z) { return nlohmann::json{{"period", z.period}}; },
      },
      spec.params);
  return {{"kind", to_string(spec.kind())}, {"params", params}, {"F", spec.frames},
          {"seed", spec.seed}};
}

WarpSpec warp_spec_from_json(const nlohmann::json& j) {
  try {
    WarpSpec spec;
    spec.frames = j.at("F").get<int>();
    spec.seed = j.value("seed", std::uint64_t{0});
    const auto& p = j.contains("params") ? j.at("params") : nlohmann::json::object();
    switch (parse_warp_kind(j.at("kind").get<std::string>())) {
      case WarpKind::Identity: spec.params = Identity{}; break;
      case WarpKind::Reverse: spec.params = Reverse{}; break;
      case WarpKind::Accelerate: spec.params = Accelerate{p.at("factor").get<double>()}; break;
      case WarpKind::Freeze: spec.params = Freeze{p.at("at").get<double>()}; break;
      case WarpKind::SlowSegment:
        spec.params = SlowSegment{p.at("start").get<int>(), p.at("end").get<int>(),
                                  p.at("factor").get<double>()};
        break;
      case WarpKind::Zigzag: spec.params = Zigzag{p.at("period").get<int>()}; break;
    }
    validate(spec);
    return spec;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidArgument, std::string("bad warp spec JSON: ") + e.what());
  }
}

nlohmann::json to_json(const WarpRanges& r) {
  return {{"accelerate_min", r.accelerate_min},     {"accelerate_max", r.accelerate_max},
          {"slow_min", r.slow_min},                 {"slow_max", r.slow_max},
          {"zigzag_period_min", r.zigzag_period_min}, {"zigzag_period_max", r.zigzag_period_max}};
}

WarpRanges warp_ranges_from_json(const nlohmann::json& j) {
  WarpRanges r;
  r.accelerate_min = j.value("accelerate_min", r.accelerate_min);
  r.accelerate_max = j.value("accelerate_max", r.accelerate_max);
  r.slow_min = j.value("slow_min", r.slow_min);
  r.slow_max = j.value("slow_max", r.slow_max);
  r.zigzag_period_min = j.value("zigzag_period_min", r.zigzag_period_min);
  r.zigzag_period_max = j.value("zigzag_period_max", r.zigzag_period_max);
  require(0.0 < r.accelerate_min && r.accelerate_min <= r.accelerate_max,
          ErrorKind::InvalidArgument, "bad acceleration range");
  require(0.0 < r.slow_min && r.slow_min <= r.slow_max && r.slow_max < 1.0,
          ErrorKind::InvalidArgument, "bad slow-factor range");
  require(2 <= r.zigzag_period_min && r.zigzag_period_min <= r.zigzag_period_max,
          ErrorKind::InvalidArgument, "bad zigzag period range");
  return r;
}

nlohmann::json to_json(const TimeSignal& signal) {
  return {{"values", std::vector<double>(signal.values().begin(), signal.values().end())},
          {"horizon", signal.horizon()}};
}

TimeSignal time_signal_from_json(const nlohmann::json& j) {
  try {
    if (j.is_array()) {
      auto values = j.get<std::vector<double>>();
      double top = static_cast<double>(values.size());
      for (double v : values) top = std::max(top, std::ceil(v));
      return {std::move(values), static_cast<int>(top)};
    }
    return {j.at("values").get<std::vector<double>>(), j.at("horizon").get<int>()};
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidArgument, std::string("bad time signal JSON: ") + e.what());
  }
}

}  // namespace stpilot::timewarp
