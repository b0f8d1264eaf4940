#include "npmoment/moments.hpp"

#include <charconv>

#include "npmoment/errors.hpp"

namespace npmoment {

void MomentFunction::check_observation(const Observation& o) const {
  switch (kind) {
    case MomentKind::regression:
    case MomentKind::quantile:
      if (o.y.size() != 1) throw DimensionError(name + ": outcome must be scalar");
      break;
    case MomentKind::het_effect:
      if (o.t.empty()) throw SchemaError("het_effect: treatment vector missing");
      if (o.y.size() != 1) throw DimensionError("het_effect: outcome must be scalar");
      break;
    case MomentKind::iv:
      if (o.t.size() != 1) throw SchemaError("iv: scalar treatment required");
      if (!o.w) throw SchemaError("iv: instrument missing");
      if (o.y.size() != 1) throw DimensionError("iv: outcome must be scalar");
      break;
    case MomentKind::custom:
      break;
  }
}

MomentFunction regression_moment() {
  MomentFunction m;
  m.name = "regression";
  m.p = 1;
  m.kind = MomentKind::regression;
  m.evaluate = [](const Observation& o, std::span<const double> theta, std::span<double> out) {
    out[0] = o.y[0] - theta[0];
  };
  m.jacobian = [](const Observation&, std::span<const double>, Matrix& out) {
    out = Matrix(1, 1);
    out(0, 0) = -1.0;
  };
  return m;
}

MomentFunction quantile_moment(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw PreconditionError("quantile_moment: alpha must lie in (0,1)");
  MomentFunction m;
  m.name = "quantile";
  m.p = 1;
  m.kind = MomentKind::quantile;
  m.smoothness = SmoothnessClass::piecewise_constant;
  m.quantile_alpha = alpha;
  m.evaluate = [alpha](const Observation& o, std::span<const double> theta, std::span<double> out) {
    out[0] = (o.y[0] <= theta[0] ? 1.0 : 0.0) - alpha;
  };
  return m;
}

MomentFunction het_effect_moment() {
  MomentFunction m;
  m.name = "het_effect";
  m.p = 0;  // bound to dim(T) when a dataset is attached
  m.kind = MomentKind::het_effect;
  m.evaluate = [](const Observation& o, std::span<const double> theta, std::span<double> out) {
    double fit = 0.0;
    for (std::size_t j = 0; j < o.t.size(); ++j) fit += theta[j] * o.t[j];
    const double r = o.y[0] - fit;
    for (std::size_t j = 0; j < o.t.size(); ++j) out[j] = r * o.t[j];
  };
  m.jacobian = [](const Observation& o, std::span<const double>, Matrix& out) {
    const std::size_t p = o.t.size();
    out = Matrix(p, p);
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b < p; ++b) out(a, b) = -o.t[a] * o.t[b];
  };
  return m;
}

MomentFunction iv_moment() {
  MomentFunction m;
  m.name = "iv";
  m.p = 1;
  m.kind = MomentKind::iv;
  m.evaluate = [](const Observation& o, std::span<const double> theta, std::span<double> out) {
    out[0] = (o.y[0] - theta[0] * o.t[0]) * *o.w;
  };
  m.jacobian = [](const Observation& o, std::span<const double>, Matrix& out) {
    out = Matrix(1, 1);
    out(0, 0) = -o.t[0] * *o.w;
  };
  return m;
}

MomentFunction moment_by_name(std::string_view spec) {
  if (spec == "regression") return regression_moment();
  if (spec == "het_effect") return het_effect_moment();
  if (spec == "iv") return iv_moment();
  constexpr std::string_view q = "quantile:";
  if (spec.substr(0, q.size()) == q) {
    const auto rest = spec.substr(q.size());
    double alpha = 0.0;
    const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), alpha);
    if (ec != std::errc() || ptr != rest.data() + rest.size())
      throw ConfigError("bad quantile level in moment spec '" + std::string(spec) + "'");
    return quantile_moment(alpha);
  }
  throw ConfigError("unknown moment '" + std::string(spec) +
                    "' (expected regression | quantile:<alpha> | het_effect | iv)");
}

}  // namespace npmoment
